"""Binary document-term matrix: invariants, conversions, serialization."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supptopics.dtm import DocTermMatrix, load_dtm, save_dtm
from supptopics.errors import MissingArtifactError, ValidationError

VOCAB = ["w0", "w1", "w2", "w3"]


def tiny() -> DocTermMatrix:
    return DocTermMatrix(
        n_words=4,
        rows=((0, 2), (1,), (0, 1, 3)),
        doc_ids=("a", "b", "c"),
    )


class TestConstruction:
    def test_shape(self):
        m = tiny()
        assert m.n_docs == 3
        assert m.n_words == 4
        assert m.density == pytest.approx(6 / 12)

    def test_duplicate_doc_ids_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            DocTermMatrix(n_words=1, rows=((0,), (0,)), doc_ids=("a", "a"))

    def test_row_count_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="lengths differ"):
            DocTermMatrix(n_words=1, rows=((0,),), doc_ids=("a", "b"))

    def test_unsorted_row_rejected(self):
        with pytest.raises(ValidationError, match="sorted"):
            DocTermMatrix(n_words=3, rows=((2, 0),), doc_ids=("a",))

    def test_duplicate_index_rejected(self):
        with pytest.raises(ValidationError, match="sorted"):
            DocTermMatrix(n_words=3, rows=((1, 1),), doc_ids=("a",))

    def test_out_of_range_index_rejected(self):
        with pytest.raises(ValidationError, match="out of range"):
            DocTermMatrix(n_words=2, rows=((2,),), doc_ids=("a",))

    def test_empty_row_rejected(self):
        with pytest.raises(ValidationError, match="empty"):
            DocTermMatrix(n_words=2, rows=((),), doc_ids=("a",))


class TestConversions:
    def test_to_csr(self):
        dense = tiny().to_csr().toarray()
        expected = np.array(
            [[1, 0, 1, 0], [0, 1, 0, 0], [1, 1, 0, 1]], dtype=np.float64
        )
        np.testing.assert_array_equal(dense, expected)
        assert dense.dtype == np.float64

    def test_doc_frequencies(self):
        np.testing.assert_array_equal(tiny().doc_frequencies(), [2, 2, 1, 1])


class TestSerialization:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "dtm.json"
        save_dtm(tiny(), VOCAB, path, dropped_empty_ids=("gone",))
        matrix, vocabulary, dropped = load_dtm(path)
        assert matrix == tiny()
        assert vocabulary == VOCAB
        assert dropped == ("gone",)

    def test_byte_determinism(self, tmp_path):
        p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
        save_dtm(tiny(), VOCAB, p1)
        save_dtm(tiny(), VOCAB, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingArtifactError):
            load_dtm(tmp_path / "absent.json")

    def test_non_object_payload(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[]", encoding="utf-8")
        with pytest.raises(ValidationError, match="object"):
            load_dtm(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ValidationError, match="cannot read"):
            load_dtm(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "dtm.json"
        save_dtm(tiny(), VOCAB, path)
        payload = path.read_text(encoding="utf-8").replace('"version":1', '"version":99')
        path.write_text(payload, encoding="utf-8")
        with pytest.raises(ValidationError, match="version"):
            load_dtm(path)

    def test_vocabulary_size_disagreement(self, tmp_path):
        path = tmp_path / "dtm.json"
        save_dtm(tiny(), VOCAB, path)
        payload = path.read_text(encoding="utf-8").replace('"w3"', '"w3","w4"')
        path.write_text(payload, encoding="utf-8")
        with pytest.raises(ValidationError, match="disagrees"):
            load_dtm(path)

    def test_corrupt_rows_rejected_on_load(self, tmp_path):
        path = tmp_path / "dtm.json"
        save_dtm(tiny(), VOCAB, path)
        payload = path.read_text(encoding="utf-8").replace("[0,2]", "[2,0]")
        path.write_text(payload, encoding="utf-8")
        with pytest.raises(ValidationError, match="sorted"):
            load_dtm(path)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=1, max_value=8).flatmap(
        lambda n_words: st.lists(
            st.sets(
                st.integers(min_value=0, max_value=n_words - 1), min_size=1
            ).map(lambda s: tuple(sorted(s))),
            min_size=1,
            max_size=10,
        ).map(lambda rows: (n_words, rows))
    )
)
def test_round_trip_property(tmp_path_factory, payload):
    n_words, rows = payload
    matrix = DocTermMatrix(
        n_words=n_words,
        rows=tuple(rows),
        doc_ids=tuple(f"d{i}" for i in range(len(rows))),
    )
    vocabulary = [f"word{j}" for j in range(n_words)]
    path = tmp_path_factory.mktemp("dtm") / "m.json"
    save_dtm(matrix, vocabulary, path)
    again, vocab_again, dropped = load_dtm(path)
    assert again == matrix
    assert vocab_again == vocabulary
    assert dropped == ()
    np.testing.assert_array_equal(again.to_csr().toarray(), matrix.to_csr().toarray())
