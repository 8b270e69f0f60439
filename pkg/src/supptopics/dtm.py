"""Sparse binary document-term matrix."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import MissingArtifactError, ValidationError
from .fileio import atomic_write_text


@dataclass(frozen=True)
class DocTermMatrix:
    """Binary presence matrix: rows are sorted word-index sets per document.

    Rows are non-empty and aligned with ``doc_ids``. Immutable; share freely.
    """

    n_words: int
    rows: tuple[tuple[int, ...], ...]
    doc_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.doc_ids):
            raise ValidationError("rows and doc_ids lengths differ")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValidationError("duplicate doc ids in matrix")
        for doc_id, row in zip(self.doc_ids, self.rows):
            if not row:
                raise ValidationError(f"empty row for document {doc_id!r}")
            if any(w < 0 or w >= self.n_words for w in row):
                raise ValidationError(f"word index out of range in document {doc_id!r}")
            if list(row) != sorted(set(row)):
                raise ValidationError(f"row for document {doc_id!r} is not a sorted set")

    @property
    def n_docs(self) -> int:
        return len(self.rows)

    @property
    def density(self) -> float:
        return sum(len(r) for r in self.rows) / (self.n_docs * self.n_words)

    def to_csr(self) -> sparse.csr_matrix:
        """Float64 CSR view of the presence bits."""
        indptr = np.zeros(self.n_docs + 1, dtype=np.int64)
        for i, row in enumerate(self.rows):
            indptr[i + 1] = indptr[i] + len(row)
        indices = np.fromiter(
            (w for row in self.rows for w in row), dtype=np.int64, count=int(indptr[-1])
        )
        data = np.ones(len(indices), dtype=np.float64)
        return sparse.csr_matrix((data, indices, indptr), shape=(self.n_docs, self.n_words))

    def doc_frequencies(self) -> np.ndarray:
        """Number of documents containing each word, shape (n_words,)."""
        df = np.zeros(self.n_words, dtype=np.int64)
        for row in self.rows:
            df[list(row)] += 1
        return df


def save_dtm(matrix: DocTermMatrix, vocabulary: list[str], path: str | Path,
             dropped_empty_ids: tuple[str, ...] = ()) -> None:
    """Persist a matrix with its vocabulary as deterministic JSON."""
    payload = {
        "version": 1,
        "n_words": matrix.n_words,
        "vocabulary": list(vocabulary),
        "doc_ids": list(matrix.doc_ids),
        "rows": [list(r) for r in matrix.rows],
        "dropped_empty_ids": list(dropped_empty_ids),
    }
    atomic_write_text(
        path, json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"
    )


def load_dtm(path: str | Path) -> tuple[DocTermMatrix, list[str], tuple[str, ...]]:
    """Load (matrix, vocabulary, dropped_empty_ids) written by save_dtm."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"document-term matrix not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read document-term matrix {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValidationError(f"{path}: document-term matrix must be a JSON object")
    if payload.get("version") != 1:
        raise ValidationError(f"{path}: unsupported matrix version {payload.get('version')!r}")
    vocabulary = list(payload["vocabulary"])
    if len(vocabulary) != payload["n_words"]:
        raise ValidationError(f"{path}: vocabulary size disagrees with n_words")
    matrix = DocTermMatrix(
        n_words=int(payload["n_words"]),
        rows=tuple(tuple(int(w) for w in r) for r in payload["rows"]),
        doc_ids=tuple(payload["doc_ids"]),
    )
    return matrix, vocabulary, tuple(payload.get("dropped_empty_ids", ()))
