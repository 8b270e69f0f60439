"""Turn matched questions into token streams, a vocabulary, and a term matrix.

The chain mirrors how the question text is prepared for topic modeling:
mask matched ingredient mentions out of each question, strip hyperlinks,
lowercase and split, drop stopwords and short tokens, reduce inflected
forms to a base form, then apply corpus-level frequency filters and
binarize into a sparse document-term matrix.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path

from .corpus import Corpus
from .dtm import DocTermMatrix
from .errors import MissingArtifactError, ValidationError
from .lexicon import MatchedCorpus

_URL_PATTERN = re.compile(r"(?<![A-Za-z0-9.])(?:https?://|www\.)\S*", re.IGNORECASE)
_WORD_PATTERN = re.compile(r"[^\W_]+")

_VOWELS = "aeiou"


# ---------------------------------------------------------------------------
# bundled word lists


def _read_bundled(name: str) -> str:
    return (resources.files("supptopics") / "data" / name).read_text("utf-8")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stopword list: one word per line, ``#`` comments allowed."""
    if path is None:
        text = _read_bundled("stopwords.txt")
    elif not Path(path).exists():
        raise MissingArtifactError(f"stopword file not found: {path}")
    else:
        text = Path(path).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def load_irregulars(path: str | Path | None = None) -> dict[str, str]:
    """Read the irregular-inflection table: ``surface base`` pairs, one per line.

    An entry whose base equals its surface form is a guard: the word is
    exempt from the suffix rules entirely.
    """
    if path is None:
        text = _read_bundled("irregular_inflections.txt")
    elif not Path(path).exists():
        raise MissingArtifactError(f"irregular-inflection file not found: {path}")
    else:
        text = Path(path).read_text("utf-8")
    table: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValidationError(f"malformed irregular-inflection line {lineno}: {raw!r}")
        surface, base = fields
        if surface in table:
            raise ValidationError(f"duplicate irregular form {surface!r} on line {lineno}")
        table[surface] = base
    return table


@lru_cache(maxsize=1)
def _default_stopwords() -> frozenset[str]:
    return load_stopwords()


@lru_cache(maxsize=1)
def _default_irregulars() -> dict[str, str]:
    return load_irregulars()


# ---------------------------------------------------------------------------
# masking


def mask_ingredients(text: str, spans: Iterable[object]) -> str:
    """Delete every matched span from the text, preserving everything else.

    Spans may be ``(start, end)`` pairs or any objects with ``start``/``end``
    attributes (for example :class:`~supptopics.lexicon.IngredientMatch`).
    """
    resolved = []
    for span in spans:
        if hasattr(span, "start"):
            start, end = span.start, span.end
        else:
            start, end = span  # type: ignore[misc]
        if not (0 <= start <= end <= len(text)):
            raise ValidationError(
                f"span ({start}, {end}) out of range for text of length {len(text)}"
            )
        resolved.append((start, end))
    resolved.sort()
    pieces = []
    cursor = 0
    for start, end in resolved:
        if start < cursor:
            raise ValidationError(f"overlapping spans at offset {start}")
        pieces.append(text[cursor:start])
        cursor = end
    pieces.append(text[cursor:])
    return "".join(pieces)


# ---------------------------------------------------------------------------
# inflection reduction

# The reducer is a two-part fixpoint: an irregulars table consulted first,
# then ordered suffix rules. Every rule keeps results at least 3 characters
# long, so tokens that survived the length filter stay valid.


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _measure(stem: str) -> int:
    """Count vowel-to-consonant transitions (the Porter ``m`` measure)."""
    flags = [_is_consonant(stem, i) for i in range(len(stem))]
    return sum(1 for i in range(1, len(flags)) if flags[i] and not flags[i - 1])


def _ends_cvc(stem: str) -> bool:
    n = len(stem)
    return (
        n >= 3
        and _is_consonant(stem, n - 3)
        and not _is_consonant(stem, n - 2)
        and _is_consonant(stem, n - 1)
        and stem[-1] not in "wxy"
    )


def _repair_stem(stem: str) -> str:
    """Restore a dropped final ``e`` (or undouble) after stripping -ed/-ing.

    English verbs whose base ends in a silent ``e`` lose it before -ed/-ing;
    each branch recognizes a stem shape that only such bases produce.
    Callers guarantee ``len(stem) >= 3``.
    """
    last, prev = stem[-1], stem[-2]
    if stem.endswith("at") and stem[-3] not in "eo":
        return stem + "e"
    if last == "l" and _is_consonant(stem, len(stem) - 2) and prev not in "lrw":
        return stem + "e"
    if last == "z" and prev != "z":
        return stem + "e"
    if last == "v" and prev != "v":
        return stem + "e"
    if last == "c" and prev != "c":
        return stem + "e"
    if last == "s" and prev != "s":
        # single trailing s only ever comes from an e-base (caus-ed,
        # confus-ed); bare -us verbs like "focus" live in the irregulars
        return stem + "e"
    if last == "g" and prev not in "gn":
        return stem + "e"
    if last == "u" and prev != "u":
        return stem + "e"
    if last == "r":
        if stem.endswith("ur") and stem[-3] not in "ou":
            return stem + "e"
        if stem.endswith("ir") and stem[-3] != "a":
            return stem + "e"
    if (
        last == prev
        and _is_consonant(stem, len(stem) - 1)
        and last not in "lsz"
        and len(stem) - 1 >= 3
    ):
        return stem[:-1]
    if _measure(stem) == 1 and _ends_cvc(stem):
        return stem + "e"
    return stem


def _strip_suffix(word: str) -> str | None:
    """Apply the first matching suffix rule, or return None if none apply."""
    # plural endings
    if word.endswith("ies") and len(word) >= 5:
        return word[:-3] + "y"
    if word.endswith("es"):
        stem = word[:-2]
        if len(stem) >= 3 and stem.endswith(("x", "ch", "sh", "ss", "zz", "o")):
            return stem
        # otherwise fall through to the plain -s rule
    if word.endswith("s") and not word.endswith(("ss", "us", "is")) and len(word) >= 4:
        return word[:-1]
    # verb endings
    if word.endswith("ied") and len(word) >= 5:
        return word[:-3] + "y"
    if word.endswith("ed") and not word.endswith("eed"):
        stem = word[:-2]
        if len(stem) >= 3 and _has_vowel(stem):
            return _repair_stem(stem)
    if word.endswith("ing") and not word.endswith("eing"):
        stem = word[:-3]
        if len(stem) >= 3 and _has_vowel(stem):
            return _repair_stem(stem)
    return None


def normalize(word: str, irregulars: Mapping[str, str] | None = None) -> str:
    """Reduce a plural noun or regularly inflected verb to its base form.

    Expects a lowercase alphanumeric word (possessives are already split
    off by tokenization). Idempotent by construction: irregular-table
    lookups and suffix rules are iterated until neither applies, and an
    identity entry in the table acts as a guard against the suffix rules.
    Never shortens a word below 3 characters.
    """
    table = _default_irregulars() if irregulars is None else irregulars
    current = word
    for _ in range(10):
        replacement = table.get(current)
        if replacement is not None:
            if replacement == current:
                return current
            current = replacement
            continue
        stepped = _strip_suffix(current)
        if stepped is None:
            return current
        current = stepped
    return current


# ---------------------------------------------------------------------------
# tokenization


def tokenize(
    text: str,
    stopwords: frozenset[str] | None = None,
    irregulars: Mapping[str, str] | None = None,
    min_word_len: int = 3,
) -> list[str]:
    """Tokenize masked question text into normalized words.

    Pipeline order: strip hyperlinks, lowercase, split on non-alphanumeric
    runs, drop stopwords, drop tokens shorter than ``min_word_len``
    characters (at least 3 — shorter tokens are never valid), normalize
    each survivor.
    """
    if min_word_len < 3:
        raise ValidationError("min_word_len must be at least 3")
    stops = _default_stopwords() if stopwords is None else stopwords
    table = _default_irregulars() if irregulars is None else irregulars
    stripped = _URL_PATTERN.sub(" ", text)
    words = _WORD_PATTERN.findall(stripped.lower())
    return [
        normalize(w, table)
        for w in words
        if w not in stops and len(w) >= min_word_len
    ]


@dataclass(frozen=True)
class TokenStream:
    """Ordered normalized tokens for one question."""

    question_id: str
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        for token in self.tokens:
            if len(token) < 3:
                raise ValidationError(f"token {token!r} shorter than 3 characters")
            if not token.isalnum():
                raise ValidationError(f"token {token!r} is not alphanumeric")

    def __len__(self) -> int:
        return len(self.tokens)


def build_streams(
    corpus: Corpus,
    matched: MatchedCorpus,
    stopwords: frozenset[str] | None = None,
    irregulars: Mapping[str, str] | None = None,
    min_word_len: int = 3,
) -> list[TokenStream]:
    """Mask and tokenize every matched question, in corpus-match order."""
    stops = _default_stopwords() if stopwords is None else stopwords
    table = _default_irregulars() if irregulars is None else irregulars
    streams = []
    for entry in matched.entries:
        question = corpus.get(entry.question_id)
        masked = mask_ingredients(question.text, entry.matches)
        streams.append(
            TokenStream(
                entry.question_id,
                tuple(tokenize(masked, stops, table, min_word_len)),
            )
        )
    return streams


# ---------------------------------------------------------------------------
# vocabulary and vectorization


@dataclass(frozen=True)
class Vocabulary:
    """Frequency-filtered word list with dense indices.

    ``words`` fixes the index order; ``counts`` are total corpus
    occurrences and ``doc_frequencies`` the number of documents containing
    each word, both aligned with ``words``.
    """

    words: tuple[str, ...]
    counts: tuple[int, ...]
    doc_frequencies: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.words:
            raise ValidationError("vocabulary is empty")
        if len(set(self.words)) != len(self.words):
            raise ValidationError("vocabulary contains duplicate words")
        if not (len(self.words) == len(self.counts) == len(self.doc_frequencies)):
            raise ValidationError("vocabulary field lengths differ")

    @cached_property
    def index(self) -> dict[str, int]:
        return {word: i for i, word in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index


def _as_fraction(value: object) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)  # type: ignore[arg-type]


def build_vocabulary(
    streams: Sequence[TokenStream],
    min_count: int = 5,
    max_doc_frac: object = 0.85,
) -> tuple[Vocabulary, list[TokenStream]]:
    """Apply the corpus-level frequency filters and re-filter the streams.

    Keeps words with total count >= ``min_count`` and document frequency
    <= floor(``max_doc_frac`` x number of streams). Word order: descending
    corpus count, ties alphabetical. Returns the vocabulary together with
    the streams reduced to vocabulary words.
    """
    if min_count < 1:
        raise ValidationError("min_count must be at least 1")
    frac = _as_fraction(max_doc_frac)
    if not 0 < frac <= 1:
        raise ValidationError("max_doc_frac must be in (0, 1]")

    counts: Counter[str] = Counter()
    doc_freqs: Counter[str] = Counter()
    for stream in streams:
        counts.update(stream.tokens)
        doc_freqs.update(set(stream.tokens))

    limit = math.floor(frac * len(streams))
    kept = sorted(
        (w for w in counts if counts[w] >= min_count and doc_freqs[w] <= limit),
        key=lambda w: (-counts[w], w),
    )
    if not kept:
        raise ValidationError("no words survive the frequency filters")

    vocabulary = Vocabulary(
        words=tuple(kept),
        counts=tuple(counts[w] for w in kept),
        doc_frequencies=tuple(doc_freqs[w] for w in kept),
    )
    keep = frozenset(kept)
    filtered = [
        TokenStream(s.question_id, tuple(t for t in s.tokens if t in keep)) for s in streams
    ]
    return vocabulary, filtered


def vectorize(
    streams: Sequence[TokenStream],
    vocabulary: Vocabulary,
) -> tuple[DocTermMatrix, tuple[str, ...]]:
    """Binarize streams into a sparse presence matrix.

    Documents with no vocabulary words are dropped; their ids are returned
    alongside the matrix in stream order.
    """
    index = vocabulary.index
    rows = []
    doc_ids = []
    dropped = []
    for stream in streams:
        try:
            present = {index[t] for t in stream.tokens}
        except KeyError as exc:
            raise ValidationError(f"token {exc.args[0]!r} not in vocabulary") from None
        if present:
            rows.append(tuple(sorted(present)))
            doc_ids.append(stream.question_id)
        else:
            dropped.append(stream.question_id)
    matrix = DocTermMatrix(
        n_words=len(vocabulary),
        rows=tuple(rows),
        doc_ids=tuple(doc_ids),
    )
    return matrix, tuple(dropped)


# ---------------------------------------------------------------------------
# summary


@dataclass(frozen=True)
class PreprocessSummary:
    """Flat accounting of one preprocessing run."""

    documents_in: int
    documents_out: int
    total_tokens: int
    unique_words: int
    dropped_ids: tuple[str, ...]

    def render(self) -> str:
        dropped = ", ".join(self.dropped_ids) if self.dropped_ids else "none"
        lines = [
            f"documents in: {self.documents_in}",
            f"documents out: {self.documents_out}",
            f"total tokens: {self.total_tokens}",
            f"unique words: {self.unique_words}",
            f"dropped empty documents: {dropped}",
        ]
        return "\n".join(lines) + "\n"


def summarize(
    documents_in: int,
    filtered_streams: Sequence[TokenStream],
    vocabulary: Vocabulary,
    dropped_ids: tuple[str, ...],
) -> PreprocessSummary:
    """Account for a run: totals are over the vocabulary-filtered streams."""
    return PreprocessSummary(
        documents_in=documents_in,
        documents_out=len(filtered_streams) - len(dropped_ids),
        total_tokens=sum(len(s.tokens) for s in filtered_streams),
        unique_words=len(vocabulary),
        dropped_ids=dropped_ids,
    )
