"""Question corpora: loading, filtering, serialization.

A corpus is an immutable, ordered collection of Q&A posts. Two on-disk
formats are supported: delimited text (CSV with header ``id,subcategory,
title,body``, RFC-4180 quoting) and record-per-line (one flat JSON object
with the same four keys per line). Corpora are safe to share across
threads once loaded.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingArtifactError, ValidationError
from .fileio import atomic_write_text

CORPUS_FORMATS = ("delimited", "record-per-line")


@dataclass(frozen=True)
class Question:
    """One Q&A post. ``body`` may be empty; ``id`` and ``title`` may not."""

    id: str
    title: str
    body: str
    subcategory: str

    @property
    def text(self) -> str:
        """Full text used downstream: title, a single space, then body."""
        return f"{self.title} {self.body}"


@dataclass(frozen=True)
class Corpus:
    """Ordered, duplicate-free collection of questions."""

    questions: tuple[Question, ...]
    source: str = ""
    _by_id: dict[str, Question] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_id: dict[str, Question] = {}
        for q in self.questions:
            if not q.id:
                raise ValidationError("question with empty id")
            if not q.title.strip():
                raise ValidationError(f"question {q.id!r} has an empty title")
            if q.id in by_id:
                raise ValidationError(f"duplicate question id {q.id!r}")
            by_id[q.id] = q
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.questions)

    def __iter__(self):
        return iter(self.questions)

    def __contains__(self, question_id: str) -> bool:
        return question_id in self._by_id

    def get(self, question_id: str) -> Question:
        try:
            return self._by_id[question_id]
        except KeyError:
            raise KeyError(f"no question with id {question_id!r}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(q.id for q in self.questions)


_REQUIRED_FIELDS = ("id", "subcategory", "title")


def _make_question(record: dict, where: str) -> Question:
    for key in _REQUIRED_FIELDS:
        value = record.get(key)
        if value is None or not str(value).strip():
            raise ValidationError(f"{where}: missing or empty field {key!r}")
    body = record.get("body")
    return Question(
        id=str(record["id"]),
        title=str(record["title"]),
        body="" if body is None else str(body),
        subcategory=str(record["subcategory"]),
    )


def _load_delimited(path: Path) -> list[Question]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = set(_REQUIRED_FIELDS) - set(reader.fieldnames)
        if missing:
            raise ValidationError(
                f"{path}: header is missing column(s) {sorted(missing)}"
            )
        questions = []
        for row in reader:
            if None in row:
                raise ValidationError(
                    f"{path}: line {reader.line_num}: more cells than header columns"
                )
            questions.append(_make_question(row, f"{path}: line {reader.line_num}"))
        return questions


def _load_record_per_line(path: Path) -> list[Question]:
    questions = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
            if not isinstance(record, dict):
                raise ValidationError(f"{path}: line {lineno}: record is not an object")
            questions.append(_make_question(record, f"{path}: line {lineno}"))
    return questions


def load_corpus(path: str | Path, format: str = "delimited") -> Corpus:
    """Load a corpus file in the declared format.

    Raises MissingArtifactError when the file does not exist, and
    ValidationError on parse failures (naming the line/record) and on
    duplicate ids (naming the id).
    """
    path = Path(path)
    if format not in CORPUS_FORMATS:
        raise ValidationError(f"unknown corpus format {format!r}")
    if not path.exists():
        raise MissingArtifactError(f"corpus file not found: {path}")
    loader = _load_delimited if format == "delimited" else _load_record_per_line
    return Corpus(questions=tuple(loader(path)), source=str(path))


def save_corpus(corpus: Corpus, path: str | Path, format: str = "record-per-line") -> None:
    """Write a corpus so that load_corpus round-trips it."""
    if format == "record-per-line":
        text = "".join(
            json.dumps(
                {"id": q.id, "subcategory": q.subcategory,
                 "title": q.title, "body": q.body},
                ensure_ascii=False,
            )
            + "\n"
            for q in corpus
        )
    elif format == "delimited":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["id", "subcategory", "title", "body"])
        for q in corpus:
            writer.writerow([q.id, q.subcategory, q.title, q.body])
        text = out.getvalue()
    else:
        raise ValidationError(f"unknown corpus format {format!r}")
    atomic_write_text(path, text)


def filter_subcategory(corpus: Corpus, name: str) -> Corpus:
    """Keep only questions whose subcategory equals ``name``, case-insensitively.

    Order is preserved; an empty result is valid.
    """
    wanted = name.casefold()
    kept = tuple(q for q in corpus if q.subcategory.casefold() == wanted)
    return Corpus(questions=kept, source=corpus.source)
