"""Report tables: topic summaries, ingredient distributions, accuracy records.

Everything here is a pure, deterministic function of (model, taxonomy,
matched corpus, assignments, judgments). Coherence judging is human work,
so judgments arrive as a first-class input file — lines of
``topic_index, question_id, correct(0|1)`` — and are never computed.

Percentages round half-to-even at two decimals; the rule was fixed by
checking every published distribution value against candidate rules (the
value 37/160 = 23.125 rendered as 23.12 rules out half-up).
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .corex import TopicModel, assign_documents, top_documents, top_words
from .errors import MissingArtifactError, ValidationError
from .lexicon import MatchedCorpus
from .taxonomy import Taxonomy

MAX_KEYWORDS = 15
MAX_QUESTIONS = 10


def percentage(count: int, total: int) -> Decimal:
    """100 * count / total as an exact two-decimal value (half-even ties)."""
    if total < 1:
        raise ValidationError("total must be at least 1")
    if not 0 <= count <= total:
        raise ValidationError(f"count {count} outside [0, {total}]")
    units, rem = divmod(10000 * count, total)
    if 2 * rem > total or (2 * rem == total and units % 2 == 1):
        units += 1
    return Decimal(units).scaleb(-2)


@dataclass(frozen=True)
class IngredientShare:
    """One distribution row: questions mentioning the ingredient in a topic."""

    name: str
    count: int
    total: int
    below_threshold: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.count <= self.total:
            raise ValidationError(
                f"ingredient count {self.count} outside [1, {self.total}]"
            )

    @property
    def pct(self) -> Decimal:
        return percentage(self.count, self.total)


@dataclass(frozen=True)
class TopicReportRow:
    """One topic's report: naming, keywords, top questions, ingredients."""

    topic: int
    category: str
    group: str
    keywords: tuple[str, ...]
    questions: tuple[tuple[str, float], ...]  # (question id, probability)
    ingredients: tuple[IngredientShare, ...]

    def __post_init__(self) -> None:
        if len(self.keywords) > MAX_KEYWORDS:
            raise ValidationError(f"more than {MAX_KEYWORDS} keywords")
        if len(self.questions) > MAX_QUESTIONS:
            raise ValidationError(f"more than {MAX_QUESTIONS} questions")
        for share in self.ingredients:
            if not 0 <= share.pct <= 100:
                raise ValidationError("ingredient percentage outside [0, 100]")


@dataclass(frozen=True)
class Judgment:
    """One human coherence judgment for a (topic, question) pair."""

    topic: int
    question_id: str
    correct: bool


@dataclass(frozen=True)
class AccuracyRecord:
    """Per-topic accuracy over the judged top questions."""

    topic: int
    question_ids: tuple[str, ...]
    correct: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not self.question_ids:
            raise ValidationError("accuracy record needs at least one judgment")
        if len(self.question_ids) != len(self.correct):
            raise ValidationError("judgment ids and outcomes differ in length")

    @property
    def judged(self) -> int:
        return len(self.question_ids)

    @property
    def n_correct(self) -> int:
        return sum(self.correct)

    @property
    def accuracy(self) -> Decimal:
        return percentage(self.n_correct, self.judged)


def load_judgments(path: str | Path) -> tuple[Judgment, ...]:
    """Parse a judgment file: ``topic_index, question_id, correct(0|1)``."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"judgment file not found: {path}")
    judgments = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ValidationError(
                f"{path}:{lineno}: expected 'topic_index, question_id, correct'"
            )
        try:
            topic = int(parts[0])
        except ValueError:
            raise ValidationError(
                f"{path}:{lineno}: topic index {parts[0]!r} is not an integer"
            ) from None
        if parts[2] not in ("0", "1"):
            raise ValidationError(f"{path}:{lineno}: correct must be 0 or 1")
        if not parts[1]:
            raise ValidationError(f"{path}:{lineno}: empty question id")
        judgments.append(Judgment(topic, parts[1], parts[2] == "1"))
    return tuple(judgments)


def assignment_map(
    model: TopicModel, threshold: float = 0.5
) -> dict[str, frozenset[int]]:
    """Question id → set of topics assigned at the threshold."""
    return dict(zip(model.doc_ids, assign_documents(model, threshold)))


def ingredient_distribution(
    assignments: Mapping[str, frozenset[int]],
    matched: MatchedCorpus,
    topic: int,
    min_frac: float | Fraction = Fraction(1, 10),
) -> list[IngredientShare]:
    """Ingredient shares among the questions assigned to one topic.

    Reports every ingredient mentioned by at least ``min_frac`` of the
    topic's questions, most-mentioned first (ties alphabetical). When none
    reaches the threshold the single most-mentioned ingredient is still
    reported, flagged ``below_threshold``.
    """
    if not isinstance(min_frac, Fraction):
        min_frac = Fraction(str(min_frac))
    if not 0 <= min_frac <= 1:
        raise ValidationError("min_frac must be within [0, 1]")
    assigned = [qid for qid, topics in assignments.items() if topic in topics]
    if not assigned:
        raise ValidationError(f"topic {topic} has no assigned questions")
    by_id = matched.by_id()
    counts: Counter[str] = Counter()
    for qid in assigned:
        entry = by_id.get(qid)
        if entry is None:
            raise ValidationError(f"question {qid!r} missing from matched corpus")
        for name in entry.names:
            counts[name] += 1
    if not counts:
        return []
    total = len(assigned)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    shares = [
        IngredientShare(name, count, total)
        for name, count in ranked
        if Fraction(count, total) >= min_frac
    ]
    if not shares:
        name, count = ranked[0]
        shares = [IngredientShare(name, count, total, below_threshold=True)]
    return shares


def build_topic_report(
    model: TopicModel,
    taxonomy: Taxonomy,
    matched: MatchedCorpus,
    assignments: Mapping[str, frozenset[int]],
    topics: Sequence[int],
    *,
    top_k_words: int = MAX_KEYWORDS,
    top_k_docs: int = MAX_QUESTIONS,
    min_frac: float | Fraction = Fraction(1, 10),
) -> list[TopicReportRow]:
    """One report row per requested topic."""
    rows = []
    for topic in topics:
        category, group = taxonomy.lookup(topic)
        keywords = tuple(word for word, _ in top_words(model, topic, top_k_words))
        questions = tuple(top_documents(model, topic, top_k_docs))
        ingredients = tuple(
            ingredient_distribution(assignments, matched, topic, min_frac)
        )
        rows.append(
            TopicReportRow(topic, category, group, keywords, questions, ingredients)
        )
    return rows


def accuracy_report(
    judgments: Sequence[Judgment], model: TopicModel
) -> list[AccuracyRecord]:
    """Per-topic accuracy records, ascending by topic index.

    Every judged question must still be among its topic's top documents;
    a stale id is an error rather than a silently wrong accuracy.
    """
    by_topic: dict[int, list[Judgment]] = {}
    for judgment in judgments:
        by_topic.setdefault(judgment.topic, []).append(judgment)
    records = []
    for topic in sorted(by_topic):
        rows = by_topic[topic]
        current = {qid for qid, _ in top_documents(model, topic, MAX_QUESTIONS)}
        seen: set[str] = set()
        for judgment in rows:
            if judgment.question_id in seen:
                raise ValidationError(
                    f"question {judgment.question_id!r} judged twice for topic {topic}"
                )
            seen.add(judgment.question_id)
            if judgment.question_id not in current:
                raise ValidationError(
                    f"judged question {judgment.question_id!r} is not among "
                    f"topic {topic}'s top {MAX_QUESTIONS} documents"
                )
        records.append(
            AccuracyRecord(
                topic,
                tuple(j.question_id for j in rows),
                tuple(j.correct for j in rows),
            )
        )
    return records


# --- rendering ---------------------------------------------------------------
#
# CSV column orders are part of the artifact contract; keep them stable:
#   topics.csv:        topic,category,group,keywords   (keywords space-joined)
#   top_questions.csv: topic,rank,question_id,probability   (6 decimals)
#   ingredients.csv:   topic,ingredient,count,total,pct,below_threshold
#   accuracy.csv:      topic,judged,correct,accuracy


def _csv(header: list[str], rows: list[list[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def topic_table_csv(rows: Sequence[TopicReportRow]) -> str:
    return _csv(
        ["topic", "category", "group", "keywords"],
        [[str(r.topic), r.category, r.group, " ".join(r.keywords)] for r in rows],
    )


def question_table_csv(rows: Sequence[TopicReportRow]) -> str:
    body = []
    for r in rows:
        for rank, (qid, prob) in enumerate(r.questions, 1):
            body.append([str(r.topic), str(rank), qid, f"{prob:.6f}"])
    return _csv(["topic", "rank", "question_id", "probability"], body)


def ingredient_table_csv(rows: Sequence[TopicReportRow]) -> str:
    body = []
    for r in rows:
        for share in r.ingredients:
            body.append(
                [
                    str(r.topic),
                    share.name,
                    str(share.count),
                    str(share.total),
                    str(share.pct),
                    "1" if share.below_threshold else "0",
                ]
            )
    return _csv(
        ["topic", "ingredient", "count", "total", "pct", "below_threshold"], body
    )


def accuracy_table_csv(records: Sequence[AccuracyRecord]) -> str:
    return _csv(
        ["topic", "judged", "correct", "accuracy"],
        [
            [str(r.topic), str(r.judged), str(r.n_correct), str(r.accuracy)]
            for r in records
        ],
    )


def render_text(
    rows: Sequence[TopicReportRow], records: Sequence[AccuracyRecord] = ()
) -> str:
    """Single human-readable report covering all requested topics."""
    accuracy_by_topic = {r.topic: r for r in records}
    lines = []
    for r in rows:
        lines.append(f"Topic {r.topic} — {r.category} / {r.group}")
        lines.append(f"  keywords: {' '.join(r.keywords)}")
        lines.append("  top questions:")
        for rank, (qid, prob) in enumerate(r.questions, 1):
            lines.append(f"    {rank:2d}. {qid}  (p={prob:.4f})")
        lines.append("  ingredients:")
        for share in r.ingredients:
            flag = "  [below threshold]" if share.below_threshold else ""
            lines.append(
                f"    {share.name}: {share.count} of {share.total}"
                f" ({share.pct}%){flag}"
            )
        record = accuracy_by_topic.get(r.topic)
        if record is not None:
            lines.append(
                f"  accuracy: {record.n_correct} of {record.judged}"
                f" ({record.accuracy}%)"
            )
        lines.append("")
    for record in records:
        if not any(r.topic == record.topic for r in rows):
            lines.append(
                f"Topic {record.topic} accuracy: {record.n_correct} of "
                f"{record.judged} ({record.accuracy}%)"
            )
            lines.append("")
    return "\n".join(lines)
