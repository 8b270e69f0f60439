"""Supplement-ingredient lexicon: loading, matching, cleaning.

Matching is exact preferred-name matching over whole token sequences
(case-insensitive); no synonyms, no fuzziness. Overlapping candidate
matches are resolved longest-first, then leftmost. Cleaning applies, in
order: the matched-question count threshold, then the three exclusion
lists (everyday food/drink, body parts, recreational drugs), and finally
drops questions left without any retained match.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus
from .errors import MissingArtifactError, ValidationError
from .fileio import atomic_write_text

EXCLUSION_SECTIONS = ("everyday_food_drink", "body_parts", "recreational_drugs")

_TOKEN_RE = re.compile(r"[^\W_]+")


def name_tokens(name: str) -> tuple[str, ...]:
    """Case-folded alphanumeric token sequence of a name."""
    return tuple(m.group(0).casefold() for m in _TOKEN_RE.finditer(name))


@dataclass(frozen=True)
class IngredientLexicon:
    """Preferred supplement names plus exclusion lists and count threshold."""

    preferred_names: tuple[str, ...]
    everyday_food_drink: frozenset[str] = frozenset()
    body_parts: frozenset[str] = frozenset()
    recreational_drugs: frozenset[str] = frozenset()
    min_questions: int = 5

    def __post_init__(self) -> None:
        seen: dict[str, str] = {}
        for name in self.preferred_names:
            if not name.strip():
                raise ValidationError("empty preferred name in lexicon")
            folded = name.casefold()
            if folded in seen:
                raise ValidationError(
                    f"duplicate preferred name after case-folding: {name!r} vs {seen[folded]!r}"
                )
            seen[folded] = name
        if self.min_questions < 0:
            raise ValidationError("min_questions must be >= 0")

    def exclusions(self, section: str) -> frozenset[str]:
        if section not in EXCLUSION_SECTIONS:
            raise ValidationError(f"unknown exclusion section {section!r}")
        return getattr(self, section)

    def __len__(self) -> int:
        return len(self.preferred_names)


@dataclass(frozen=True)
class IngredientMatch:
    """One matched mention: preferred name plus character span in the text."""

    name: str
    start: int
    end: int


@dataclass(frozen=True)
class MatchedQuestion:
    question_id: str
    matches: tuple[IngredientMatch, ...]

    @property
    def names(self) -> frozenset[str]:
        return frozenset(m.name for m in self.matches)


@dataclass(frozen=True)
class MatchedCorpus:
    """Per-question ingredient matches, in corpus order.

    Every listed question has at least one match; spans lie within the
    question text and never overlap within one question.
    """

    entries: tuple[MatchedQuestion, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def question_ids(self) -> tuple[str, ...]:
        return tuple(e.question_id for e in self.entries)

    def by_id(self) -> dict[str, MatchedQuestion]:
        return {e.question_id: e for e in self.entries}

    def ingredient_question_counts(self) -> dict[str, int]:
        """Distinct-question count per matched ingredient name."""
        counts: dict[str, int] = {}
        for entry in self.entries:
            for name in entry.names:
                counts[name] = counts.get(name, 0) + 1
        return counts


def load_lexicon(path: str | Path, min_questions: int = 5) -> IngredientLexicon:
    """Parse a sectioned lexicon file.

    Sections: ``[preferred]`` plus ``[exclude.<list>]`` for each of
    everyday_food_drink, body_parts, recreational_drugs. One name per
    line; ``#`` starts a comment.
    """
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"lexicon file not found: {path}")
    sections: dict[str, list[str]] = {"preferred": []}
    for sec in EXCLUSION_SECTIONS:
        sections[f"exclude.{sec}"] = []
    current: str | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in sections:
                raise ValidationError(f"{path}: line {lineno}: unknown section [{name}]")
            current = name
            continue
        if current is None:
            raise ValidationError(f"{path}: line {lineno}: entry before any section header")
        sections[current].append(line)
    return IngredientLexicon(
        preferred_names=tuple(sections["preferred"]),
        everyday_food_drink=frozenset(n.casefold() for n in sections["exclude.everyday_food_drink"]),
        body_parts=frozenset(n.casefold() for n in sections["exclude.body_parts"]),
        recreational_drugs=frozenset(n.casefold() for n in sections["exclude.recreational_drugs"]),
        min_questions=min_questions,
    )


def save_lexicon(lexicon: IngredientLexicon, path: str | Path) -> None:
    lines = ["[preferred]"]
    lines.extend(lexicon.preferred_names)
    for sec in EXCLUSION_SECTIONS:
        lines.append(f"[exclude.{sec}]")
        lines.extend(sorted(lexicon.exclusions(sec)))
    atomic_write_text(path, "\n".join(lines) + "\n")


def save_matched(matched: MatchedCorpus, path: str | Path) -> None:
    """Persist per-question matches as deterministic JSON."""
    payload = {
        "version": 1,
        "entries": [
            {
                "question_id": e.question_id,
                "matches": [
                    {"name": m.name, "start": m.start, "end": m.end}
                    for m in e.matches
                ],
            }
            for e in matched
        ],
    }
    atomic_write_text(
        path, json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"
    )


def load_matched(path: str | Path) -> MatchedCorpus:
    """Load a matched corpus written by save_matched."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"matched corpus not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"cannot parse matched corpus {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValidationError(f"{path}: matched corpus must be a JSON object")
    if payload.get("version") != 1:
        raise ValidationError(
            f"{path}: unsupported matched-corpus version {payload.get('version')!r}"
        )
    try:
        entries = tuple(
            MatchedQuestion(
                question_id=e["question_id"],
                matches=tuple(
                    IngredientMatch(name=m["name"], start=int(m["start"]), end=int(m["end"]))
                    for m in e["matches"]
                ),
            )
            for e in payload["entries"]
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: malformed matched corpus: {exc}") from exc
    return MatchedCorpus(entries=entries)


def _match_text(
    text: str,
    by_first_token: dict[str, list[tuple[tuple[str, ...], str]]],
) -> tuple[IngredientMatch, ...]:
    tokens = [(m.group(0).casefold(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
    candidates: list[tuple[int, int, str, int, int]] = []  # (-len, start_tok, name, start, end)
    for pos, (tok, start, _end) in enumerate(tokens):
        for seq, name in by_first_token.get(tok, ()):
            if pos + len(seq) > len(tokens):
                continue
            if all(tokens[pos + k][0] == seq[k] for k in range(len(seq))):
                candidates.append((-len(seq), pos, name, start, tokens[pos + len(seq) - 1][2]))
    # longest first, then leftmost, then name for full determinism
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    taken: list[tuple[int, int]] = []
    chosen: list[IngredientMatch] = []
    for _neg_len, _pos, name, start, end in candidates:
        if any(start < t_end and end > t_start for t_start, t_end in taken):
            continue
        taken.append((start, end))
        chosen.append(IngredientMatch(name=name, start=start, end=end))
    chosen.sort(key=lambda m: m.start)
    return tuple(chosen)


def match_ingredients(corpus: Corpus, lexicon: IngredientLexicon) -> MatchedCorpus:
    """Find whole-token occurrences of preferred names in each question.

    Multi-word names match as contiguous token sequences; longer names win
    over shorter overlapping ones. Questions with no match are omitted.
    The result is independent of lexicon file ordering.
    """
    by_first_token: dict[str, list[tuple[tuple[str, ...], str]]] = {}
    for name in sorted(lexicon.preferred_names):
        seq = name_tokens(name)
        if not seq:
            continue
        by_first_token.setdefault(seq[0], []).append((seq, name))
    entries = []
    for question in corpus:
        matches = _match_text(question.text, by_first_token)
        if matches:
            entries.append(MatchedQuestion(question_id=question.id, matches=matches))
    return MatchedCorpus(entries=tuple(entries))


def clean_lexicon(
    matched: MatchedCorpus, lexicon: IngredientLexicon
) -> tuple[IngredientLexicon, MatchedCorpus]:
    """Apply the four cleaning rules, then drop questions left matchless.

    Rule order: (1) drop ingredients matched by <= min_questions questions
    (strictly more than the threshold are retained); (2)-(4) drop names on
    the everyday food/drink, body parts, and recreational drugs lists.
    """
    counts = matched.ingredient_question_counts()
    retained = [n for n in lexicon.preferred_names if counts.get(n, 0) > lexicon.min_questions]
    for section in EXCLUSION_SECTIONS:
        excluded = lexicon.exclusions(section)
        retained = [n for n in retained if n.casefold() not in excluded]
    retained_set = frozenset(retained)
    entries = []
    for entry in matched:
        kept = tuple(m for m in entry.matches if m.name in retained_set)
        if kept:
            entries.append(MatchedQuestion(question_id=entry.question_id, matches=kept))
    reduced = IngredientLexicon(
        preferred_names=tuple(retained),
        everyday_food_drink=lexicon.everyday_food_drink,
        body_parts=lexicon.body_parts,
        recreational_drugs=lexicon.recreational_drugs,
        min_questions=lexicon.min_questions,
    )
    return reduced, MatchedCorpus(entries=tuple(entries))
