"""Human-assigned topic taxonomy: topics roll up to categories, then groups.

The taxonomy is configuration, not inference — assigning model topics to
named categories is editorial work done by people reading the topics. The
file format is sectioned UTF-8 text:

    [groups]
    Uses & adverse effects
    Product-related

    [categories]
    Gastrointestinal disorders = Uses & adverse effects

    [topics]
    65 = Gastrointestinal disorders

Blank lines and ``#`` comments are ignored. Topics not mentioned in the
file are permitted and report as "unassigned".
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import MissingArtifactError, ValidationError

UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class Taxonomy:
    """Validated topic → category → group mapping for an n_topics model."""

    n_topics: int
    groups: tuple[str, ...]
    categories: tuple[tuple[str, str], ...]  # (category, group) as declared
    topics: tuple[tuple[int, str], ...]  # (topic index, category), by index

    def __post_init__(self) -> None:
        if self.n_topics < 1:
            raise ValidationError("n_topics must be at least 1")
        if len(set(self.groups)) != len(self.groups):
            raise ValidationError("duplicate group declaration")
        group_set = set(self.groups)
        seen_categories = set()
        for category, group in self.categories:
            if category in seen_categories:
                raise ValidationError(f"category {category!r} declared twice")
            seen_categories.add(category)
            if group not in group_set:
                raise ValidationError(
                    f"category {category!r} references undeclared group {group!r}"
                )
        seen_topics = set()
        for index, category in self.topics:
            if index in seen_topics:
                raise ValidationError(f"duplicate topic index {index}")
            seen_topics.add(index)
            if not 0 <= index < self.n_topics:
                raise ValidationError(
                    f"topic index {index} out of range for {self.n_topics} topics"
                )
            if category not in seen_categories:
                raise ValidationError(
                    f"topic {index} references undeclared category {category!r}"
                )

    @cached_property
    def _category_group(self) -> dict[str, str]:
        return dict(self.categories)

    @cached_property
    def _topic_category(self) -> dict[int, str]:
        return dict(self.topics)

    @property
    def cardinality(self) -> tuple[int, int]:
        """(number of categories, number of groups) declared."""
        return len(self.categories), len(self.groups)

    def lookup(self, topic: int) -> tuple[str, str]:
        """(category, group) for a topic; unmapped topics are unassigned."""
        if not 0 <= topic < self.n_topics:
            raise ValidationError(
                f"topic index {topic} out of range for {self.n_topics} topics"
            )
        category = self._topic_category.get(topic)
        if category is None:
            return (UNASSIGNED, UNASSIGNED)
        return (category, self._category_group[category])


def load_taxonomy(path: str | Path, n_topics: int) -> Taxonomy:
    """Parse and validate a sectioned taxonomy file.

    Duplicate declarations are tolerated when identical and rejected when
    conflicting; a category naming two different groups and a topic index
    appearing twice are both errors.
    """
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"taxonomy file not found: {path}")

    groups: list[str] = []
    categories: dict[str, str] = {}
    topics: dict[int, str] = {}
    section = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("groups", "categories", "topics"):
                raise ValidationError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ValidationError(f"{path}:{lineno}: content before any section")
        if section == "groups":
            if line not in groups:
                groups.append(line)
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'name = value'")
        left, _, right = line.partition("=")
        left, right = left.strip(), right.strip()
        if not left or not right:
            raise ValidationError(f"{path}:{lineno}: expected 'name = value'")
        if section == "categories":
            if left in categories and categories[left] != right:
                raise ValidationError(
                    f"{path}:{lineno}: category {left!r} mapped to two groups"
                )
            categories[left] = right
        else:
            try:
                index = int(left)
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: topic index {left!r} is not an integer"
                ) from None
            if index in topics:
                raise ValidationError(
                    f"{path}:{lineno}: duplicate topic index {index}"
                )
            topics[index] = right

    return Taxonomy(
        n_topics=n_topics,
        groups=tuple(groups),
        categories=tuple(categories.items()),
        topics=tuple(sorted(topics.items())),
    )


def save_taxonomy(taxonomy: Taxonomy, path: str | Path) -> None:
    """Write a taxonomy in the sectioned format; load(save(t)) == t."""
    lines = ["[groups]"]
    lines.extend(taxonomy.groups)
    lines.append("")
    lines.append("[categories]")
    lines.extend(f"{category} = {group}" for category, group in taxonomy.categories)
    lines.append("")
    lines.append("[topics]")
    lines.extend(f"{index} = {category}" for index, category in taxonomy.topics)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def group_distribution(taxonomy: Taxonomy) -> list[tuple[str, int]]:
    """Distinct categories per group, most populous first, ties by name."""
    counts = Counter(group for _, group in taxonomy.categories)
    rows = [(group, counts.get(group, 0)) for group in taxonomy.groups]
    return sorted(rows, key=lambda row: (-row[1], row[0]))


def category_topic_counts(taxonomy: Taxonomy) -> list[tuple[str, int]]:
    """Mapped topics per category, most populous first, ties by name."""
    counts = Counter(category for _, category in taxonomy.topics)
    rows = [(category, counts.get(category, 0)) for category, _ in taxonomy.categories]
    return sorted(rows, key=lambda row: (-row[1], row[0]))
