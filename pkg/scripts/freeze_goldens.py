"""Train the bundled mini-corpus model and freeze its derived fixtures.

Produces, in order:

    fixtures/mini_taxonomy.txt   - topic labels for the 20-topic mini model
    fixtures/mini_judgments.csv  - correctness judgments for labeled topics
    fixtures/golden/             - expected pipeline report artifacts

Topic labels are derived mechanically instead of by a human annotator: a
topic is labeled with a theme when at least 6 of its top-10 words come from
that theme's word pool and no other theme ties it; ambiguous topics stay
unassigned. A judged question is correct when its true theme (recorded in
fixtures/mini_themes.csv at generation time) matches its topic's label.

Run from the repository root after any change to the corpus generator, the
preprocessing rules, or the model:

    python3 scripts/freeze_goldens.py
"""

from __future__ import annotations

import csv
import shutil
import sys
import tempfile
from collections import Counter
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "scripts"))

from make_mini_corpus import THEMES

from supptopics.cli import (
    ACCURACY_ARTIFACT,
    MODEL_ARTIFACT,
    REPORT_DIR,
    run_ingest,
    run_match,
    run_pipeline,
    run_preprocess,
    run_train,
)
from supptopics.config import resolve_config, with_overrides
from supptopics.corex import load_model, top_documents, top_words
from supptopics.preprocess import normalize
from supptopics.taxonomy import Taxonomy, save_taxonomy

CONF = ROOT / "fixtures" / "mini.conf"
OUT_TAXONOMY = ROOT / "fixtures" / "mini_taxonomy.txt"
OUT_JUDGMENTS = ROOT / "fixtures" / "mini_judgments.csv"
GOLDEN_DIR = ROOT / "fixtures" / "golden"

LABEL_VOTES = 6  # top-10 words from one pool needed to label a topic


def label_topics(model) -> dict[int, str]:
    pool_of: dict[str, str] = {}
    for theme, _, _, words, _ in THEMES:
        for word in words.split():
            pool_of[normalize(word)] = theme
    labels: dict[int, str] = {}
    for topic in range(model.n_topics):
        votes = Counter(
            pool_of.get(word) for word, _ in top_words(model, topic, 10)
        )
        votes.pop(None, None)
        if not votes:
            continue
        best, count = votes.most_common(1)[0]
        tied = sum(1 for c in votes.values() if c == count)
        if count >= LABEL_VOTES and tied == 1:
            labels[topic] = best
    return labels


def build_taxonomy(n_topics: int, labels: dict[int, str]) -> Taxonomy:
    groups: list[str] = []
    categories: list[tuple[str, str]] = []
    category_of: dict[str, str] = {}
    for theme, group, category, _, _ in THEMES:
        if group not in groups:
            groups.append(group)
        categories.append((category, group))
        category_of[theme] = category
    topics = tuple(
        (topic, category_of[theme]) for topic, theme in sorted(labels.items())
    )
    return Taxonomy(
        n_topics=n_topics,
        groups=tuple(groups),
        categories=tuple(categories),
        topics=topics,
    )


def write_judgments(model, labels: dict[int, str]) -> int:
    truth: dict[str, str] = {}
    with (ROOT / "fixtures" / "mini_themes.csv").open(encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            truth[row["question_id"]] = row["theme"]
    lines = [
        "# Correctness judgments for the labeled topics of the mini model.",
        "# topic_index,question_id,correct",
    ]
    for topic, theme in sorted(labels.items()):
        for question_id, _ in top_documents(model, topic, 10):
            if question_id not in truth:
                raise AssertionError(f"{question_id} has no recorded theme")
            correct = 1 if truth[question_id] == theme else 0
            lines.append(f"{topic},{question_id},{correct}")
    OUT_JUDGMENTS.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines) - 2


def main() -> None:
    base = resolve_config(CONF)

    with tempfile.TemporaryDirectory() as tmp:
        # phase 1: train on the mini corpus and derive the label fixtures
        cfg = with_overrides(base, output_dir=tmp, taxonomy=None, judgments=None)
        run_ingest(cfg)
        run_match(cfg)
        run_preprocess(cfg)
        run_train(cfg)
        model = load_model(Path(tmp) / MODEL_ARTIFACT)

        labels = label_topics(model)
        assert len(labels) >= 10, f"only {len(labels)} topics labeled: {labels}"
        taxonomy = build_taxonomy(model.n_topics, labels)
        save_taxonomy(taxonomy, OUT_TAXONOMY)
        judged = write_judgments(model, labels)
        print(
            f"labeled {len(labels)} of {model.n_topics} topics "
            f"({len(set(labels.values()))} themes), {judged} judgments"
        )

    with tempfile.TemporaryDirectory() as tmp:
        # phase 2: full pipeline with the new fixtures; freeze its reports
        cfg = with_overrides(base, output_dir=tmp)
        run_pipeline(cfg)
        if GOLDEN_DIR.exists():
            shutil.rmtree(GOLDEN_DIR)
        GOLDEN_DIR.mkdir(parents=True)
        for name in ("topics.csv", "top_questions.csv", "ingredients.csv"):
            shutil.copyfile(Path(tmp) / REPORT_DIR / name, GOLDEN_DIR / name)
        shutil.copyfile(Path(tmp) / ACCURACY_ARTIFACT, GOLDEN_DIR / ACCURACY_ARTIFACT)

    print(f"wrote {OUT_TAXONOMY}, {OUT_JUDGMENTS}, {GOLDEN_DIR}/")


if __name__ == "__main__":
    main()
