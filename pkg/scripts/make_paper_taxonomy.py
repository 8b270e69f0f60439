"""Generate the paper-shaped taxonomy fixture (200 topics, 38 categories, 12 groups).

Only a sample of the published mapping is public (Table 1 of the study:
15 selected topics with their categories and groups, plus the reported
cardinalities). This script embeds those rows verbatim and fills the
remaining topic indices deterministically so the fixture has the documented
shape: 38 categories across 12 groups, with the uses/adverse-effects group
holding 15 categories and exactly 50 of the 200 topics.

Run from the repository root:

    python3 scripts/make_paper_taxonomy.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from supptopics.taxonomy import Taxonomy, load_taxonomy, save_taxonomy

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "taxonomy_paper_shape.txt"

GROUPS = (
    "Uses & adverse effects",
    "Product-related",
    "Healthy lifestyle",
    "Information resources/scientific evidence",
    "Addiction",
    "Time of use qualifier",
    "Sleep disorder",
    "Interventions",
    "Adverse effect in general",
    "Health benefits",
    "Mind and body",
    "Population qualifier",
)

# (category, group, topic quota, pinned topic indices from the published table)
CATEGORIES = (
    ("Gastrointestinal disorders", GROUPS[0], 4, (65,)),
    ("Musculoskeletal disorders", GROUPS[0], 4, (93,)),
    ("Psychiatric Disorders", GROUPS[0], 4, (11,)),
    ("Respiratory, thoracic/ mediastinal disorders", GROUPS[0], 4, (1,)),
    ("Skin & subcutaneous tissue disorders", GROUPS[0], 3, (23,)),
    ("Cardio-vascular/blood & lymphatic system disorders", GROUPS[0], 4, (2,)),
    ("Endocrine disorders", GROUPS[0], 3, (68,)),
    ("Infections & infestations", GROUPS[0], 4, (31,)),
    ("Pregnancy, puerperium/ perinatal conditions", GROUPS[0], 3, (40,)),
    ("Dental & gingival conditions", GROUPS[0], 3, (124,)),
    ("Nervous system disorders", GROUPS[0], 3, ()),
    ("Renal & urinary disorders", GROUPS[0], 3, ()),
    ("Metabolism & nutrition disorders", GROUPS[0], 3, ()),
    ("Eye disorders", GROUPS[0], 2, ()),
    ("Immune system disorders", GROUPS[0], 3, ()),
    ("Dose/dose form/ preparation", GROUPS[1], 5, (43,)),
    ("Brand & manufacturer", GROUPS[1], 5, ()),
    ("Ingredient composition", GROUPS[1], 5, ()),
    ("Storage & shelf life", GROUPS[1], 5, ()),
    ("Price & purchase", GROUPS[1], 5, ()),
    ("Quality & contamination", GROUPS[1], 5, ()),
    ("Weight control", GROUPS[2], 5, (19,)),
    ("Diet & nutrition", GROUPS[2], 5, ()),
    ("Exercise & fitness", GROUPS[2], 5, ()),
    ("Energy & vitality", GROUPS[2], 5, ()),
    ("General wellness", GROUPS[2], 5, ()),
    ("Scientific evidence", GROUPS[3], 6, ()),
    ("Information sources", GROUPS[3], 6, ()),
    ("Smokables", GROUPS[4], 10, (21,)),
    ("Frequency/Time reference", GROUPS[5], 10, (9,)),
    ("Sleeping", GROUPS[6], 10, (50,)),
    ("Drug interactions", GROUPS[7], 6, ()),
    ("Medical procedures", GROUPS[7], 6, ()),
    ("General adverse effects", GROUPS[8], 10, ()),
    ("General health benefits", GROUPS[9], 10, ()),
    ("Memory & concentration", GROUPS[10], 6, ()),
    ("Mood & stress", GROUPS[10], 6, ()),
    ("Age & population", GROUPS[11], 9, ()),
)

N_TOPICS = 200


def build() -> Taxonomy:
    assigned: dict[int, str] = {}
    for category, _, _, pinned in CATEGORIES:
        for index in pinned:
            assigned[index] = category
    free = iter(i for i in range(N_TOPICS) if i not in assigned)
    for category, _, quota, pinned in CATEGORIES:
        for _ in range(quota - len(pinned)):
            assigned[next(free)] = category
    leftover = list(free)
    if leftover:
        raise SystemExit(f"quota mismatch: {len(leftover)} topics unassigned")
    return Taxonomy(
        n_topics=N_TOPICS,
        groups=GROUPS,
        categories=tuple((c, g) for c, g, _, _ in CATEGORIES),
        topics=tuple(sorted(assigned.items())),
    )


def main() -> None:
    taxonomy = build()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    save_taxonomy(taxonomy, OUT)
    reread = load_taxonomy(OUT, N_TOPICS)
    assert reread == taxonomy, "round-trip mismatch"
    assert reread.cardinality == (38, 12), reread.cardinality
    assert reread.lookup(65) == ("Gastrointestinal disorders", "Uses & adverse effects")
    uses = sum(1 for i, _ in reread.topics if reread.lookup(i)[1] == GROUPS[0])
    assert uses == 50, uses
    print(f"wrote {OUT} ({len(reread.topics)} topics, cardinality {reread.cardinality})")


if __name__ == "__main__":
    main()
