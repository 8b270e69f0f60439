"""Generate the bundled 500-question mini corpus and its lexicon.

The corpus is synthetic but structured: 465 in-scope questions draw their
content words from 20 disjoint theme pools (so a 20-topic model has real
structure to find), each theme leans on one or two signature ingredients,
and the remaining 35 questions exercise every drop path — off-subcategory
rows, questions with no ingredient mention, and questions whose text
vanishes entirely after masking and stopword/length filtering.

The lexicon ships 38 retained ingredients plus deliberately doomed
entries: five below the question-count threshold (Damiana sits exactly on
the boundary at 5) and three that survive the count rule but sit on the
exclusion lists.

The script is deterministic and self-verifying: after writing the files it
replays ingest/match/clean/preprocess with the real package code and
asserts every planted count and drop. Run from the repository root:

    python3 scripts/make_mini_corpus.py
"""

from __future__ import annotations

import csv
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from supptopics.corpus import filter_subcategory, load_corpus
from supptopics.lexicon import (
    clean_lexicon,
    load_lexicon,
    match_ingredients,
    name_tokens,
)
from supptopics.preprocess import (
    build_streams,
    build_vocabulary,
    load_stopwords,
    normalize,
    tokenize,
    vectorize,
)

OUT_CORPUS = ROOT / "fixtures" / "mini_corpus.csv"
OUT_LEXICON = ROOT / "fixtures" / "mini_lexicon.txt"
OUT_THEMES = ROOT / "fixtures" / "mini_themes.csv"

SUBCATEGORY = "Alternative Medicine"
SUBCATEGORY_CASES = (
    "Alternative Medicine", "alternative medicine",
    "ALTERNATIVE MEDICINE", "Alternative medicine",
)
OTHER_SUBCATEGORIES = ("General Health Care", "Mental Health", "Nutrition", "Fitness")

# (theme, group, category, 12 content words, signature ingredients)
THEMES = (
    ("sleep", "Sleep disorder", "Sleeping",
     "sleep insomnia bedtime night rest dream wake drowsy nap restless snore pillow",
     ("Melatonin", "Valerian")),
    ("digestion", "Uses & adverse effects", "Gastrointestinal disorders",
     "digestion bloating constipation diarrhea stomach nausea bowel gut queasy reflux indigestion heartburn",
     ("Ginger", "Peppermint")),
    ("anxiety", "Uses & adverse effects", "Psychiatric disorders",
     "anxiety depression stress panic mood worry tension nervous fear overwhelmed calm unease",
     ("Ashwagandha", "Chamomile")),
    ("skin", "Uses & adverse effects", "Skin & subcutaneous tissue disorders",
     "skin acne rash eczema itching dryness wrinkle complexion breakout scar pimple sunburn",
     ("Vitamin E", "Apple Cider Vinegar")),
    ("weight", "Healthy lifestyle", "Weight control",
     "weight diet calorie metabolism appetite obesity slim craving pound portion snack hunger",
     ("Acai", "Green Tea")),
    ("pregnancy", "Uses & adverse effects", "Pregnancy & perinatal conditions",
     "pregnancy pregnant trimester prenatal fetus birth nursing breastfeeding conception miscarriage midwife postpartum",
     ("Folic Acid", "Iron")),
    ("infection", "Uses & adverse effects", "Infections & infestations",
     "infection cold flu virus bacteria fever cough throat antibiotic germ contagious sniffle",
     ("Echinacea", "Vitamin C")),
    ("heart", "Uses & adverse effects", "Cardio-vascular & blood disorders",
     "heart cholesterol pressure circulation artery palpitation pulse cardiovascular clot vein hypertension triglyceride",
     ("Fish Oil", "Garlic")),
    ("diabetes", "Uses & adverse effects", "Endocrine disorders",
     "diabetes insulin sugar glucose thyroid hormone pancreas prediabetes glycemic metabolic endocrine spike",
     ("Cinnamon", "Iodine")),
    ("pain", "Uses & adverse effects", "Musculoskeletal disorders",
     "pain joint arthritis muscle inflammation ache stiffness spasm tendon cartilage swelling backache",
     ("Turmeric", "Glucosamine")),
    ("memory", "Mind and body", "Memory & concentration",
     "memory focus concentration brain cognitive recall attention clarity forgetful alert sharp mental",
     ("Ginkgo", "Ginseng")),
    ("energy", "Health benefits", "General health benefits",
     "energy fatigue tired vitality stamina endurance exhaustion sluggish vigor weary peppy zest",
     ("Vitamin B12", "CoQ10")),
    ("hair", "Uses & adverse effects", "Hair & nail conditions",
     "hair nail growth thinning brittle shedding scalp baldness strand regrowth split dandruff",
     ("Biotin", "Zinc")),
    ("immune", "Health benefits", "Immune support",
     "immune immunity defense resistance antioxidant protection resilience seasonal winter shield pathogen invader",
     ("Elderberry", "Honey")),
    ("dosage", "Product-related", "Dose, dose form & preparation",
     "dosage dose capsule tablet powder liquid serving milligram gummy softgel chewable timing",
     ("Magnesium", "Calcium")),
    ("brand", "Product-related", "Brand & quality",
     "brand quality organic certified label counterfeit reputable tested authentic additive purity manufacturer",
     ("Cranberry", "Copper")),
    ("interaction", "Interventions", "Drug interactions",
     "interaction medication prescription warfarin surgery anesthesia contraindication pharmacist combine mixing blood drug",
     ("St John's Wort", "Lavender")),
    ("exercise", "Healthy lifestyle", "Exercise & fitness",
     "exercise workout gym training recovery protein performance strength cardio flexibility treadmill repetition",
     ("Probiotics", "Vitamin D")),
    ("allergy", "Uses & adverse effects", "Respiratory & sinus disorders",
     "allergy sneeze pollen sinus congestion asthma breathing histamine nasal wheeze springtime stuffy",
     ("Quercetin",)),
    ("teeth", "Uses & adverse effects", "Dental & gingival conditions",
     "teeth tooth gum dental cavity enamel halitosis mouth toothache plaque dentist oral",
     ("Clove",)),
)

FILLERS = (
    "advice recommendation routine natural remedy effective experience "
    "benefit result research suggestion opinion"
).split()

# entries matched by too few questions (planted counts; 5 sits on the boundary)
RARE = (("Damiana", 5), ("Kava", 4), ("Feverfew", 3), ("Goldenseal", 2), ("Horsetail", 1))
# entries that beat the count rule but sit on an exclusion list
EXCLUDED = (
    ("Coffee", 8, "everyday_food_drink"),
    ("Bone", 7, "body_parts"),
    ("Cannabis", 7, "recreational_drugs"),
)

N_TOTAL = 500
N_OFF_SUBCATEGORY = 20
N_ZERO_MATCH = 12
EMPTY_AFTER_IDS = (123, 277, 401)  # zero-based row numbers
MENTION_FLOOR = 8  # every retained ingredient must clear the >5 rule with margin

# Sentence slots for the 465 in-scope questions. Every option contributes at
# most ONE content-bearing token after stopword/length filtering, and each
# slot is drawn independently per question, so the theme pools stay the only
# positively correlated word groups a topic model can find. Fixed multi-word
# templates would plant carrier-word cliques stronger than the themes.
TITLE_OPENERS = ("Does", "Can", "Will", "Should", "Could", "Would", "Might", "Must")
TITLE_VERBS = (
    "help with", "work for", "do anything for", "ease",
    "improve", "fix", "suit", "handle",
)
BODY_VERBS = (
    "has been dealing with", "gets", "has been struggling with",
    "complains about", "grumbles about", "has been battling",
    "asks about", "fights",
)
DURATIONS = (
    "for weeks", "for months", "for days", "lately",
    "recently", "all year", "on and off", "for ages",
)
ASKS = (
    "Any", "Looking for", "Hoping for", "Would love",
    "Open to", "After any", "Seeking", "Chasing",
)
WHO = ("mom", "dad", "sister", "brother", "friend", "neighbor", "roommate", "coworker")

# Dropped before preprocessing (no retained match / other subcategory), so
# their wording never reaches the vocabulary and may repeat freely.
ZERO_MATCH_TITLES = (
    "Why do I keep getting {w1} every single week?",
    "What usually causes {w1} and {w2} together?",
)
ZERO_MATCH_BODY = (
    "No pills or products yet, just trying to understand the {w3} first."
    " The {w4} started recently and the {w5} comes and goes. General {f1}"
    " appreciated."
)
# Stopword-only glue around planted mentions, for the same reason.
EXTRA_MENTION = " What about {ing} for this too?"
RARE_MENTION = " What about {ing} too?"


def commons() -> list[str]:
    names: list[str] = []
    for _, _, _, _, sig in THEMES:
        names.extend(sig)
    return names


def case_variant(name: str, i: int) -> str:
    if i % 7 == 3:
        return name.lower()
    if i % 7 == 5:
        return name.upper()
    return name


def build_rows() -> tuple[list[dict], list[tuple[str, str]], dict[str, set[int]]]:
    rng = random.Random(20260819)
    rows: list[dict] = []
    theme_of: list[tuple[str, str]] = []  # (question id, theme) for normal docs
    mentions: dict[str, set[int]] = {}  # ingredient -> set of row indices
    all_commons = commons()

    def mention(name: str, row_index: int) -> None:
        mentions.setdefault(name, set()).add(row_index)

    normal_i = 0
    zero_i = 0
    for i in range(N_TOTAL):
        qid = f"q{i + 1:04d}"
        if i in EMPTY_AFTER_IDS:
            ing = all_commons[i % len(all_commons)]
            rows.append({
                "id": qid,
                "subcategory": SUBCATEGORY_CASES[i % len(SUBCATEGORY_CASES)],
                "title": f"{ing}?",
                "body": "Is it for me or not?",
            })
            mention(ing, i)
            continue
        if i % 25 == 24:
            # off-subcategory filler; content is irrelevant after ingest
            theme, _, _, words, sig = THEMES[i % len(THEMES)]
            pool = words.split()
            w = rng.sample(pool, 3)
            rows.append({
                "id": qid,
                "subcategory": OTHER_SUBCATEGORIES[i % len(OTHER_SUBCATEGORIES)],
                "title": f"Is {sig[0]} fine for {w[0]}?",
                "body": f"Asking for general {w[1]} and {w[2]} reasons.",
            })
            continue
        if i % 40 == 7 and zero_i < N_ZERO_MATCH:
            zero_i += 1
            theme, _, _, words, _ = THEMES[i % len(THEMES)]
            pool = words.split()
            w = rng.sample(pool, 5)
            f1 = rng.choice(FILLERS)
            title = ZERO_MATCH_TITLES[i % len(ZERO_MATCH_TITLES)].format(w1=w[0], w2=w[1])
            body = ZERO_MATCH_BODY.format(w3=w[2], w4=w[3], w5=w[4], f1=f1)
            rows.append({
                "id": qid,
                "subcategory": SUBCATEGORY_CASES[i % len(SUBCATEGORY_CASES)],
                "title": title,
                "body": body,
            })
            continue

        theme, _, _, words, sig = THEMES[normal_i % len(THEMES)]
        pool = words.split()
        w = rng.sample(pool, 10)
        f1, f2 = rng.sample(FILLERS, 2)
        ing = sig[normal_i % len(sig)]
        title = (
            f"{rng.choice(TITLE_OPENERS)} {case_variant(ing, i)} "
            f"{rng.choice(TITLE_VERBS)} {w[0]} and {w[1]}?"
        )
        body = (
            f"My {rng.choice(WHO)} {rng.choice(BODY_VERBS)} {w[2]}, {w[3]} and "
            f"{w[4]} {rng.choice(DURATIONS)}. {rng.choice(ASKS)} {f1} or {f2} "
            f"about {w[5]}, {w[6]} and {w[7]}. Also {w[8]} and {w[9]}."
        )
        if i % 9 == 2:
            body += " More at https://example.com/forum"
        mention(ing, i)
        if rng.random() < 0.40:
            extra = rng.choice(all_commons)
            body += EXTRA_MENTION.format(ing=case_variant(extra, i + 1))
            mention(extra, i)
        rows.append({
            "id": qid,
            "subcategory": SUBCATEGORY_CASES[i % len(SUBCATEGORY_CASES)],
            "title": title,
            "body": body,
        })
        theme_of.append((qid, theme))
        normal_i += 1

    in_scope_normals = [
        idx for idx, row in enumerate(rows)
        if row["subcategory"].casefold() == SUBCATEGORY.casefold()
        and idx not in EMPTY_AFTER_IDS and row["id"] in {q for q, _ in theme_of}
    ]

    # top up any retained ingredient below the mention floor, deterministically
    cursor = 0
    for name in all_commons:
        have = {idx for idx in mentions.get(name, set()) if idx in set(in_scope_normals)}
        while len(have) < MENTION_FLOOR:
            idx = in_scope_normals[cursor % len(in_scope_normals)]
            cursor += 1
            if idx in mentions.get(name, set()):
                continue
            rows[idx]["body"] += EXTRA_MENTION.format(ing=name)
            mention(name, idx)
            have.add(idx)

    # plant the rare and excluded names in exact numbers of in-scope questions
    slots = iter(in_scope_normals)
    used: set[int] = set()

    def next_slots(k: int) -> list[int]:
        out = []
        while len(out) < k:
            idx = next(slots)
            if idx not in used:
                used.add(idx)
                out.append(idx)
        return out

    for name, count in RARE:
        for idx in next_slots(count):
            rows[idx]["body"] += RARE_MENTION.format(ing=name)
            mention(name, idx)
    for name, count, _section in EXCLUDED:
        for idx in next_slots(count):
            rows[idx]["body"] += RARE_MENTION.format(ing=name)
            mention(name, idx)

    return rows, theme_of, mentions


def write_lexicon() -> None:
    lines = ["# Mini ingredient lexicon for the bundled example corpus.", "[preferred]"]
    lines.extend(commons())
    lines.extend(name for name, _ in RARE)
    lines.extend(name for name, _, _ in EXCLUDED)
    for section in ("everyday_food_drink", "body_parts", "recreational_drugs"):
        lines.append(f"[exclude.{section}]")
        lines.extend(
            name.lower() for name, _, sec in EXCLUDED if sec == section
        )
    OUT_LEXICON.write_text("\n".join(lines) + "\n", encoding="utf-8")


def check_pools() -> None:
    stops = load_stopwords()
    lexicon_tokens = set()
    for name in [*commons(), *(n for n, _ in RARE), *(n for n, _, _ in EXCLUDED)]:
        lexicon_tokens.update(name_tokens(name))
    seen: dict[str, str] = {}
    for theme, _, _, words, _ in THEMES:
        pool = words.split()
        assert len(pool) == 12, (theme, len(pool))
        for word in pool:
            assert len(word) >= 3 and word.isalnum(), (theme, word)
            assert word not in stops, (theme, word, "stopword")
            assert word not in lexicon_tokens, (theme, word, "lexicon collision")
            norm = normalize(word)
            owner = seen.setdefault(norm, theme)
            assert owner == theme, (word, norm, owner, theme)
    for word in FILLERS:
        assert word not in stops and len(word) >= 3 and word not in lexicon_tokens, word
        assert normalize(word) not in seen, (word, "filler collides with a theme pool")
    filler_norms = {normalize(w) for w in FILLERS}
    for slot in (TITLE_OPENERS, TITLE_VERBS, BODY_VERBS, DURATIONS, ASKS, WHO):
        for option in slot:
            content = [normalize(t) for t in tokenize(option) if t not in stops]
            assert len(content) <= 1, (option, content, "slot option plants a clique")
            for norm in content:
                assert norm not in seen, (option, norm, "slot word in a theme pool")
                assert norm not in filler_norms, (option, norm, "slot word is a filler")
                assert norm not in lexicon_tokens, (option, norm, "lexicon collision")


def verify(rows: list[dict], theme_of: list[tuple[str, str]], mentions: dict[str, set[int]]) -> None:
    corpus = load_corpus(OUT_CORPUS, "delimited")
    assert len(corpus) == N_TOTAL
    kept = filter_subcategory(corpus, SUBCATEGORY)
    assert len(kept) == N_TOTAL - N_OFF_SUBCATEGORY, len(kept)

    lexicon = load_lexicon(OUT_LEXICON)
    matched = match_ingredients(kept, lexicon)
    counts = matched.ingredient_question_counts()
    for name, want in RARE:
        assert counts.get(name, 0) == want, (name, counts.get(name), want)
    for name, want, _ in EXCLUDED:
        assert counts.get(name, 0) == want, (name, counts.get(name), want)
    for name in commons():
        assert counts.get(name, 0) >= MENTION_FLOOR, (name, counts.get(name))

    reduced, cleaned = clean_lexicon(matched, lexicon)
    assert set(reduced.preferred_names) == set(commons())
    zero_ids = {
        row["id"] for i, row in enumerate(rows)
        if row["subcategory"].casefold() == SUBCATEGORY.casefold()
        and row["id"] not in {e.question_id for e in matched}
    }
    assert len(zero_ids) == N_ZERO_MATCH, len(zero_ids)
    assert len(cleaned) == len(kept) - N_ZERO_MATCH, len(cleaned)

    empty_ids = {rows[i]["id"] for i in EMPTY_AFTER_IDS}
    for i in EMPTY_AFTER_IDS:
        masked_tokens = tokenize(rows[i]["body"])
        assert masked_tokens == [], (rows[i]["id"], masked_tokens)

    streams = build_streams(kept, cleaned)
    vocabulary, filtered = build_vocabulary(streams, 5, 0.85)
    matrix, dropped = vectorize(filtered, vocabulary)
    assert set(dropped) == empty_ids, (dropped, empty_ids)
    assert matrix.n_docs == len(cleaned) - len(EMPTY_AFTER_IDS), matrix.n_docs
    assert matrix.n_words >= 150, matrix.n_words

    vocab_set = set(vocabulary.words)
    for theme, _, _, words, _ in THEMES:
        present = sum(1 for w in words.split() if normalize(w) in vocab_set)
        assert present >= 8, (theme, present)

    # the vocabulary must hold theme words plus declared i.i.d. noise, nothing
    # else: a stray word means some template planted a correlated carrier
    stops = load_stopwords()
    allowed: set[str] = set()
    for _, _, _, words, _ in THEMES:
        allowed.update(normalize(w) for w in words.split())
    allowed.update(normalize(w) for w in FILLERS)
    for slot in (TITLE_OPENERS, TITLE_VERBS, BODY_VERBS, DURATIONS, ASKS, WHO):
        for option in slot:
            allowed.update(normalize(t) for t in tokenize(option) if t not in stops)
    # names dropped from the lexicon are no longer masked, so they revert to
    # ordinary words; planted in disjoint questions, they carry no correlation
    for name in [*(n for n, _ in RARE), *(n for n, _, _ in EXCLUDED)]:
        allowed.update(normalize(t) for t in name_tokens(name))
    stray = vocab_set - allowed
    assert not stray, sorted(stray)

    themes_seen = {t for _, t in theme_of}
    assert len(themes_seen) == len(THEMES)
    per_theme = {t: sum(1 for _, x in theme_of if x == t) for t in themes_seen}
    assert min(per_theme.values()) >= 20, per_theme

    print(
        f"verified: {len(kept)} in-scope, {len(cleaned)} matched, "
        f"{matrix.n_docs} x {matrix.n_words} matrix, "
        f"{len(reduced)} retained ingredients"
    )


def main() -> None:
    check_pools()
    rows, theme_of, mentions = build_rows()
    assert len(rows) == N_TOTAL
    OUT_CORPUS.parent.mkdir(parents=True, exist_ok=True)
    with OUT_CORPUS.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["id", "subcategory", "title", "body"], lineterminator="\n"
        )
        writer.writeheader()
        writer.writerows(rows)
    write_lexicon()
    with OUT_THEMES.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["question_id", "theme"])
        writer.writerows(theme_of)
    verify(rows, theme_of, mentions)
    print(f"wrote {OUT_CORPUS}, {OUT_LEXICON}, {OUT_THEMES}")


if __name__ == "__main__":
    main()
