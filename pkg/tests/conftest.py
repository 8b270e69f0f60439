"""Shared fixtures: repo paths, synthetic corpora, and one mini-model train.

The mini-corpus pipeline artifacts are built once per session; model
training dominates suite runtime, so tests share the session model instead
of retraining.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from supptopics.cli import (
    DTM_ARTIFACT,
    MODEL_ARTIFACT,
    run_ingest,
    run_match,
    run_preprocess,
    run_train,
)
from supptopics.config import resolve_config, with_overrides
from supptopics.corex import load_model
from supptopics.dtm import DocTermMatrix, load_dtm

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

# verdict lines recorded by the acceptance tests, echoed after the run
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria", sep="-")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


def planted_matrix(
    seed: int,
    n_blocks: int = 3,
    words_per: int = 10,
    docs_per: int = 300,
    p_in: float = 0.8,
    p_out: float = 0.02,
) -> tuple[DocTermMatrix, list[int]]:
    """Block-structured corpus: doc d in block b has block-b words with
    probability p_in and other words with probability p_out. Returns the
    matrix plus each document's true block."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n_words = n_blocks * words_per
    rows, ids, labels = [], [], []
    for b in range(n_blocks):
        for d in range(docs_per):
            present = [w for w in range(n_words)
                       if rng.random() < (p_in if w // words_per == b else p_out)]
            if not present:
                present = [b * words_per]
            rows.append(tuple(present))
            ids.append(f"b{b}d{d}")
            labels.append(b)
    matrix = DocTermMatrix(n_words=n_words, rows=tuple(rows), doc_ids=tuple(ids))
    return matrix, labels


def brute_force_mi(matrix: DocTermMatrix, posterior: np.ndarray, word: int) -> float:
    """I(X_word; Y) from the enumerated empirical joint, four-cell loop."""
    joint = np.zeros((2, 2))
    for d, row in enumerate(matrix.rows):
        x = 1 if word in row else 0
        joint[x, 1] += posterior[d]
        joint[x, 0] += 1.0 - posterior[d]
    joint /= matrix.n_docs
    mi = 0.0
    for a in range(2):
        for b in range(2):
            if joint[a, b] > 0:
                mi += joint[a, b] * math.log(
                    joint[a, b] / (joint[a].sum() * joint[:, b].sum())
                )
    return mi


@pytest.fixture(scope="session")
def mini_config():
    """The bundled mini-corpus configuration with paths resolved."""
    return resolve_config(FIXTURES / "mini.conf")


@pytest.fixture(scope="session")
def mini_run(mini_config, tmp_path_factory):
    """Ingest/match/preprocess/train once; yields the artifact directory."""
    out = tmp_path_factory.mktemp("mini_run")
    cfg = with_overrides(mini_config, output_dir=str(out))
    run_ingest(cfg)
    run_match(cfg)
    run_preprocess(cfg)
    run_train(cfg)
    return out


@pytest.fixture(scope="session")
def mini_dtm(mini_run):
    matrix, vocabulary, dropped = load_dtm(mini_run / DTM_ARTIFACT)
    return matrix, vocabulary, dropped


@pytest.fixture(scope="session")
def mini_model(mini_run):
    return load_model(mini_run / MODEL_ARTIFACT)
