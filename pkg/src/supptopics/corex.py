"""Correlation Explanation topic modeling over binary document-term data.

Trains ``n_topics`` latent binary variables to explain correlations among
word-presence indicators. The iterative scheme alternates a posterior step
(naive-Bayes factorization under soft word-topic weights), a marginal
re-estimation step with additive smoothing, and a damped competition update
that pulls each word toward its best-explaining topic. The objective is the
alpha-weighted sum of word-topic mutual informations; training stops when
it converges within ``tol``, the iteration budget runs out, or the
objective stops improving.

Randomness comes from numpy's PCG64. Document posterior initialization is
derived per document id via BLAKE2b, so reordering documents permutes
outputs without changing them. Because the alternating scheme has poor
fixed points (a topic whose posterior flattens can never recover), ``train``
runs a small number of deterministic restarts with derived seeds and keeps
the highest-objective result. Goldens are implementation-pinned;
cross-implementation comparisons should use the invariants instead.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections.abc import Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.special import expit, xlogy

from .dtm import DocTermMatrix
from .errors import MissingArtifactError, ValidationError

_MAGIC = b"SUPPTOPX"
_FORMAT_VERSION = 1

# fixed algorithm constants (deliberately not configuration: they shape the
# optimizer, not the model)
_ALPHA_DAMPING = 0.5
_BETA_START = 2.0
_BETA_STEP = 0.3
_BETA_MAX = 8.0
_INIT_POSTERIOR_SPREAD = 0.1
_INIT_ALPHA_SPREAD = 0.02
_N_RESTARTS = 6
_RESEED_WARMUP = 8
_RESEED_GRACE = 8
_MAX_RESEEDS = 3
_RESEED_TILT = 0.08
_RESEED_NOISE = 0.2

_DEGENERATE_TC = 1e-6


@dataclass(frozen=True)
class CorexConfig:
    """Training knobs. ``n_topics`` is the paper-facing model size."""

    n_topics: int
    max_iter: int = 200
    tol: float = 1e-5
    seed: int = 0
    smoothing: float = 0.001

    def __post_init__(self) -> None:
        if self.n_topics < 1:
            raise ValidationError("n_topics must be at least 1")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if not self.smoothing > 0:
            raise ValidationError("smoothing must be positive")


@dataclass(frozen=True, eq=False)
class TopicModel:
    """Trained topic model; arrays are read-only after construction.

    ``alpha`` and ``word_topic_mi`` are n_words x n_topics,
    ``doc_topic_prob`` is n_docs x n_topics with entries p(topic active |
    document), ``topic_tc`` holds per-topic total-correlation contributions
    sorted descending, and ``objective_trace`` the per-iteration objective.
    """

    config: CorexConfig
    vocabulary: tuple[str, ...]
    doc_ids: tuple[str, ...]
    alpha: np.ndarray
    word_topic_mi: np.ndarray
    doc_topic_prob: np.ndarray
    topic_tc: np.ndarray
    objective_trace: np.ndarray
    converged: bool

    def __post_init__(self) -> None:
        for array in (
            self.alpha,
            self.word_topic_mi,
            self.doc_topic_prob,
            self.topic_tc,
            self.objective_trace,
        ):
            array.setflags(write=False)

    @property
    def n_topics(self) -> int:
        return int(self.topic_tc.shape[0])

    @property
    def n_words(self) -> int:
        return int(self.word_topic_mi.shape[0])

    @property
    def n_docs(self) -> int:
        return int(self.doc_topic_prob.shape[0])

    def degenerate_topics(self) -> tuple[int, ...]:
        """Indices of retained topics whose TC contribution is negligible."""
        return tuple(int(j) for j in np.flatnonzero(self.topic_tc < _DEGENERATE_TC))

    def validate(self) -> None:
        """Check every type invariant; raise ValidationError on violation."""
        if self.alpha.shape != (self.n_words, self.n_topics):
            raise ValidationError("alpha shape disagrees with mi/tc shapes")
        if len(self.vocabulary) != self.n_words:
            raise ValidationError("vocabulary length disagrees with n_words")
        if len(self.doc_ids) != self.n_docs:
            raise ValidationError("doc_ids length disagrees with n_docs")
        for name, array in (("alpha", self.alpha), ("doc_topic_prob", self.doc_topic_prob)):
            if array.size and (array.min() < 0.0 or array.max() > 1.0):
                raise ValidationError(f"{name} has entries outside [0, 1]")
        if self.word_topic_mi.size and self.word_topic_mi.min() < -1e-9:
            raise ValidationError("word_topic_mi has entries below -1e-9")
        if self.topic_tc.min() < -1e-9:
            raise ValidationError("topic_tc has entries below -1e-9")
        if np.any(np.diff(self.topic_tc) > 1e-12):
            raise ValidationError("topics are not sorted by descending topic_tc")
        trace = self.objective_trace
        if trace.size == 0:
            raise ValidationError("objective_trace is empty")
        if np.any(np.diff(trace) < -self.config.tol):
            raise ValidationError("objective_trace decreases by more than tol")
        for name, array in (
            ("alpha", self.alpha),
            ("word_topic_mi", self.word_topic_mi),
            ("doc_topic_prob", self.doc_topic_prob),
            ("topic_tc", self.topic_tc),
            ("objective_trace", trace),
        ):
            if not np.all(np.isfinite(array)):
                raise ValidationError(f"{name} contains non-finite values")


@dataclass(frozen=True)
class SweepEntry:
    """Objective summary for one model size in a sweep."""

    n_topics: int
    total_tc: float
    topic_tcs: tuple[float, ...]

    @property
    def mean_tc(self) -> float:
        return self.total_tc / self.n_topics


# ---------------------------------------------------------------------------
# training


def _derive_seed(seed: int, label: str) -> int:
    digest = hashlib.blake2b(f"{seed}|{label}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _init_posteriors(doc_ids: Sequence[str], n_topics: int, seed: int) -> np.ndarray:
    """Per-document seeded posteriors around 1/2; breaks topic symmetry.

    Each document's draw depends only on (seed, doc id), never on row
    position, which is what makes document order a pure permutation.
    """
    q = np.empty((len(doc_ids), n_topics))
    for row, doc_id in enumerate(doc_ids):
        digest = hashlib.blake2b(
            f"{seed}:{doc_id}".encode("utf-8"), digest_size=8
        ).digest()
        rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
        q[row] = 0.5 + _INIT_POSTERIOR_SPREAD * (rng.random(n_topics) - 0.5)
    return q


def _posterior_stats(
    xt, doc_counts: np.ndarray, q: np.ndarray, n_docs: int, smoothing: float
):
    """Posterior-weighted sufficient statistics and scores for one sweep.

    Returns (mi, theta1, theta0, prior, cov): reported mutual information
    comes from the exact (unsmoothed) empirical joint of word presence and
    topic state, so it is a true KL divergence and non-negative; the
    smoothed conditionals and prior feed the next posterior step only, and
    ``cov`` carries the sign of each (word, topic) covariance — only
    positive pairs are eligible in the membership competition.
    """
    s = smoothing
    q1 = np.clip(q.sum(axis=0), 0.0, float(n_docs))  # (n_topics,)
    c1 = np.asarray(xt @ q)  # (n_words, n_topics)
    n = doc_counts[:, None].astype(float)  # (n_words, 1)
    low = np.maximum(0.0, n + q1[None, :] - n_docs)
    c1 = np.clip(c1, low, np.minimum(n, q1[None, :]))

    theta1 = (c1 + s) / (q1[None, :] + 2 * s)
    theta0 = ((n - c1) + s) / ((n_docs - q1)[None, :] + 2 * s)
    prior = (q1 + s) / (n_docs + 2 * s)
    cov = c1 * n_docs - n * q1[None, :]  # sign of cov(word, topic)

    total = float(n_docs)
    j11 = c1 / total
    j10 = (n - c1) / total
    j01 = (q1[None, :] - c1) / total
    j00 = (n_docs - n - q1[None, :] + c1) / total
    px1 = n / total
    py1 = (q1 / total)[None, :]
    mi = (
        xlogy(j11, j11) - xlogy(j11, px1 * py1)
        + xlogy(j10, j10) - xlogy(j10, px1 * (1.0 - py1))
        + xlogy(j01, j01) - xlogy(j01, (1.0 - px1) * py1)
        + xlogy(j00, j00) - xlogy(j00, (1.0 - px1) * (1.0 - py1))
    )
    return mi, theta1, theta0, prior, cov


def _posterior_step(x, alpha: np.ndarray, theta1, theta0, prior) -> np.ndarray:
    """p(y_j = 1 | document) for every document and topic, one sparse matmul.

    The absent-word baseline enters through the bias, so only present words
    contribute per-document terms.
    """
    log_t1 = np.log(theta1)
    log_t0 = np.log(theta0)
    log_t1c = np.log1p(-theta1)
    log_t0c = np.log1p(-theta0)
    weights = alpha * ((log_t1 - log_t0) - (log_t1c - log_t0c))
    bias = (
        np.log(prior)
        - np.log1p(-prior)
        + (alpha * (log_t1c - log_t0c)).sum(axis=0)
    )
    return expit(np.asarray(x @ weights) + bias[None, :])


def _alpha_step(
    alpha: np.ndarray, mi: np.ndarray, cov: np.ndarray, beta: float
) -> np.ndarray:
    """Damped competition: pull each word toward its best co-occurring topic.

    Only positive-covariance (word, topic) pairs compete — a topic that
    merely anti-predicts a word (sharing no documents with it) must not
    squat on it, or unclaimed structure could never be colonized by a
    newly forming topic. Targets are exp(beta * (score / best - 1)) in
    (0, 1], zero where no topic co-occurs with the word, so alpha stays in
    [0, 1]; beta anneals upward to sharpen the assignment over time. The
    targets are deliberately not normalized across topics: runner-up topics
    keep moderate membership, which is what lets a still-unformed topic
    accumulate enough evidence to latch onto unexplained structure.
    """
    score = np.where(cov > 0.0, mi, 0.0)
    best = score.max(axis=1, keepdims=True)
    ratio = np.divide(score, best, out=np.zeros_like(score), where=best > 1e-300)
    target = np.where(best > 1e-300, np.exp(beta * (ratio - 1.0)), 0.0)
    return (1.0 - _ALPHA_DAMPING) * alpha + _ALPHA_DAMPING * target


def _normalize_membership(alpha: np.ndarray) -> np.ndarray:
    """Per-word soft partition used for scoring (never for the dynamics).

    Dividing each row by its sum caps every word's total membership at one
    unit, so topics that lock onto the same words split the credit instead
    of double-counting it in the objective and the reported tc. The
    denominator is floored at one unit so that a word no topic claims
    contributes (almost) nothing, rather than having its residual
    memberships inflated into full credit.
    """
    return alpha / np.maximum(alpha.sum(axis=1, keepdims=True), 1.0)


def _canonical_orientation(q, theta1, theta0, prior, cov, mi) -> None:
    """Flip each topic, in place, so its top-MI word co-occurs with state 1.

    Applied every iteration: the positive-covariance gate in the
    membership competition is only meaningful relative to a stable
    orientation. Flipping swaps the conditionals, complements the prior
    and posterior, and negates the covariances; mutual information and the
    objective are symmetric under the flip. Topics whose top word has
    exactly zero covariance are left alone to avoid flip-flopping.
    """
    n_words, n_topics = mi.shape
    for j in range(n_topics):
        top = int(np.lexsort((np.arange(n_words), -mi[:, j]))[0])
        if cov[top, j] < 0.0:
            q[:, j] = 1.0 - q[:, j]
            column = theta1[:, j].copy()
            theta1[:, j] = theta0[:, j]
            theta0[:, j] = column
            prior[j] = 1.0 - prior[j]
            cov[:, j] = -cov[:, j]


def _train_once(x, xt, doc_counts, matrix, config, run_seed: int):
    """One optimization run from a seeded start; returns the final iterate.

    A topic whose posterior flattens is a fixed point the updates cannot
    leave (flat posterior means no conditional contrast, so the next
    posterior is flat again). Topics whose tc has collapsed are therefore
    re-seeded a bounded number of times, with the new posterior tilted
    toward documents no live topic currently explains, so the revived
    topic starts out correlated with exactly the structure that is still
    unaccounted for. A dead topic contributes nothing to the objective, so
    re-seeding does not dent the trace; convergence checks pause for a
    grace window afterwards to give the revived topic time to latch on.
    """
    n_docs = matrix.n_docs
    n_words = matrix.n_words
    rng = np.random.Generator(np.random.PCG64(run_seed))
    alpha = 0.5 + _INIT_ALPHA_SPREAD * (rng.random((n_words, config.n_topics)) - 0.5)
    q = _init_posteriors(matrix.doc_ids, config.n_topics, run_seed)

    trace: list[float] = []
    converged = False
    state = None  # (alpha, mi, q), canonically oriented
    reseeds = np.zeros(config.n_topics, dtype=int)
    grace_until = 0
    for iteration in range(config.max_iter):
        mi, theta1, theta0, prior, cov = _posterior_stats(
            xt, doc_counts, q, n_docs, config.smoothing
        )
        if not (np.all(np.isfinite(mi)) and np.all(np.isfinite(q))):
            raise ValidationError(f"non-finite value at iteration {iteration}")
        _canonical_orientation(q, theta1, theta0, prior, cov, mi)
        topic_tcs = (_normalize_membership(alpha) * mi).sum(axis=0)
        objective = float(topic_tcs.sum())
        if trace and objective < trace[-1] - config.tol:
            # objective stopped improving: keep the previous iterate
            break
        previous = trace[-1] if trace else None
        trace.append(objective)
        state = (alpha, mi, q)
        if (
            previous is not None
            and abs(objective - previous) < config.tol
            and iteration >= grace_until
        ):
            converged = True
            break
        if iteration == config.max_iter - 1:
            break
        beta = min(_BETA_MAX, _BETA_START + _BETA_STEP * iteration)
        alpha = _alpha_step(alpha, mi, cov, beta)
        q = _posterior_step(x, alpha, theta1, theta0, prior)
        if iteration + 1 >= _RESEED_WARMUP:
            for j in np.flatnonzero(topic_tcs < _DEGENERATE_TC):
                if reseeds[j] < _MAX_RESEEDS:
                    reseeds[j] += 1
                    fresh = _derive_seed(run_seed, f"reseed|{iteration}|{j}")
                    noise = _init_posteriors(matrix.doc_ids, 1, fresh)[:, 0] - 0.5
                    live = topic_tcs >= _DEGENERATE_TC
                    tilt = np.zeros(n_docs)
                    if live.any():
                        unexplained = np.log1p(
                            -np.minimum(q[:, live], 1.0 - 1e-9)
                        ).sum(axis=1)
                        centered = np.maximum(unexplained, -50.0)
                        centered -= centered.mean()
                        scale = np.abs(centered).max()
                        if scale > 0:
                            tilt = centered / scale
                    q[:, j] = np.clip(
                        0.5 + _RESEED_TILT * tilt + _RESEED_NOISE * noise, 0.01, 0.99
                    )
                    grace_until = iteration + 1 + _RESEED_GRACE
                    break  # one revival at a time, each gets its own look
    return state, trace, converged


def train(
    matrix: DocTermMatrix,
    config: CorexConfig,
    vocabulary: Sequence[str] | None = None,
) -> TopicModel:
    """Train a topic model; identical inputs and seed give identical output.

    ``vocabulary`` names the matrix columns; when omitted, columns are
    named ``w0..w{n-1}``. Runs a fixed number of restarts from seeds
    derived from ``config.seed`` and keeps the run with the highest final
    objective (earliest run wins ties), which guards against starts where
    a topic's posterior flattens and stops explaining anything.
    """
    n_docs = matrix.n_docs
    n_words = matrix.n_words
    if n_docs == 0:
        raise ValidationError("matrix has no documents")
    if config.n_topics > n_words:
        raise ValidationError(
            f"n_topics {config.n_topics} exceeds vocabulary size {n_words}"
        )
    if vocabulary is None:
        vocabulary = tuple(f"w{i}" for i in range(n_words))
    else:
        vocabulary = tuple(vocabulary)
        if len(vocabulary) != n_words:
            raise ValidationError("vocabulary length disagrees with matrix n_words")

    x = matrix.to_csr()
    xt = x.T.tocsr()
    doc_counts = np.asarray(matrix.doc_frequencies(), dtype=float)

    best = None
    for restart in range(_N_RESTARTS):
        run_seed = _derive_seed(config.seed, f"restart|{restart}")
        state, trace, converged = _train_once(x, xt, doc_counts, matrix, config, run_seed)
        if best is None or trace[-1] > best[1][-1]:
            best = (state, trace, converged)

    (alpha, mi, q), trace, converged = best
    alpha = _normalize_membership(alpha)
    tc = (alpha * mi).sum(axis=0)

    order = np.lexsort((np.arange(config.n_topics), -tc))
    model = TopicModel(
        config=config,
        vocabulary=vocabulary,
        doc_ids=matrix.doc_ids,
        alpha=np.ascontiguousarray(alpha[:, order]),
        word_topic_mi=np.ascontiguousarray(mi[:, order]),
        doc_topic_prob=np.ascontiguousarray(q[:, order]),
        topic_tc=np.ascontiguousarray(tc[order]),
        objective_trace=np.asarray(trace, dtype=float),
        converged=converged,
    )
    return model


# ---------------------------------------------------------------------------
# queries


def _check_topic(model: TopicModel, topic: int) -> None:
    if not 0 <= topic < model.n_topics:
        raise ValidationError(
            f"topic index {topic} out of range for {model.n_topics} topics"
        )


def top_words(model: TopicModel, topic: int, k: int = 15) -> list[tuple[str, float]]:
    """The k highest-MI words for a topic, ties broken by vocabulary index."""
    _check_topic(model, topic)
    if k < 1:
        raise ValidationError("k must be at least 1")
    scores = model.word_topic_mi[:, topic]
    order = np.lexsort((np.arange(model.n_words), -scores))[: min(k, model.n_words)]
    return [(model.vocabulary[i], float(scores[i])) for i in order]


def top_documents(model: TopicModel, topic: int, k: int = 10) -> list[tuple[str, float]]:
    """The k highest-probability documents for a topic, ties by doc order."""
    _check_topic(model, topic)
    if k < 1:
        raise ValidationError("k must be at least 1")
    scores = model.doc_topic_prob[:, topic]
    order = np.lexsort((np.arange(model.n_docs), -scores))[: min(k, model.n_docs)]
    return [(model.doc_ids[i], float(scores[i])) for i in order]


def assign_documents(model: TopicModel, threshold: float = 0.5) -> tuple[frozenset[int], ...]:
    """Multi-label assignment: topic j is assigned when p >= threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValidationError("threshold must be strictly between 0 and 1")
    hits = model.doc_topic_prob >= threshold
    return tuple(frozenset(np.flatnonzero(row)) for row in hits)


def sweep(
    matrix: DocTermMatrix,
    sizes: Sequence[int],
    base_config: CorexConfig,
    vocabulary: Sequence[str] | None = None,
) -> list[SweepEntry]:
    """Train one model per size with a per-size seed offset.

    Entries come back in the given size order; picking the final size is a
    human decision fed back through configuration.
    """
    if not sizes:
        raise ValidationError("sweep sizes must be non-empty")
    entries = []
    for size in sizes:
        config = replace(base_config, n_topics=size, seed=base_config.seed + size)
        model = train(matrix, config, vocabulary)
        entries.append(
            SweepEntry(
                n_topics=size,
                total_tc=float(model.topic_tc.sum()),
                topic_tcs=tuple(float(v) for v in model.topic_tc),
            )
        )
    return entries


# ---------------------------------------------------------------------------
# serialization


_ARRAY_FIELDS = ("alpha", "word_topic_mi", "doc_topic_prob", "topic_tc", "objective_trace")


def save_model(model: TopicModel, path: str | Path) -> None:
    """Write the model as a single self-describing binary artifact.

    Layout: magic, little-endian uint32 format version, uint64 header
    length, a canonical JSON header (config, vocabulary, doc ids, shapes),
    then the arrays as little-endian float64 in fixed order. Byte-identical
    for equal models; written atomically.
    """
    header = {
        "config": {
            "n_topics": model.config.n_topics,
            "max_iter": model.config.max_iter,
            "tol": model.config.tol,
            "seed": model.config.seed,
            "smoothing": model.config.smoothing,
        },
        "converged": model.converged,
        "doc_ids": list(model.doc_ids),
        "shapes": {name: list(getattr(model, name).shape) for name in _ARRAY_FIELDS},
        "vocabulary": list(model.vocabulary),
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(_FORMAT_VERSION.to_bytes(4, "little"))
        fh.write(len(blob).to_bytes(8, "little"))
        fh.write(blob)
        for name in _ARRAY_FIELDS:
            array = np.ascontiguousarray(getattr(model, name), dtype="<f8")
            fh.write(array.tobytes())
    os.replace(tmp, path)


def load_model(path: str | Path) -> TopicModel:
    """Read a model written by save_model and re-validate its invariants."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"model file not found: {path}")
    raw = path.read_bytes()
    if raw[:8] != _MAGIC:
        raise ValidationError(f"{path}: not a topic-model file")
    version = int.from_bytes(raw[8:12], "little")
    if version != _FORMAT_VERSION:
        raise ValidationError(f"{path}: unsupported format version {version}")
    header_len = int.from_bytes(raw[12:20], "little")
    try:
        header = json.loads(raw[20 : 20 + header_len].decode("utf-8"))
    except ValueError as exc:
        raise ValidationError(f"{path}: corrupt header ({exc})") from None

    offset = 20 + header_len
    arrays = {}
    for name in _ARRAY_FIELDS:
        shape = tuple(int(v) for v in header["shapes"][name])
        count = int(np.prod(shape)) if shape else 1
        end = offset + 8 * count
        if end > len(raw):
            raise ValidationError(f"{path}: truncated array data for {name}")
        arrays[name] = (
            np.frombuffer(raw[offset:end], dtype="<f8").astype(float).reshape(shape)
        )
        offset = end
    if offset != len(raw):
        raise ValidationError(f"{path}: trailing bytes after array data")

    model = TopicModel(
        config=CorexConfig(**header["config"]),
        vocabulary=tuple(header["vocabulary"]),
        doc_ids=tuple(header["doc_ids"]),
        converged=bool(header["converged"]),
        **arrays,
    )
    model.validate()
    return model
