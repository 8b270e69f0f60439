"""Pipeline configuration: defaults, config file, environment, flag overrides.

Every scalar the methodology fixes lives here with its standard value, so a
bare run reproduces the documented setup. Values are resolved in layers —
defaults, then the config file, then ``SUPPTOPICS_*`` environment variables,
then command-line flags — with later layers winning.

The config file is flat sectioned text (INI style)::

    [paths]
    corpus = questions.csv
    lexicon = lexicon.txt
    output_dir = out

    [corpus]
    format = delimited
    subcategory = Alternative Medicine

    [preprocess]
    min_questions = 5
    min_word_len = 3
    min_count = 5
    max_doc_frac = 0.85

    [model]
    n_topics = 200
    seed = 0
    max_iter = 200
    tol = 1e-5

    [report]
    top_k_words = 15
    top_k_docs = 10
    assign_threshold = 0.5
    min_frac = 0.10
    format = csv
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from .corpus import CORPUS_FORMATS
from .errors import ValidationError

ENV_PREFIX = "SUPPTOPICS_"
REPORT_FORMATS = ("csv", "text")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the pipeline needs: paths and all fixed thresholds."""

    # paths ([paths] section); unset paths stay None until a stage needs them
    corpus: str | None = None
    lexicon: str | None = None
    stopwords: str | None = None  # None -> packaged default list
    taxonomy: str | None = None  # None -> every topic reports unassigned
    judgments: str | None = None  # None -> evaluation is skipped
    output_dir: str = "out"
    # corpus ([corpus] section: format, subcategory)
    corpus_format: str = "delimited"
    subcategory: str = "Alternative Medicine"
    # preprocess ([preprocess] section)
    min_questions: int = 5
    min_word_len: int = 3
    min_count: int = 5
    max_doc_frac: float = 0.85
    # model ([model] section)
    n_topics: int = 200
    seed: int = 0
    max_iter: int = 200
    tol: float = 1e-5
    # report ([report] section; format key maps to report_format)
    top_k_words: int = 15
    top_k_docs: int = 10
    assign_threshold: float = 0.5
    min_frac: float = 0.10
    report_format: str = "csv"

    def __post_init__(self) -> None:
        if self.corpus_format not in CORPUS_FORMATS:
            raise ValidationError(f"unknown corpus format {self.corpus_format!r}")
        if self.report_format not in REPORT_FORMATS:
            raise ValidationError(f"unknown report format {self.report_format!r}")
        if self.min_questions < 0:
            raise ValidationError("min_questions must be >= 0")
        if self.min_word_len < 3:
            raise ValidationError("min_word_len must be at least 3")
        if self.min_count < 1:
            raise ValidationError("min_count must be at least 1")
        if not 0.0 < self.max_doc_frac <= 1.0:
            raise ValidationError("max_doc_frac must be within (0, 1]")
        if self.n_topics < 1:
            raise ValidationError("n_topics must be at least 1")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not self.tol > 0.0:
            raise ValidationError("tol must be positive")
        if not 1 <= self.top_k_words <= 15:
            raise ValidationError("top_k_words must be within [1, 15]")
        if not 1 <= self.top_k_docs <= 10:
            raise ValidationError("top_k_docs must be within [1, 10]")
        if not 0.0 < self.assign_threshold < 1.0:
            raise ValidationError("assign_threshold must be strictly between 0 and 1")
        if not 0.0 <= self.min_frac <= 1.0:
            raise ValidationError("min_frac must be within [0, 1]")

    @property
    def out(self) -> Path:
        return Path(self.output_dir)


# field name → (config file section, key)
_FILE_KEYS: dict[str, tuple[str, str]] = {
    "corpus": ("paths", "corpus"),
    "lexicon": ("paths", "lexicon"),
    "stopwords": ("paths", "stopwords"),
    "taxonomy": ("paths", "taxonomy"),
    "judgments": ("paths", "judgments"),
    "output_dir": ("paths", "output_dir"),
    "corpus_format": ("corpus", "format"),
    "subcategory": ("corpus", "subcategory"),
    "min_questions": ("preprocess", "min_questions"),
    "min_word_len": ("preprocess", "min_word_len"),
    "min_count": ("preprocess", "min_count"),
    "max_doc_frac": ("preprocess", "max_doc_frac"),
    "n_topics": ("model", "n_topics"),
    "seed": ("model", "seed"),
    "max_iter": ("model", "max_iter"),
    "tol": ("model", "tol"),
    "top_k_words": ("report", "top_k_words"),
    "top_k_docs": ("report", "top_k_docs"),
    "assign_threshold": ("report", "assign_threshold"),
    "min_frac": ("report", "min_frac"),
    "report_format": ("report", "format"),
}

_INT_FIELDS = frozenset(
    ["min_questions", "min_word_len", "min_count", "n_topics", "seed",
     "max_iter", "top_k_words", "top_k_docs"]
)
_FLOAT_FIELDS = frozenset(["max_doc_frac", "tol", "assign_threshold", "min_frac"])
_PATH_FIELDS = frozenset(
    ["corpus", "lexicon", "stopwords", "taxonomy", "judgments", "output_dir"]
)


def _coerce(field: str, raw: str, where: str) -> object:
    try:
        if field in _INT_FIELDS:
            return int(raw)
        if field in _FLOAT_FIELDS:
            return float(raw)
    except ValueError:
        kind = "an integer" if field in _INT_FIELDS else "a number"
        raise ValidationError(f"{where}: {field} must be {kind}, got {raw!r}") from None
    return raw


def read_config_file(path: str | Path) -> dict[str, object]:
    """Parse a config file into a {field: value} dict (validated keys only).

    Relative paths in the file resolve against the file's own directory, so
    a config can travel with its fixtures.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ValidationError(f"cannot parse config file {path}: {exc}") from exc
    known = {(section, key): field for field, (section, key) in _FILE_KEYS.items()}
    values: dict[str, object] = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            field = known.get((section, key))
            if field is None:
                raise ValidationError(f"{path}: unknown config key [{section}] {key}")
            value = _coerce(field, raw, str(path))
            if field in _PATH_FIELDS and not Path(str(value)).is_absolute():
                value = str(path.parent / str(value))
            values[field] = value
    return values


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, object]:
    """Collect SUPPTOPICS_<FIELD> variables (field names upper-cased)."""
    environ = os.environ if environ is None else environ
    values: dict[str, object] = {}
    for field in _FILE_KEYS:
        raw = environ.get(ENV_PREFIX + field.upper())
        if raw is not None:
            values[field] = _coerce(field, raw, f"environment {ENV_PREFIX}{field.upper()}")
    return values


def resolve_config(
    config_path: str | Path | None = None,
    flag_overrides: Mapping[str, object] | None = None,
    environ: Mapping[str, str] | None = None,
) -> PipelineConfig:
    """Layer defaults < config file < environment < flags into a config."""
    values: dict[str, object] = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    values.update(env_overrides(environ))
    if flag_overrides:
        unknown = set(flag_overrides) - {f.name for f in fields(PipelineConfig)}
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        values.update(flag_overrides)
    return PipelineConfig(**values)  # type: ignore[arg-type]


def with_overrides(config: PipelineConfig, **overrides: object) -> PipelineConfig:
    """A copy of the config with the given fields replaced (re-validated)."""
    return replace(config, **overrides)  # type: ignore[arg-type]
