"""Mine consumer health questions for supplement-related topics.

The pipeline: load a question corpus, match questions against a dietary
supplement lexicon, mask matched mentions and tokenize, frequency-filter
into a binary document-term matrix, train a correlation-explanation topic
model, then aggregate and report topics through a human-supplied taxonomy.

Each stage is a pure function over immutable inputs; the ``supptopics``
command line orchestrates them over persisted artifacts.
"""

from .config import PipelineConfig, resolve_config
from .corex import (
    CorexConfig,
    SweepEntry,
    TopicModel,
    assign_documents,
    load_model,
    save_model,
    sweep,
    top_documents,
    top_words,
    train,
)
from .corpus import Corpus, Question, filter_subcategory, load_corpus, save_corpus
from .dtm import DocTermMatrix, load_dtm, save_dtm
from .errors import MissingArtifactError, SuppTopicsError, ValidationError
from .lexicon import (
    IngredientLexicon,
    IngredientMatch,
    MatchedCorpus,
    MatchedQuestion,
    clean_lexicon,
    load_lexicon,
    load_matched,
    match_ingredients,
    save_lexicon,
    save_matched,
)
from .preprocess import (
    PreprocessSummary,
    TokenStream,
    Vocabulary,
    build_streams,
    build_vocabulary,
    load_stopwords,
    mask_ingredients,
    normalize,
    summarize,
    tokenize,
    vectorize,
)
from .reports import (
    AccuracyRecord,
    IngredientShare,
    Judgment,
    TopicReportRow,
    accuracy_report,
    assignment_map,
    build_topic_report,
    ingredient_distribution,
    load_judgments,
    percentage,
)
from .taxonomy import (
    Taxonomy,
    category_topic_counts,
    group_distribution,
    load_taxonomy,
    save_taxonomy,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyRecord",
    "Corpus",
    "CorexConfig",
    "DocTermMatrix",
    "IngredientLexicon",
    "IngredientMatch",
    "IngredientShare",
    "Judgment",
    "MatchedCorpus",
    "MatchedQuestion",
    "MissingArtifactError",
    "PipelineConfig",
    "PreprocessSummary",
    "Question",
    "SuppTopicsError",
    "SweepEntry",
    "Taxonomy",
    "TokenStream",
    "TopicModel",
    "TopicReportRow",
    "ValidationError",
    "Vocabulary",
    "accuracy_report",
    "assign_documents",
    "assignment_map",
    "build_streams",
    "build_topic_report",
    "build_vocabulary",
    "category_topic_counts",
    "clean_lexicon",
    "filter_subcategory",
    "group_distribution",
    "ingredient_distribution",
    "load_corpus",
    "load_dtm",
    "load_judgments",
    "load_lexicon",
    "load_matched",
    "load_model",
    "load_stopwords",
    "load_taxonomy",
    "mask_ingredients",
    "match_ingredients",
    "normalize",
    "percentage",
    "resolve_config",
    "save_corpus",
    "save_dtm",
    "save_lexicon",
    "save_matched",
    "save_model",
    "save_taxonomy",
    "summarize",
    "sweep",
    "tokenize",
    "top_documents",
    "top_words",
    "train",
    "vectorize",
]
