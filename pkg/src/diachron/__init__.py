"""Weakly-supervised diachronic feature detection for IAST corpora.

Pipeline: load a chronologically ordered corpus, scan it with a catalog
of contextual regex patterns, emit confidence-weighted weak labels,
ensemble the symbolic frequencies with neural predictions, evaluate
agreement and calibration, and quantify per-feature diachronic trends.
"""

from .corpus import (
    CorpusManifest,
    PeriodId,
    TextDocument,
    Token,
    corpus_hash,
    load_corpus,
    normalize,
    read_manifest,
    tokenize,
)
from .ensemble import (
    DecisionSource,
    EnsembleConfig,
    EnsembleResult,
    NeuralPrediction,
    combine,
    combine_matrix,
    decide,
    read_predictions,
)
from .errors import DiachronError
from .evaluation import (
    AgreementReport,
    CalibrationReport,
    GoldExample,
    GoldPrediction,
    agreement,
    compare_methods,
    ece,
    evaluate_gold,
    pearson,
    read_gold,
)
from .patterns import (
    FeatureCategory,
    FeatureMatch,
    FeatureMatrix,
    FeaturePattern,
    MatrixMethod,
    PatternCatalog,
    detect_all,
    match_confidence,
    read_catalog,
    scan_text,
)
from .stats import (
    ClusterTree,
    EffectBand,
    PcaResult,
    TrendClass,
    TrendStats,
    anova_oneway,
    classify_trends,
    cluster,
    cohens_d,
    ols_trend,
    pca,
    spearman,
)
from .weak_labels import LabelSet, WeakLabel, export_labels, generate_labels, import_labels

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "CalibrationReport",
    "ClusterTree",
    "CorpusManifest",
    "DecisionSource",
    "DiachronError",
    "EffectBand",
    "EnsembleConfig",
    "EnsembleResult",
    "FeatureCategory",
    "FeatureMatch",
    "FeatureMatrix",
    "FeaturePattern",
    "GoldExample",
    "GoldPrediction",
    "LabelSet",
    "MatrixMethod",
    "NeuralPrediction",
    "PatternCatalog",
    "PcaResult",
    "PeriodId",
    "TextDocument",
    "Token",
    "TrendClass",
    "TrendStats",
    "WeakLabel",
    "agreement",
    "anova_oneway",
    "classify_trends",
    "cluster",
    "cohens_d",
    "combine",
    "combine_matrix",
    "compare_methods",
    "corpus_hash",
    "decide",
    "detect_all",
    "ece",
    "evaluate_gold",
    "export_labels",
    "generate_labels",
    "import_labels",
    "load_corpus",
    "match_confidence",
    "normalize",
    "ols_trend",
    "pca",
    "pearson",
    "read_catalog",
    "read_gold",
    "read_manifest",
    "read_predictions",
    "scan_text",
    "spearman",
    "tokenize",
]
