"""Contextual feature patterns: compilation, scanning, frequency matrices.

A feature pattern pairs a base regex (matched against whole token
surfaces) with positive and negative context regexes evaluated over a
window of surrounding tokens. Each match gets a confidence weight from
the planted-context counts; low-confidence matches are discarded.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import TextDocument
from .errors import CatalogError

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 20

CONFIDENCE_BASE = 0.6
CONFIDENCE_PER_POSITIVE = 0.2
CONFIDENCE_PER_NEGATIVE = 0.3
CONFIDENCE_FLOOR = 0.1
CONFIDENCE_CEILING = 0.95
RETENTION_THRESHOLD = 0.4


class FeatureCategory(enum.Enum):
    PHONOLOGICAL = "Phonological"
    MORPHOLOGICAL = "Morphological"
    SYNTACTIC = "Syntactic"
    LEXICAL = "Lexical"
    STYLISTIC = "Stylistic"


class MatrixMethod(enum.Enum):
    REGEX = "Regex"
    NEURAL = "Neural"
    ENSEMBLE = "Ensemble"


@dataclass(frozen=True)
class FeaturePattern:
    feature_id: str
    category: FeatureCategory
    base_regex: str
    positive_contexts: tuple[str, ...] = ()
    negative_contexts: tuple[str, ...] = ()
    description: str = ""


@dataclass(frozen=True)
class CompiledPattern:
    spec: FeaturePattern
    base: re.Pattern
    positives: tuple[re.Pattern, ...]
    negatives: tuple[re.Pattern, ...]


@dataclass
class PatternCatalog:
    version: str
    patterns: list[FeaturePattern]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for p in self.patterns:
            if p.feature_id in seen:
                raise CatalogError(f"duplicate feature_id {p.feature_id!r}")
            seen.add(p.feature_id)

    @property
    def feature_ids(self) -> list[str]:
        return [p.feature_id for p in self.patterns]

    @property
    def category_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for p in self.patterns:
            counts[p.category.value] = counts.get(p.category.value, 0) + 1
        return counts

    def compile(self) -> list[CompiledPattern]:
        return [compile_pattern(p) for p in self.patterns]


@dataclass(frozen=True)
class FeatureMatch:
    feature_id: str
    text_id: str
    word_index: int
    matched_surface: str
    confidence: float
    positives_matched: int
    negatives_matched: int


@dataclass
class FeatureMatrix:
    """Per-text, per-feature frequencies (occurrences per 1,000 words)."""

    method: MatrixMethod
    texts: list[str]
    features: list[str]
    freq: np.ndarray  # [feature x text], float64
    detected: np.ndarray  # [feature x text], bool
    counts: Optional[np.ndarray] = None  # [feature x text], int, regex only
    confidence: Optional[np.ndarray] = None  # [feature x text], neural only

    def __post_init__(self) -> None:
        expected = (len(self.features), len(self.texts))
        if self.freq.shape != expected or self.detected.shape != expected:
            raise ValueError(f"matrix shape mismatch: want {expected}")
        if not np.all(np.isfinite(self.freq)):
            raise ValueError("frequencies must be finite")

    def text_index(self, text_id: str) -> int:
        return self.texts.index(text_id)

    def feature_index(self, feature_id: str) -> int:
        return self.features.index(feature_id)


def _compile_regex(source: str, feature_id: str, role: str) -> re.Pattern:
    try:
        return re.compile(source)
    except re.error as exc:
        raise CatalogError(
            f"feature {feature_id!r}: invalid {role} regex {source!r}: {exc}"
        ) from None


def compile_pattern(pattern: FeaturePattern) -> CompiledPattern:
    return CompiledPattern(
        spec=pattern,
        base=_compile_regex(pattern.base_regex, pattern.feature_id, "base"),
        positives=tuple(
            _compile_regex(s, pattern.feature_id, "positive context")
            for s in pattern.positive_contexts
        ),
        negatives=tuple(
            _compile_regex(s, pattern.feature_id, "negative context")
            for s in pattern.negative_contexts
        ),
    )


def parse_catalog(doc: dict) -> PatternCatalog:
    if not isinstance(doc, dict) or "patterns" not in doc:
        raise CatalogError("catalog must be an object with a 'patterns' list")
    patterns = []
    for raw in doc["patterns"]:
        missing = [k for k in ("feature_id", "category", "base_regex") if k not in raw]
        if missing:
            raise CatalogError(
                f"pattern {raw.get('feature_id', '<missing id>')!r}: missing fields {missing}"
            )
        try:
            category = FeatureCategory(raw["category"])
        except ValueError:
            valid = ", ".join(c.value for c in FeatureCategory)
            raise CatalogError(
                f"pattern {raw['feature_id']!r}: unknown category {raw['category']!r}"
                f" (expected one of {valid})"
            ) from None
        patterns.append(
            FeaturePattern(
                feature_id=raw["feature_id"],
                category=category,
                base_regex=raw["base_regex"],
                positive_contexts=tuple(raw.get("positive_contexts", ())),
                negative_contexts=tuple(raw.get("negative_contexts", ())),
                description=raw.get("description", ""),
            )
        )
    catalog = PatternCatalog(version=str(doc.get("version", "0")), patterns=patterns)
    catalog.compile()  # fail fast on invalid regexes
    return catalog


def read_catalog(path: str | Path) -> PatternCatalog:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CatalogError(f"catalog not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog {path} is not valid JSON: {exc}") from None
    return parse_catalog(doc)


def catalog_to_doc(catalog: PatternCatalog) -> dict:
    return {
        "version": catalog.version,
        "category_counts": catalog.category_counts,
        "patterns": [
            {
                "feature_id": p.feature_id,
                "category": p.category.value,
                "base_regex": p.base_regex,
                "positive_contexts": list(p.positive_contexts),
                "negative_contexts": list(p.negative_contexts),
                "description": p.description,
            }
            for p in catalog.patterns
        ],
    }


def match_confidence(positives_matched: int, negatives_matched: int) -> float:
    """Confidence weight for a match given its context-pattern counts.

    Base 0.6, +0.2 per matched positive context pattern, -0.3 per matched
    negative one, clamped to [0.1, 0.95].
    """
    raw = (
        CONFIDENCE_BASE
        + CONFIDENCE_PER_POSITIVE * positives_matched
        - CONFIDENCE_PER_NEGATIVE * negatives_matched
    )
    return min(CONFIDENCE_CEILING, max(CONFIDENCE_FLOOR, raw))


def window_text(surfaces: Sequence[str], index: int, window: int) -> str:
    """Tokens within word-index distance <= window, joined by spaces."""
    lo = max(0, index - window)
    return " ".join(surfaces[lo : index + window + 1])


def scan_text(
    doc: TextDocument,
    pattern: FeaturePattern | CompiledPattern,
    window: int = DEFAULT_WINDOW,
    _memo: Optional[dict[str, bool]] = None,
) -> list[FeatureMatch]:
    """All retained matches of one pattern in one document, in word order.

    The base regex must match the entire token surface. Context patterns
    count at most once each (presence within the window, not occurrence
    count). Matches below the retention threshold are discarded.
    """
    compiled = pattern if isinstance(pattern, CompiledPattern) else compile_pattern(pattern)
    surfaces = [t.surface for t in doc.tokens]
    base = compiled.base
    memo = _memo if _memo is not None else {}
    matches: list[FeatureMatch] = []
    for idx, surface in enumerate(surfaces):
        hit = memo.get(surface)
        if hit is None:
            hit = base.fullmatch(surface) is not None
            memo[surface] = hit
        if not hit:
            continue
        ctx = window_text(surfaces, idx, window)
        positives = sum(1 for rx in compiled.positives if rx.search(ctx))
        negatives = sum(1 for rx in compiled.negatives if rx.search(ctx))
        confidence = match_confidence(positives, negatives)
        if confidence < RETENTION_THRESHOLD:
            continue
        matches.append(
            FeatureMatch(
                feature_id=compiled.spec.feature_id,
                text_id=doc.id,
                word_index=idx,
                matched_surface=surface,
                confidence=confidence,
                positives_matched=positives,
                negatives_matched=negatives,
            )
        )
    return matches


def scan_corpus(
    corpus: Sequence[TextDocument],
    catalog: PatternCatalog,
    window: int = DEFAULT_WINDOW,
) -> list[FeatureMatch]:
    """Retained matches for every (text, pattern) pair.

    Ordered by (chrono_index, word_index, feature_id).
    """
    compiled = catalog.compile()
    memos: list[dict[str, bool]] = [{} for _ in compiled]
    out: list[FeatureMatch] = []
    feature_order = {p.spec.feature_id: i for i, p in enumerate(compiled)}
    for doc in sorted(corpus, key=lambda d: d.chrono_index):
        per_doc: list[FeatureMatch] = []
        for cp, memo in zip(compiled, memos):
            per_doc.extend(scan_text(doc, cp, window, _memo=memo))
        per_doc.sort(key=lambda m: (m.word_index, feature_order[m.feature_id]))
        out.extend(per_doc)
    return out


def detect_all(
    corpus: Sequence[TextDocument],
    catalog: PatternCatalog,
    window: int = DEFAULT_WINDOW,
) -> FeatureMatrix:
    """Regex-method feature matrix over a chronologically ordered corpus."""
    docs = sorted(corpus, key=lambda d: d.chrono_index)
    features = catalog.feature_ids
    counts = np.zeros((len(features), len(docs)), dtype=np.int64)
    findex = {fid: i for i, fid in enumerate(features)}
    tindex = {d.id: j for j, d in enumerate(docs)}
    for m in scan_corpus(docs, catalog, window):
        counts[findex[m.feature_id], tindex[m.text_id]] += 1
    freq = np.zeros_like(counts, dtype=np.float64)
    for j, doc in enumerate(docs):
        if doc.word_count == 0:
            logger.warning("text %s has zero tokens; frequencies forced to 0", doc.id)
            continue
        freq[:, j] = 1000.0 * counts[:, j] / doc.word_count
    return FeatureMatrix(
        method=MatrixMethod.REGEX,
        texts=[d.id for d in docs],
        features=list(features),
        freq=freq,
        detected=counts > 0,
        counts=counts,
    )
