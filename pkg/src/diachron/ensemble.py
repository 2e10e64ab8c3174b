"""Confidence-weighted combination of regex and neural frequencies.

The combined frequency is (w_t*c*f_t + w_r*f_r) / (w_t*c + w_r): a
convex mix in which the neural signal is discounted by its own
confidence. Detection decisions trust a positive regex frequency
unconditionally and gate neural-only signals on confidence thresholds.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import AlignmentError, DegenerateWeightsError
from .patterns import FeatureMatrix, MatrixMethod

logger = logging.getLogger(__name__)

DEFAULT_REGEX_WEIGHT = 0.65
DEFAULT_HIGH_CONF = 0.75
DEFAULT_LOW_CONF = 0.25


class DecisionSource(enum.Enum):
    BOTH = "Both"
    REGEX_ONLY = "RegexOnly"
    NEURAL_ONLY = "NeuralOnly"
    NONE = "None"


@dataclass(frozen=True)
class NeuralPrediction:
    """One per-(text, feature) record of the neural wire format."""

    text_id: str
    feature_id: str
    frequency: float
    confidence: float


@dataclass
class EnsembleConfig:
    regex_weight: float = DEFAULT_REGEX_WEIGHT
    transformer_weight: Optional[float] = None  # default: 1 - regex_weight
    high_conf: float = DEFAULT_HIGH_CONF
    low_conf: float = DEFAULT_LOW_CONF
    # Per-category overrides: category value -> (transformer_weight, regex_weight)
    category_weights: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.transformer_weight is None:
            self.transformer_weight = 1.0 - self.regex_weight
        if self.transformer_weight + self.regex_weight <= 0:
            raise DegenerateWeightsError("w_t + w_r must be positive")
        if not 0.0 <= self.low_conf <= self.high_conf <= 1.0:
            raise ValueError("need 0 <= low_conf <= high_conf <= 1")

    def weights_for(self, category: Optional[str] = None) -> tuple[float, float]:
        if category is not None and category in self.category_weights:
            return self.category_weights[category]
        return (self.transformer_weight, self.regex_weight)


@dataclass(frozen=True)
class CellResult:
    text_id: str
    feature_id: str
    f_r: float
    f_t: float
    c: float
    w_t: float
    w_r: float
    f_ensemble: float
    detected: bool
    decision_source: DecisionSource


@dataclass
class EnsembleResult:
    matrix: FeatureMatrix  # method = Ensemble
    cells: list[CellResult]
    config: EnsembleConfig


def read_ensemble_config(path: str | Path) -> EnsembleConfig:
    """Load an EnsembleConfig from a JSON document.

    Recognized keys: regex_weight, transformer_weight, high_conf,
    low_conf, category_weights (category -> [w_t, w_r]).
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError(f"ensemble config {path} must be a JSON object")
    known = {"regex_weight", "transformer_weight", "high_conf", "low_conf", "category_weights"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"ensemble config {path}: unknown keys {sorted(unknown)}")
    categories = {
        name: (float(pair[0]), float(pair[1]))
        for name, pair in doc.get("category_weights", {}).items()
    }
    return EnsembleConfig(
        regex_weight=float(doc.get("regex_weight", DEFAULT_REGEX_WEIGHT)),
        transformer_weight=(
            None if doc.get("transformer_weight") is None else float(doc["transformer_weight"])
        ),
        high_conf=float(doc.get("high_conf", DEFAULT_HIGH_CONF)),
        low_conf=float(doc.get("low_conf", DEFAULT_LOW_CONF)),
        category_weights=categories,
    )


def combine(f_t: float, f_r: float, c: float, w_t: float, w_r: float) -> float:
    """Confidence-weighted frequency: (w_t*c*f_t + w_r*f_r)/(w_t*c + w_r)."""
    denom = w_t * c + w_r
    if denom <= 0:
        raise DegenerateWeightsError(f"w_t*c + w_r = {denom} is not positive")
    if w_t * c == 0:
        # exact zero-confidence limit; avoids (w_r*f_r)/w_r rounding
        return f_r
    return (w_t * c * f_t + w_r * f_r) / denom


def decide(
    f_r: float,
    f_t: float,
    c: float,
    config: EnsembleConfig,
    category: Optional[str] = None,
) -> tuple[bool, DecisionSource]:
    """Detection decision for one (text, feature) cell.

    A positive regex frequency always detects. A neural-only signal
    detects at confidence >= high_conf, is ignored at <= low_conf, and in
    between counts when the combined frequency is positive.
    """
    w_t, w_r = config.weights_for(category)
    neural_usable = f_t > 0 and c > config.low_conf
    if f_r > 0:
        return True, (DecisionSource.BOTH if neural_usable else DecisionSource.REGEX_ONLY)
    if f_t > 0:
        if c >= config.high_conf:
            return True, DecisionSource.NEURAL_ONLY
        if c <= config.low_conf:
            return False, DecisionSource.NONE
        if combine(f_t, f_r, c, w_t, w_r) > 0:
            return True, DecisionSource.NEURAL_ONLY
    return False, DecisionSource.NONE


def read_predictions(path: str | Path) -> list[NeuralPrediction]:
    """Parse a JSON-Lines neural prediction file."""
    path = Path(path)
    out = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                out.append(
                    NeuralPrediction(
                        text_id=rec["text_id"],
                        feature_id=rec["feature_id"],
                        frequency=float(rec["frequency"]),
                        confidence=float(rec["confidence"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise AlignmentError(f"{path}:{lineno}: bad prediction record: {exc}") from None
    for rec in out:
        if not (rec.frequency >= 0 and 0 <= rec.confidence <= 1):
            raise AlignmentError(
                f"{path}: prediction ({rec.text_id}, {rec.feature_id}) out of range"
            )
    return out


def predictions_to_matrix(
    predictions: Iterable[NeuralPrediction],
    texts: list[str],
    features: list[str],
) -> FeatureMatrix:
    """Arrange prediction records on a (features x texts) grid.

    Records referencing unknown texts or features abort with the full
    orphan list; missing cells default to frequency 0, confidence 0.
    """
    tindex = {t: j for j, t in enumerate(texts)}
    findex = {f: i for i, f in enumerate(features)}
    freq = np.zeros((len(features), len(texts)))
    conf = np.zeros_like(freq)
    seen: set[tuple[str, str]] = set()
    orphans = []
    for rec in predictions:
        if rec.text_id not in tindex or rec.feature_id not in findex:
            orphans.append((rec.text_id, rec.feature_id))
            continue
        key = (rec.text_id, rec.feature_id)
        if key in seen:
            raise AlignmentError(f"duplicate prediction for {key}")
        seen.add(key)
        freq[findex[rec.feature_id], tindex[rec.text_id]] = rec.frequency
        conf[findex[rec.feature_id], tindex[rec.text_id]] = rec.confidence
    if orphans:
        raise AlignmentError(
            "predictions reference unknown (text, feature) pairs: "
            + ", ".join(map(str, sorted(orphans)))
        )
    return FeatureMatrix(
        method=MatrixMethod.NEURAL,
        texts=list(texts),
        features=list(features),
        freq=freq,
        detected=freq > 0,
        confidence=conf,
    )


def combine_matrix(
    regex: FeatureMatrix,
    predictions: Iterable[NeuralPrediction],
    config: Optional[EnsembleConfig] = None,
    categories: Optional[dict[str, str]] = None,
    renormalize_groups: Optional[dict[str, list[str]]] = None,
) -> EnsembleResult:
    """Cellwise combine + decide over the full matrix.

    ``categories`` maps feature_id -> category value for per-category
    weight overrides. ``renormalize_groups`` names feature groups whose
    per-text frequencies form a distribution; after combination each
    group is rescaled to preserve the regex-side group total.
    """
    config = config or EnsembleConfig()
    categories = categories or {}
    neural = predictions_to_matrix(list(predictions), regex.texts, regex.features)
    nf, nt = len(regex.features), len(regex.texts)
    freq = np.zeros((nf, nt))
    detected = np.zeros((nf, nt), dtype=bool)
    cells = []
    assert neural.confidence is not None
    for i, fid in enumerate(regex.features):
        w_t, w_r = config.weights_for(categories.get(fid))
        for j, tid in enumerate(regex.texts):
            f_r = float(regex.freq[i, j])
            f_t = float(neural.freq[i, j])
            c = float(neural.confidence[i, j])
            f_ens = combine(f_t, f_r, c, w_t, w_r)
            det, source = decide(f_r, f_t, c, config, categories.get(fid))
            freq[i, j] = f_ens
            detected[i, j] = det
            cells.append(
                CellResult(
                    text_id=tid,
                    feature_id=fid,
                    f_r=f_r,
                    f_t=f_t,
                    c=c,
                    w_t=w_t,
                    w_r=w_r,
                    f_ensemble=f_ens,
                    detected=det,
                    decision_source=source,
                )
            )
    if renormalize_groups:
        findex = {f: i for i, f in enumerate(regex.features)}
        for name, members in renormalize_groups.items():
            rows = [findex[m] for m in members if m in findex]
            if len(rows) != len(members):
                missing = sorted(set(members) - set(regex.features))
                raise AlignmentError(f"renormalization group {name!r}: unknown features {missing}")
            target = regex.freq[rows, :].sum(axis=0)
            current = freq[rows, :].sum(axis=0)
            for j in range(nt):
                if current[j] > 0 and target[j] > 0:
                    freq[rows, j] *= target[j] / current[j]
                elif current[j] > 0:
                    logger.warning(
                        "group %s, text %s: regex group total is 0; skipping renormalization",
                        name,
                        regex.texts[j],
                    )
    matrix = FeatureMatrix(
        method=MatrixMethod.ENSEMBLE,
        texts=list(regex.texts),
        features=list(regex.features),
        freq=freq,
        detected=detected,
    )
    return EnsembleResult(matrix=matrix, cells=cells, config=config)
