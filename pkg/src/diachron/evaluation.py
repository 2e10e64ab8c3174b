"""Inter-method agreement, calibration (Pearson, ECE), gold-standard scoring."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import AlignmentError, UndefinedCorrelationError
from .patterns import FeatureMatrix

AGREEMENT_RELATIVE_CUTOFF = 0.30
DEFAULT_BINS = 10


def agreement(f_regex: float, f_transformer: float) -> int:
    """Frequency-agreement indicator for one (feature, text) cell.

    1 when the relative difference |f_r - f_t| / max(f_r, f_t) stays
    under 0.30. Two zero frequencies agree (nothing detected by either
    method); exactly one zero is full disagreement.
    """
    if f_regex < 0 or f_transformer < 0:
        raise ValueError("frequencies must be non-negative")
    top = max(f_regex, f_transformer)
    if top == 0:
        return 1
    return 1 if abs(f_regex - f_transformer) / top < AGREEMENT_RELATIVE_CUTOFF else 0


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be equal-length vectors")
    if len(x) < 2:
        raise ValueError("need at least 2 points")
    xd = x - x.mean()
    yd = y - y.mean()
    sx = float(np.sqrt(np.sum(xd * xd)))
    sy = float(np.sqrt(np.sum(yd * yd)))
    if sx == 0 or sy == 0:
        raise UndefinedCorrelationError("zero variance input")
    return float(np.sum(xd * yd) / (sx * sy))


@dataclass
class CalibrationBin:
    lower: float
    upper: float
    count: int
    accuracy: float  # 0 when empty
    mean_confidence: float  # 0 when empty


@dataclass
class CalibrationReport:
    bins: list[CalibrationBin]
    ece: float
    pearson_r: Optional[float]  # bin-level conf vs acc; None when undefined
    total: int

    def to_doc(self) -> dict:
        return {
            "ece": self.ece,
            "pearson_r": self.pearson_r,
            "total": self.total,
            "bins": [
                {
                    "lower": b.lower,
                    "upper": b.upper,
                    "count": b.count,
                    "accuracy": b.accuracy,
                    "mean_confidence": b.mean_confidence,
                }
                for b in self.bins
            ],
        }


def ece(
    confidences: Sequence[float],
    correct: Sequence[bool],
    bins: int = DEFAULT_BINS,
) -> CalibrationReport:
    """Expected calibration error over equal-width, right-closed bins.

    ECE = sum_b (n_b / N) * |acc(b) - conf(b)|; empty bins contribute 0.
    The report's pearson_r correlates per-bin mean confidence against
    per-bin empirical accuracy over nonempty bins (None when fewer than
    two nonempty bins or zero variance).
    """
    conf = np.asarray(confidences, dtype=np.float64)
    corr = np.asarray(correct, dtype=bool)
    if conf.shape != corr.shape or conf.ndim != 1:
        raise ValueError("confidences and correct must be equal-length vectors")
    if len(conf) == 0:
        raise ValueError("empty inputs")
    if np.any(conf < 0) or np.any(conf > 1):
        raise ValueError("confidences must lie in [0, 1]")
    n = len(conf)
    # Right-closed bins ((b-1)/B, b/B]; confidence 0 lands in the first bin.
    idx = np.ceil(conf * bins).astype(int) - 1
    idx = np.clip(idx, 0, bins - 1)
    out_bins: list[CalibrationBin] = []
    total_gap = 0.0
    for b in range(bins):
        mask = idx == b
        count = int(mask.sum())
        if count:
            acc = float(corr[mask].mean())
            mc = float(conf[mask].mean())
            total_gap += (count / n) * abs(acc - mc)
        else:
            acc = 0.0
            mc = 0.0
        out_bins.append(
            CalibrationBin(
                lower=b / bins,
                upper=(b + 1) / bins,
                count=count,
                accuracy=acc,
                mean_confidence=mc,
            )
        )
    nonempty = [b for b in out_bins if b.count]
    r: Optional[float] = None
    if len(nonempty) >= 2:
        try:
            r = pearson(
                [b.mean_confidence for b in nonempty],
                [b.accuracy for b in nonempty],
            )
        except UndefinedCorrelationError:
            r = None
    return CalibrationReport(bins=out_bins, ece=total_gap, pearson_r=r, total=n)


@dataclass
class AgreementReport:
    """Two views of inter-method agreement over a (feature x text) grid.

    ``agreement_rate`` counts joint-detection outcomes (both positive or
    both zero); ``indicator_rate`` averages the relative-frequency
    indicator, which also credits near-equal positive frequencies.
    """

    bits: np.ndarray  # indicator per [feature x text]
    positive_agreements: int
    negative_agreements: int
    total: int
    correlation: Optional[float]

    @property
    def agreement_rate(self) -> float:
        return (self.positive_agreements + self.negative_agreements) / self.total

    @property
    def indicator_rate(self) -> float:
        return float(self.bits.mean())

    def to_doc(self) -> dict:
        return {
            "total_checks": self.total,
            "positive_agreements": self.positive_agreements,
            "negative_agreements": self.negative_agreements,
            "agreement_rate": self.agreement_rate,
            "indicator_rate": self.indicator_rate,
            "frequency_correlation": self.correlation,
        }


def compare_methods(regex: FeatureMatrix, other: FeatureMatrix) -> AgreementReport:
    """Cellwise agreement between two matrices on the same grid."""
    if regex.texts != other.texts or regex.features != other.features:
        raise AlignmentError("matrices cover different text/feature universes")
    fr = regex.freq
    ft = other.freq
    bits = np.zeros(fr.shape, dtype=np.int8)
    for i in range(fr.shape[0]):
        for j in range(fr.shape[1]):
            bits[i, j] = agreement(float(fr[i, j]), float(ft[i, j]))
    positive = int(np.sum((fr > 0) & (ft > 0)))
    negative = int(np.sum((fr == 0) & (ft == 0)))
    try:
        corr = pearson(fr.ravel(), ft.ravel())
    except UndefinedCorrelationError:
        corr = None
    return AgreementReport(
        bits=bits,
        positive_agreements=positive,
        negative_agreements=negative,
        total=int(fr.size),
        correlation=corr,
    )


@dataclass(frozen=True)
class GoldExample:
    target_word: str
    context: str
    true_features: dict[str, float]  # feature_id -> annotator confidence
    expected_false_positives: frozenset[str] = frozenset()
    distinguishing_cues: str = ""

    def __post_init__(self) -> None:
        overlap = set(self.true_features) & self.expected_false_positives
        if overlap:
            raise ValueError(f"features both true and expected-false: {sorted(overlap)}")


@dataclass(frozen=True)
class GoldPrediction:
    """System output for one gold example."""

    features: frozenset[str]
    confidence: float


@dataclass
class GoldReport:
    accuracy: float
    f1: float
    precision: float
    recall: float
    calibration: CalibrationReport
    total: int

    def to_doc(self) -> dict:
        return {
            "total_examples": self.total,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "calibration": self.calibration.to_doc(),
        }


def read_gold(path: str | Path) -> list[GoldExample]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    examples = []
    for raw in doc["examples"]:
        examples.append(
            GoldExample(
                target_word=raw["target_word"],
                context=raw["context"],
                true_features=dict(raw["true_features"]),
                expected_false_positives=frozenset(raw.get("expected_false_positives", ())),
                distinguishing_cues=raw.get("distinguishing_cues", ""),
            )
        )
    return examples


def evaluate_gold(
    gold: Sequence[GoldExample],
    predictions: Sequence[GoldPrediction],
    bins: int = DEFAULT_BINS,
) -> GoldReport:
    """Example accuracy, multi-label micro-F1 and confidence calibration.

    An example counts as correct when the predicted feature set equals
    the annotated one exactly; micro-F1 pools per-feature true/false
    positives across examples.
    """
    if len(gold) != len(predictions):
        raise AlignmentError(f"{len(gold)} gold examples vs {len(predictions)} predictions")
    if not gold:
        raise ValueError("empty gold set")
    tp = fp = fn = 0
    correct_bits = []
    confidences = []
    for ex, pred in zip(gold, predictions):
        truth = set(ex.true_features)
        tp += len(pred.features & truth)
        fp += len(pred.features - truth)
        fn += len(truth - pred.features)
        correct_bits.append(pred.features == truth)
        confidences.append(pred.confidence)
    accuracy = sum(correct_bits) / len(gold)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    calibration = ece(confidences, correct_bits, bins)
    return GoldReport(
        accuracy=accuracy,
        f1=f1,
        precision=precision,
        recall=recall,
        calibration=calibration,
        total=len(gold),
    )
