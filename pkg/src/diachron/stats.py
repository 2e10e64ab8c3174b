"""Diachronic trend statistics over chronologically ordered matrices.

Per-feature: OLS slope against text position, Spearman rank correlation,
and a pooled-SD standardized mean difference between the earliest and
latest text groups. A trend counts as genuine only under the dual rule:
both the regression and the Spearman p-value below 0.05. Corpus-level:
one-way ANOVA across periods, PCA on the feature correlation matrix,
and Ward-linkage hierarchical clustering of texts.

The t and F tail probabilities are computed from scratch via the
regularized incomplete beta function (continued fractions), keeping the
numerics self-contained.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InfiniteEffectError
from .patterns import FeatureMatrix

logger = logging.getLogger(__name__)

SIGNIFICANCE_LEVEL = 0.05
EFFECT_CUTS = (0.2, 0.5, 0.8)
DEFAULT_EFFECT_GROUP_SIZE = 5

_BETA_EPS = 1e-12
_BETA_MAX_ITER = 500


class TrendClass(enum.Enum):
    INCREASING = "Increasing"
    DECREASING = "Decreasing"
    STABLE = "Stable"


class EffectBand(enum.Enum):
    NEGLIGIBLE = "Negligible"
    SMALL = "Small"
    MEDIUM = "Medium"
    LARGE = "Large"


# ---------------------------------------------------------------------------
# Special functions: regularized incomplete beta, t and F distributions
# ---------------------------------------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    logger.warning("incomplete beta continued fraction hit iteration cap")
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), evaluated to ~1e-12."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def f_sf(f: float, df1: int, df2: int) -> float:
    """Upper tail P(F >= f) of the F distribution."""
    if df1 <= 0 or df2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    x = df2 / (df2 + df1 * f)
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x)


# ---------------------------------------------------------------------------
# Per-feature statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OlsResult:
    slope: float
    intercept: float
    r_squared: float
    p_value: float


def ols_trend(y: Sequence[float]) -> OlsResult:
    """Least-squares line through (0, y0), (1, y1), ... with slope p-value.

    Constant input yields slope 0, R^2 0, p 1 by convention; an exact
    fit yields p 0.
    """
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if n < 3:
        raise ValueError("need at least 3 points")
    x = np.arange(n, dtype=np.float64)
    xd = x - x.mean()
    yd = y - y.mean()
    sxx = float(np.sum(xd * xd))
    sst = float(np.sum(yd * yd))
    if sst == 0.0:
        return OlsResult(slope=0.0, intercept=float(y[0]), r_squared=0.0, p_value=1.0)
    slope = float(np.sum(xd * yd) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    sse = float(np.sum(resid * resid))
    r_squared = 1.0 - sse / sst
    if sse <= 0.0 or r_squared >= 1.0:
        return OlsResult(slope=slope, intercept=intercept, r_squared=1.0, p_value=0.0)
    se = math.sqrt((sse / (n - 2)) / sxx)
    t = slope / se
    return OlsResult(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        p_value=t_two_sided_p(t, n - 2),
    )


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties resolved by averaging."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=np.float64)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        ranks[order[i : j + 1]] = avg
        i = j + 1
    return ranks


@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    p_value: float


def spearman(y: Sequence[float], exact: bool = False) -> SpearmanResult:
    """Rank correlation of y against its chronological position.

    Ties take average ranks; the p-value uses the t approximation
    t = rho * sqrt((n-2)/(1-rho^2)). ``exact=True`` switches to the
    permutation distribution (n <= 10 only).
    """
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if n < 3:
        raise ValueError("need at least 3 points")
    if np.all(y == y[0]):
        return SpearmanResult(rho=0.0, p_value=1.0)
    rx = np.arange(1, n + 1, dtype=np.float64)
    ry = average_ranks(y)
    rho = _rank_pearson(rx, ry)
    if exact:
        if n > 10:
            raise ValueError("exact permutation p-value limited to n <= 10")
        count = 0
        total = 0
        for perm in itertools.permutations(range(n)):
            r = _rank_pearson(rx, ry[list(perm)])
            if abs(r) >= abs(rho) - 1e-12:
                count += 1
            total += 1
        return SpearmanResult(rho=rho, p_value=count / total)
    if abs(rho) >= 1.0:
        return SpearmanResult(rho=float(np.sign(rho)), p_value=0.0)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return SpearmanResult(rho=rho, p_value=t_two_sided_p(t, n - 2))


def _rank_pearson(rx: np.ndarray, ry: np.ndarray) -> float:
    xd = rx - rx.mean()
    yd = ry - ry.mean()
    denom = math.sqrt(float(np.sum(xd * xd)) * float(np.sum(yd * yd)))
    if denom == 0.0:
        return 0.0
    return float(np.sum(xd * yd) / denom)


def cohens_d(early: Sequence[float], late: Sequence[float]) -> float:
    """Pooled-SD standardized mean difference, oriented late minus early."""
    a = np.asarray(early, dtype=np.float64)
    b = np.asarray(late, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise ValueError("each group needs at least 2 values")
    s1 = float(np.var(a, ddof=1))
    s2 = float(np.var(b, ddof=1))
    pooled = math.sqrt(((n1 - 1) * s1 + (n2 - 1) * s2) / (n1 + n2 - 2))
    diff = float(b.mean() - a.mean())
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0
        raise InfiniteEffectError("zero pooled SD with unequal means")
    return diff / pooled


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    p_value: float
    df_between: int
    df_within: int
    degenerate: bool = False  # zero within-group variance with separated means


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classical one-way between/within variance decomposition."""
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(arrays) < 2 or any(len(g) == 0 for g in arrays):
        raise ValueError("need at least 2 nonempty groups")
    all_values = np.concatenate(arrays)
    grand = float(all_values.mean())
    ssb = sum(len(g) * (float(g.mean()) - grand) ** 2 for g in arrays)
    ssw = sum(float(np.sum((g - g.mean()) ** 2)) for g in arrays)
    df1 = len(arrays) - 1
    df2 = len(all_values) - len(arrays)
    if ssw == 0.0:
        if ssb == 0.0:
            return AnovaResult(0.0, 1.0, df1, df2)
        return AnovaResult(math.inf, 0.0, df1, df2, degenerate=True)
    if df2 <= 0:
        raise ValueError("within-group degrees of freedom exhausted")
    f = (ssb / df1) / (ssw / df2)
    return AnovaResult(f, f_sf(f, df1, df2), df1, df2)


# ---------------------------------------------------------------------------
# Corpus-level structure: PCA and Ward clustering
# ---------------------------------------------------------------------------


@dataclass
class PcaResult:
    explained_variance_ratio: np.ndarray  # [component]
    loadings: np.ndarray  # [feature x component]
    scores: np.ndarray  # [text x component]
    feature_ids: list[str]
    dropped_features: list[str]
    eigenvalues: np.ndarray


def standardize_columns(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero-mean, unit-variance columns; returns (Z, keep mask)."""
    mean = data.mean(axis=0)
    sd = data.std(axis=0, ddof=1)
    keep = sd > 0
    z = (data[:, keep] - mean[keep]) / sd[keep]
    return z, keep


def pca(matrix: FeatureMatrix, k: Optional[int] = None) -> PcaResult:
    """PCA on the feature correlation matrix (texts are observations).

    Features are standardized first; constant features are dropped with
    a warning, correlation being undefined for them. Components come out
    sorted by eigenvalue, sign-fixed so the largest-magnitude loading is
    positive.
    """
    data = matrix.freq.T  # texts x features
    n_texts, n_features = data.shape
    if n_texts < 2 or n_features < 2:
        raise ValueError("need at least 2 texts and 2 features")
    z, keep = standardize_columns(data)
    kept_ids = [fid for fid, k_ in zip(matrix.features, keep) if k_]
    dropped = [fid for fid, k_ in zip(matrix.features, keep) if not k_]
    if dropped:
        logger.warning("pca: dropping %d zero-variance features: %s", len(dropped), dropped)
    if z.shape[1] < 2:
        raise ValueError("fewer than 2 non-constant features")
    corr = (z.T @ z) / (n_texts - 1)
    eigvals, eigvecs = np.linalg.eigh(corr)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    # Deterministic sign: largest-|loading| entry positive per component.
    for c in range(eigvecs.shape[1]):
        pivot = int(np.argmax(np.abs(eigvecs[:, c])))
        if eigvecs[pivot, c] < 0:
            eigvecs[:, c] = -eigvecs[:, c]
    rank = int(np.sum(eigvals > 1e-10 * max(eigvals[0], 1.0)))
    if k is None:
        k = rank
    elif k > rank:
        logger.warning("pca: k=%d exceeds rank %d; truncating", k, rank)
        k = rank
    total = float(eigvals.sum())
    ratios = eigvals[:k] / total if total > 0 else np.zeros(k)
    loadings = eigvecs[:, :k]
    scores = z @ loadings
    return PcaResult(
        explained_variance_ratio=ratios,
        loadings=loadings,
        scores=scores,
        feature_ids=kept_ids,
        dropped_features=dropped,
        eigenvalues=eigvals[:k],
    )


@dataclass(frozen=True)
class MergeStep:
    left: int  # node id: leaves are 0..n-1, merges n, n+1, ...
    right: int
    height: float
    size: int


@dataclass
class ClusterTree:
    merges: list[MergeStep]
    n_leaves: int
    text_ids: list[str]

    def cut(self, k: int) -> list[int]:
        """Flat cluster labels for a k-cluster cut.

        Labels are numbered by each cluster's lowest text index, so the
        assignment is deterministic.
        """
        if not 1 <= k <= self.n_leaves:
            raise ValueError(f"k must be in 1..{self.n_leaves}")
        members: dict[int, list[int]] = {i: [i] for i in range(self.n_leaves)}
        next_id = self.n_leaves
        for step in self.merges[: self.n_leaves - k]:
            members[next_id] = members.pop(step.left) + members.pop(step.right)
            next_id += 1
        clusters = sorted(members.values(), key=min)
        labels = [0] * self.n_leaves
        for label, leaf_list in enumerate(clusters):
            for leaf in leaf_list:
                labels[leaf] = label
        return labels


def cluster(matrix: FeatureMatrix) -> ClusterTree:
    """Agglomerative Ward clustering of texts on standardized features.

    Distances follow the Lance-Williams update on squared Euclidean
    distances; reported heights are their square roots. Ties break on
    the lowest text index involved.
    """
    data = matrix.freq.T  # texts x features
    n = data.shape[0]
    if n < 2:
        raise ValueError("need at least 2 texts")
    z, keep = standardize_columns(data)
    if not keep.any():
        # All-constant matrix: every pairwise distance is 0.
        z = np.zeros((n, 1))
    diff = z[:, None, :] - z[None, :, :]
    d2 = np.sum(diff * diff, axis=2)  # squared Euclidean
    active: dict[int, int] = {i: 1 for i in range(n)}  # node id -> size
    rep: dict[int, int] = {i: i for i in range(n)}  # node id -> lowest leaf
    dist: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(d2[i, j])
    merges: list[MergeStep] = []
    next_id = n
    while len(active) > 1:
        best_key: Optional[tuple[int, int]] = None
        best = (math.inf, math.inf, math.inf)
        for (i, j), d in dist.items():
            cand = (d, min(rep[i], rep[j]), max(rep[i], rep[j]))
            if cand < best:
                best = cand
                best_key = (i, j)
        assert best_key is not None
        i, j = best_key
        si, sj = active[i], active[j]
        merged_d2 = dist.pop((i, j))
        merges.append(
            MergeStep(left=i, right=j, height=math.sqrt(merged_d2), size=si + sj)
        )
        del active[i], active[j]
        new_rep = min(rep[i], rep[j])
        for k_ in list(active):
            sk = active[k_]
            dik = dist.pop((min(i, k_), max(i, k_)))
            djk = dist.pop((min(j, k_), max(j, k_)))
            # Ward update on squared distances.
            dnew = (
                (si + sk) * dik + (sj + sk) * djk - sk * merged_d2
            ) / (si + sj + sk)
            dist[(k_, next_id)] = dnew
        active[next_id] = si + sj
        rep[next_id] = new_rep
        next_id += 1
    return ClusterTree(merges=merges, n_leaves=n, text_ids=list(matrix.texts))


# ---------------------------------------------------------------------------
# Trend classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrendStats:
    feature_id: str
    r_squared: float
    slope: float
    p_regression: float
    spearman_rho: float
    p_spearman: float
    cohens_d: float
    effect_band: EffectBand
    trend_class: TrendClass
    all_zero: bool = False

    def to_row(self) -> dict:
        return {
            "feature_id": self.feature_id,
            "r_squared": self.r_squared,
            "slope": self.slope,
            "p_regression": self.p_regression,
            "spearman_rho": self.spearman_rho,
            "p_spearman": self.p_spearman,
            "cohens_d": self.cohens_d,
            "effect_band": self.effect_band.value,
            "trend_class": self.trend_class.value,
            "all_zero": self.all_zero,
        }


def effect_band(d: float) -> EffectBand:
    a = abs(d)
    if a < EFFECT_CUTS[0]:
        return EffectBand.NEGLIGIBLE
    if a < EFFECT_CUTS[1]:
        return EffectBand.SMALL
    if a < EFFECT_CUTS[2]:
        return EffectBand.MEDIUM
    return EffectBand.LARGE


def classify_trends(
    matrix: FeatureMatrix,
    effect_group_size: int = DEFAULT_EFFECT_GROUP_SIZE,
    alpha: float = SIGNIFICANCE_LEVEL,
) -> list[TrendStats]:
    """Per-feature trend bundle over a chrono-ordered matrix.

    The effect size compares the earliest and latest ``effect_group_size``
    texts (clamped to half the corpus). A feature is Increasing or
    Decreasing only when both p-values clear ``alpha`` (dual rule); the
    slope sign picks the direction.
    """
    n_texts = len(matrix.texts)
    if n_texts < 4:
        raise ValueError("need at least 4 texts for trend statistics")
    group = min(effect_group_size, n_texts // 2)
    out: list[TrendStats] = []
    for i, fid in enumerate(matrix.features):
        y = matrix.freq[i, :]
        all_zero = bool(np.all(y == 0))
        ols = ols_trend(y)
        sp = spearman(y)
        early = y[:group]
        late = y[-group:]
        try:
            d = cohens_d(early, late)
        except InfiniteEffectError:
            d = math.copysign(math.inf, float(late.mean() - early.mean()))
        if ols.p_value < alpha and sp.p_value < alpha and ols.slope != 0:
            trend = TrendClass.INCREASING if ols.slope > 0 else TrendClass.DECREASING
        else:
            trend = TrendClass.STABLE
        out.append(
            TrendStats(
                feature_id=fid,
                r_squared=ols.r_squared,
                slope=ols.slope,
                p_regression=ols.p_value,
                spearman_rho=sp.rho,
                p_spearman=sp.p_value,
                cohens_d=d,
                effect_band=effect_band(d) if math.isfinite(d) else EffectBand.LARGE,
                trend_class=trend,
                all_zero=all_zero,
            )
        )
    return out
