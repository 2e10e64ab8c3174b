"""Brute-force reference implementations for differential testing.

Everything here deliberately re-derives results through a different
route than the production modules: the scanner re-evaluates every
(token, pattern) pair naively, least squares goes through explicit
normal equations, ranks come from sorted-position averaging, symmetric
eigenvalues from a cyclic Jacobi sweep, and t/F tail probabilities from
adaptive quadrature of the explicit densities. No numerical kernel is
shared with the production code.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .corpus import TextDocument
from .errors import OracleScopeError
from .patterns import PatternCatalog

MAX_ORACLE_N = 50
MAX_ORACLE_DIM = 8


# ---------------------------------------------------------------------------
# Naive contextual scanner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BruteMatch:
    feature_id: str
    text_id: str
    word_index: int
    confidence: float


def brute_scan(
    corpus: Sequence[TextDocument],
    catalog: PatternCatalog,
    window: int = 20,
) -> list[BruteMatch]:
    """Naive re-evaluation of every (token, pattern) pair.

    O(tokens x patterns x window); no memoization, no shared helpers.
    """
    out: list[BruteMatch] = []
    compiled = [
        (
            p.feature_id,
            re.compile(p.base_regex),
            [re.compile(s) for s in p.positive_contexts],
            [re.compile(s) for s in p.negative_contexts],
        )
        for p in catalog.patterns
    ]
    for doc in sorted(corpus, key=lambda d: d.chrono_index):
        words = [t.surface for t in doc.tokens]
        for idx in range(len(words)):
            for fid, base, pos_rx, neg_rx in compiled:
                m = base.fullmatch(words[idx])
                if m is None:
                    continue
                lo = idx - window if idx - window > 0 else 0
                ctx = " ".join(words[lo : idx + window + 1])
                p_hits = 0
                for rx in pos_rx:
                    if rx.search(ctx) is not None:
                        p_hits += 1
                n_hits = 0
                for rx in neg_rx:
                    if rx.search(ctx) is not None:
                        n_hits += 1
                conf = 0.6 + 0.2 * p_hits - 0.3 * n_hits
                if conf > 0.95:
                    conf = 0.95
                if conf < 0.1:
                    conf = 0.1
                if conf >= 0.4:
                    out.append(
                        BruteMatch(
                            feature_id=fid,
                            text_id=doc.id,
                            word_index=idx,
                            confidence=conf,
                        )
                    )
    return out


def brute_frequencies(
    corpus: Sequence[TextDocument],
    catalog: PatternCatalog,
    window: int = 20,
) -> dict[tuple[str, str], float]:
    """(feature_id, text_id) -> per-1,000-word retained match frequency."""
    counts: dict[tuple[str, str], int] = {}
    for m in brute_scan(corpus, catalog, window):
        counts[(m.feature_id, m.text_id)] = counts.get((m.feature_id, m.text_id), 0) + 1
    tokens = {d.id: len(d.tokens) for d in corpus}
    return {
        (fid, d.id): (
            1000.0 * counts.get((fid, d.id), 0) / tokens[d.id] if tokens[d.id] else 0.0
        )
        for fid in (p.feature_id for p in catalog.patterns)
        for d in corpus
    }


# ---------------------------------------------------------------------------
# Distribution tails via quadrature of explicit densities
# ---------------------------------------------------------------------------


def _check_n(n: int) -> None:
    if n > MAX_ORACLE_N:
        raise OracleScopeError(f"oracle supports n <= {MAX_ORACLE_N}, got {n}")


def t_pdf(x: float, df: float) -> float:
    lognum = math.lgamma((df + 1) / 2) - math.lgamma(df / 2)
    return math.exp(lognum) / math.sqrt(df * math.pi) * (1 + x * x / df) ** (
        -(df + 1) / 2
    )


def t_cdf_quad(x: float, df: float) -> float:
    """Student-t CDF by adaptive quadrature from 0 plus symmetry."""
    if x == 0.0:
        return 0.5
    area, _ = quad(t_pdf, 0.0, abs(x), args=(df,), epsabs=1e-13, epsrel=1e-13)
    return 0.5 + area if x > 0 else 0.5 - area


def t_two_sided_p_quad(t: float, df: float) -> float:
    return 2.0 * (1.0 - t_cdf_quad(abs(t), df))


def f_pdf(x: float, d1: float, d2: float) -> float:
    if x <= 0:
        return 0.0
    logb = (
        math.lgamma(d1 / 2) + math.lgamma(d2 / 2) - math.lgamma((d1 + d2) / 2)
    )
    lognum = (
        (d1 / 2) * math.log(d1 / d2)
        + (d1 / 2 - 1) * math.log(x)
        - ((d1 + d2) / 2) * math.log(1 + d1 * x / d2)
    )
    return math.exp(lognum - logb)


def f_sf_quad(f: float, d1: float, d2: float) -> float:
    """Upper tail of the F distribution by quadrature to infinity."""
    if f <= 0:
        return 1.0
    area, _ = quad(f_pdf, f, np.inf, args=(d1, d2), epsabs=1e-13, epsrel=1e-13)
    return min(1.0, max(0.0, area))


# ---------------------------------------------------------------------------
# Reference statistics
# ---------------------------------------------------------------------------


def ref_ols(y: Sequence[float]) -> dict:
    """Simple regression via explicit normal equations."""
    y = list(map(float, y))
    n = len(y)
    _check_n(n)
    x = list(range(n))
    # Normal equations [[n, Sx], [Sx, Sxx]] [a, b]^T = [Sy, Sxy]^T
    sx = sum(x)
    sxx = sum(v * v for v in x)
    sy = sum(y)
    sxy = sum(a * b for a, b in zip(x, y))
    det = n * sxx - sx * sx
    intercept = (sy * sxx - sx * sxy) / det
    slope = (n * sxy - sx * sy) / det
    fitted = [intercept + slope * v for v in x]
    sse = sum((a - b) ** 2 for a, b in zip(y, fitted))
    mean_y = sy / n
    sst = sum((v - mean_y) ** 2 for v in y)
    if sst == 0:
        return {"slope": 0.0, "intercept": mean_y, "r_squared": 0.0, "p_value": 1.0}
    r2 = 1 - sse / sst
    if sse <= 0 or r2 >= 1:
        return {"slope": slope, "intercept": intercept, "r_squared": 1.0, "p_value": 0.0}
    var_slope = (sse / (n - 2)) / (sxx - sx * sx / n)
    t = slope / math.sqrt(var_slope)
    return {
        "slope": slope,
        "intercept": intercept,
        "r_squared": r2,
        "p_value": t_two_sided_p_quad(t, n - 2),
    }


def ref_ranks(values: Sequence[float]) -> list[float]:
    """Average ranks from sorted positions, quadratic and explicit."""
    vals = list(map(float, values))
    sorted_vals = sorted(vals)
    ranks = []
    for v in vals:
        positions = [i + 1 for i, s in enumerate(sorted_vals) if s == v]
        ranks.append(sum(positions) / len(positions))
    return ranks


def ref_spearman(y: Sequence[float]) -> dict:
    y = list(map(float, y))
    n = len(y)
    _check_n(n)
    if all(v == y[0] for v in y):
        return {"rho": 0.0, "p_value": 1.0}
    rx = [float(i + 1) for i in range(n)]
    ry = ref_ranks(y)
    mx = sum(rx) / n
    my = sum(ry) / n
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(
        sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry)
    )
    rho = num / den
    if abs(rho) >= 1.0:
        return {"rho": math.copysign(1.0, rho), "p_value": 0.0}
    t = rho * math.sqrt((n - 2) / (1 - rho * rho))
    return {"rho": rho, "p_value": t_two_sided_p_quad(t, n - 2)}


def ref_cohens_d(early: Sequence[float], late: Sequence[float]) -> float:
    a = list(map(float, early))
    b = list(map(float, late))
    _check_n(len(a) + len(b))
    ma = sum(a) / len(a)
    mb = sum(b) / len(b)
    va = sum((v - ma) ** 2 for v in a) / (len(a) - 1)
    vb = sum((v - mb) ** 2 for v in b) / (len(b) - 1)
    pooled = math.sqrt(((len(a) - 1) * va + (len(b) - 1) * vb) / (len(a) + len(b) - 2))
    if pooled == 0:
        if ma == mb:
            return 0.0
        raise OracleScopeError("reference d undefined: zero pooled SD, unequal means")
    return (mb - ma) / pooled


def ref_anova(groups: Sequence[Sequence[float]]) -> dict:
    gs = [list(map(float, g)) for g in groups]
    total_n = sum(len(g) for g in gs)
    _check_n(total_n)
    grand = sum(sum(g) for g in gs) / total_n
    ssb = sum(len(g) * (sum(g) / len(g) - grand) ** 2 for g in gs)
    ssw = sum(sum((v - sum(g) / len(g)) ** 2 for v in g) for g in gs)
    df1 = len(gs) - 1
    df2 = total_n - len(gs)
    if ssw == 0:
        if ssb == 0:
            return {"f": 0.0, "p_value": 1.0}
        return {"f": math.inf, "p_value": 0.0}
    f = (ssb / df1) / (ssw / df2)
    return {"f": f, "p_value": f_sf_quad(f, df1, df2)}


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition for small symmetric matrices.

    Returns (eigenvalues descending, eigenvectors as columns).
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    if n > MAX_ORACLE_DIM:
        raise OracleScopeError(f"jacobi oracle supports dims <= {MAX_ORACLE_DIM}")
    if a.shape != (n, n) or not np.allclose(a, a.T, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < tol / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1)
                )
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    eig = np.diag(a).copy()
    order = np.argsort(eig)[::-1]
    return eig[order], v[:, order]
