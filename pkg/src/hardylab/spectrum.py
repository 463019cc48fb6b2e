"""Hypothesis checks on the spectrum: uniform gap, K-set decomposition,
S_k membership, the geometric condition and the sqrt(n)-rate test.

A finite grid can never prove a limit.  Every verdict here is evidence on the
grid and is phrased that way ("consistent-with-membership", not "member").
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .spectral import SpectralFn

CONSISTENT = "consistent-with-membership"
INCONSISTENT = "inconsistent"
GROWTH_FACTOR = 10.0


@dataclass
class GapReport:
    inf_gap: float
    K: int
    delta: float
    per_class_gaps: list[float]
    decomposable_at_threshold: bool
    first_conflict: int | None = None


@dataclass
class SkReport:
    k: int
    j_values: list[int]
    n_grid: np.ndarray
    beta_table: dict[int, np.ndarray]
    tail_sup: dict[int, float]
    head_sup: dict[int, float]
    verdict: str


def _values(lam, N=None):
    lam = np.asarray(lam)
    if lam.ndim != 1:
        raise ValueError("spectrum must be a 1-D sequence")
    if N is not None:
        if N < 2:
            raise ValueError(f"need N >= 2, got {N}")
        if lam.size < N:
            raise ValueError(f"spectrum has {lam.size} values, truncation needs {N}")
        lam = lam[:N]
    if not np.all(np.isfinite(lam)):
        raise ValueError("spectrum has non-finite values")
    return lam


def uniform_gap(lam, N: int | None = None) -> float:
    """``inf_{n != m} |lam_n - lam_m|`` over the first ``N`` values.

    Real input: sort and scan adjacent differences.  Complex input: nearest
    neighbour distances in the plane.  Repeated values give 0.
    """
    lam = _values(lam, N if N is not None else max(2, len(lam)))
    if np.iscomplexobj(lam):
        pts = np.column_stack([lam.real, lam.imag])
        dist, _ = cKDTree(pts).query(pts, k=2)
        return float(dist[:, 1].min())
    return float(np.diff(np.sort(lam)).min())


def k_decompose(lam, K: int, delta: float) -> GapReport:
    """Can the sorted points be split into K classes with within-class gaps >= delta?

    Points are assigned in order, each to the class whose last point is
    oldest, provided it is at least ``delta`` away.  On a line this first-fit
    rule is exact: the conflict graph of "closer than delta" is an interval
    graph, the rule colours it with as many classes as its largest clique, and
    it fails exactly when some window shorter than ``delta`` holds more than K
    points.  A point that fits nowhere is still placed (in its oldest class) so
    the per-class gaps of the whole sequence can be reported.
    """
    if int(K) != K or K < 1:
        raise ValueError(f"class count K must be a positive integer, got {K!r}")
    if not delta > 0:
        raise ValueError(f"gap threshold must be positive, got {delta!r}")
    lam = np.asarray(lam)
    if np.iscomplexobj(lam):
        if np.any(lam.real != 0):
            warnings.warn("complex spectrum projected onto the imaginary axis", stacklevel=2)
        lam = lam.imag
    lam = _values(lam)
    if np.any(np.diff(lam) < 0):
        raise ValueError("k_decompose needs values sorted ascending")
    K = int(K)
    last = [None] * K
    gaps = [math.inf] * K
    feasible, conflict, slot = True, None, 0
    for i, v in enumerate(lam):
        c = slot % K
        slot += 1
        if last[c] is not None:
            g = float(v - last[c])
            if g < delta and feasible:
                feasible, conflict = False, i
            gaps[c] = min(gaps[c], g)
        last[c] = v
    inf_gap = float(np.diff(lam).min()) if lam.size > 1 else math.inf
    return GapReport(inf_gap, K, float(delta), gaps, feasible, conflict)


def _tail(n_max):
    lo = max(1, n_max // 10)
    return np.arange(lo, n_max + 1, dtype=np.float64)


def _log_grid(lo, hi, per_decade=200):
    count = max(2, int(per_decade * math.log10(hi / lo)) + 1)
    decades = [10**e for e in range(int(math.log10(lo)) + 1, int(math.log10(hi)) + 1)]
    g = np.unique(np.r_[np.round(np.geomspace(lo, hi, count)).astype(np.int64), decades, lo, hi])
    return g[(g >= lo) & (g <= hi)].astype(np.float64)


def sk_membership(f: SpectralFn, k: int, n_max: int = 10**6) -> SkReport:
    """Tabulate ``beta_{k,j}(n) = n^k (f(n-j) - f(n))`` for j = 1..k.

    Rule: the grid runs from ``k+1`` to ``n_max``; ``head_sup`` is the sup of
    ``|beta|`` over its first decade and ``tail_sup`` over its last.  The
    verdict is inconsistent iff some ``tail_sup`` exceeds ``10 * head_sup``.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"order k must be a positive integer, got {k!r}")
    if n_max < 1000:
        raise ValueError(f"S_k check needs n_max >= 1000, got {n_max}")
    if f.length is not None and f.length < n_max:
        raise ValueError(f"table profile supplies {f.length} values, grid needs {n_max}")
    k = int(k)
    n0 = k + 1
    grid = _log_grid(n0, n_max)
    table, tail_sup, head_sup = {}, {}, {}
    head = grid <= 10 * n0
    tail = grid >= n_max / 10
    for j in range(1, k + 1):
        beta = grid**k * f.diff(grid - j, grid)
        table[j] = beta
        tail_sup[j] = float(np.abs(beta[tail]).max())
        head_sup[j] = float(np.abs(beta[head]).max())
    bad = any(tail_sup[j] > GROWTH_FACTOR * head_sup[j] for j in table)
    return SkReport(k, list(table), grid, table, tail_sup, head_sup, INCONSISTENT if bad else CONSISTENT)


def geometric_condition(f: SpectralFn, n_max: int = 10**6) -> tuple[bool, bool]:
    """``(f -> +inf, |f(n+1) - f(n)| -> 0)`` as seen on ``1..n_max``.

    The first flag asks that the last decade rise above every earlier value.
    The second asks that the adjacent step at ``n_max`` is below 1e-3 and that
    steps over the last decade are no larger than over the decade before.
    """
    if n_max < 1000:
        raise ValueError(f"geometric condition needs n_max >= 1000, got {n_max}")
    n = np.arange(1, n_max + 1, dtype=np.float64)
    fn = f(n)
    cut = n_max // 10
    rising = bool(fn[cut:].max() > fn[: cut - 1].max())
    steps = np.abs(f.diff(n[1:], n[:-1]))
    last, prev = steps[cut - 1 :], steps[cut // 10 - 1 : cut - 1]
    shrinking = bool(steps[-1] < 1e-3 and last.max() <= prev.max())
    return rising, shrinking


def rate_check(f: SpectralFn, p: float = 2.0, n_max: int = 10**6) -> float:
    """``min n^{-1/p} |f(n)|`` over the last decade of ``1..n_max``.

    A value bounded away from zero flags the regime where the group fails to
    exist.
    """
    if n_max < 1000:
        raise ValueError(f"rate check needs n_max >= 1000, got {n_max}")
    n = _tail(n_max)
    return float(np.min(np.abs(f(n)) * n ** (-1.0 / p)))
