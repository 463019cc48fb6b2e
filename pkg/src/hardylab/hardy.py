"""Discrete Hardy inequality at finite truncation.

For ``p > 1`` and nonnegative ``a``::

    sum_n ((1/n) sum_{m<=n} a_m)^p  <=  (p/(p-1))^p  sum_n a_n^p

Both sides are evaluated on ``a_1 .. a_N``.  Truncating the left side can only
lower it, so every reported ratio is a statement "at truncation N".
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sequences import as_sequence, prefix_sum

COMPENSATION_THRESHOLD = 100_000


@dataclass(frozen=True)
class HardyReport:
    lhs: float
    rhs: float
    ratio: float
    p: float
    N: int
    eps: float | None = None


def hardy_constant(p: float) -> float:
    """The sharp constant ``(p/(p-1))^p``."""
    if not p > 1:
        raise ValueError(f"Hardy constant needs p > 1, got {p!r}")
    return (p / (p - 1.0)) ** p


def hardy_sides(a, p: float) -> HardyReport:
    """Evaluate both sides of the inequality for the finite sequence ``a``."""
    const = hardy_constant(p)
    a = as_sequence(a)
    if a.dtype.kind == "c":
        raise ValueError("Hardy sides need a real, nonnegative sequence")
    a = a.astype(np.float64)
    if np.any(a < 0):
        raise ValueError("Hardy sides need a nonnegative sequence")
    N = a.size
    n = np.arange(1, N + 1, dtype=np.float64)
    s = prefix_sum(a, compensated=N >= COMPENSATION_THRESHOLD)
    lhs = math.fsum((s / n) ** p)
    rhs = const * math.fsum(a**p)
    ratio = lhs / rhs if rhs > 0 else 0.0
    return HardyReport(lhs=lhs, rhs=rhs, ratio=ratio, p=float(p), N=N)


def near_extremal(p: float, eps: float, N: int) -> np.ndarray:
    """The family ``a_n = n^{-(1+eps)/p}``, which approaches equality as eps -> 0."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    n = np.arange(1, N + 1, dtype=np.float64)
    return n ** (-(1.0 + eps) / p)


def hardy_sharpness_sweep(p: float, eps_grid, N: int) -> list[HardyReport]:
    """Hardy ratios of the near-extremal family over a grid of eps values."""
    eps_grid = list(eps_grid)
    if not eps_grid:
        raise ValueError("eps grid is empty")
    if N < 1000:
        raise ValueError(f"sweep needs N >= 1000, got {N}")
    hardy_constant(p)
    reports = []
    for eps in eps_grid:
        r = hardy_sides(near_extremal(p, eps, N), p)
        reports.append(HardyReport(r.lhs, r.rhs, r.ratio, r.p, r.N, eps=float(eps)))
    return reports
