"""Finite sections of the diagonal group ``e^{A_k t}`` on l_p(Delta^k).

In coefficient coordinates the group is diagonal, ``c_n -> e^{i t f(n)} c_n``.
Conjugating into l_p through ``y = Delta^k c`` gives

    M_t = Delta^k  D_t  Sigma^k,        (D_t)_{nn} = e^{i t f(n)}.

All three factors are lower triangular, so the N-section of the product is the
product of the N-sections.  ``M_{t,N}`` is therefore the exact compression of
the infinite operator to ``span{e_1..e_N}`` and ``||M_{t,N}||`` is a lower
bound for ``||e^{A_k t}||`` that is non-decreasing in N.

The action is evaluated without forming ``Sigma^k`` explicitly against large
cancellation: writing ``d_{n-r} = d_n + (d_{n-r} - d_n)``,

    (M_t y)_n = d_n y_n + sum_{r=1}^{k} (-1)^r C(k,r) (d_{n-r} - d_n) (Sigma^k y)_{n-r},

and ``d_{n-r} - d_n = d_n expm1(i t (f(n-r) - f(n)))`` with the profile
difference taken from :meth:`SpectralFn.diff`.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .norms import DENSE_LIMIT, NormBounds, section_norm
from .sequences import DiffSpaceSpec, as_sequence, delta, lp_norm
from .spectral import SpectralFn

MAX_SECTION = 16384


@dataclass(frozen=True)
class OperatorSection:
    entries: np.ndarray = field(repr=False)
    provenance: str
    N: int


@dataclass(frozen=True)
class GroupNormRow:
    N: int
    t: float
    lower: float
    upper: float
    converged: bool = True


@dataclass
class GroupNormCurve:
    f: SpectralFn
    k: int
    p: float
    rows: list[GroupNormRow]

    def at(self, t: float) -> list[GroupNormRow]:
        return [r for r in self.rows if r.t == t]


def _check_size(N):
    if int(N) != N or N < 1:
        raise ValueError(f"section size must be a positive integer, got {N!r}")
    if N > MAX_SECTION:
        gib = 16 * N * N / 2**30
        raise ValueError(
            f"section size N={N} exceeds the dense budget {MAX_SECTION} "
            f"(a complex {N}x{N} section needs {gib:.1f} GiB)"
        )
    return int(N)


def _factors(f: SpectralFn, t: float, k: int, N: int):
    if f.length is not None and f.length < N:
        raise ValueError(f"table profile supplies {f.length} values, section needs {N}")
    n = np.arange(1, N + 1, dtype=np.float64)
    d = np.exp(1j * t * f(n))
    weights = []
    for r in range(1, k + 1):
        w = np.zeros(N, dtype=np.complex128)
        if r < N:
            cur = n[r:]
            w[r:] = (-1) ** r * math.comb(k, r) * d[r:] * np.expm1(1j * t * f.diff(cur - r, cur))
        weights.append(w)
    return d, weights


class _GroupAction:
    """Exact action of ``M_{t,N}`` and its adjoint on vectors or column blocks."""

    def __init__(self, f, t, k, N):
        self.k, self.N = k, N
        self.d, self.w = _factors(f, t, k, N)

    def _col(self, v, Y):
        return v if Y.ndim == 1 else v[:, None]

    def matvec(self, Y):
        Y = np.asarray(Y, dtype=np.complex128)
        out = self._col(self.d, Y) * Y
        if self.k == 0:
            return out
        s = Y
        for _ in range(self.k):
            s = np.cumsum(s, axis=0)
        for r, w in enumerate(self.w, start=1):
            if r < self.N:
                out[r:] += self._col(w[r:], Y) * s[:-r]
        return out

    def rmatvec(self, Z):
        Z = np.asarray(Z, dtype=np.complex128)
        out = self._col(self.d.conj(), Z) * Z
        if self.k == 0:
            return out
        acc = np.zeros_like(Z)
        for r, w in enumerate(self.w, start=1):
            if r < self.N:
                acc[:-r] += self._col(w[r:].conj(), Z) * Z[r:]
        for _ in range(self.k):
            acc = np.cumsum(acc[::-1], axis=0)[::-1]
        return out + acc


def group_operator(f: SpectralFn, t: float, spec: DiffSpaceSpec, N: int) -> LinearOperator:
    """Matrix-free ``M_{t,N}`` (O(kN) per product, no N^2 storage)."""
    if int(N) != N or N < 1:
        raise ValueError(f"section size must be a positive integer, got {N!r}")
    act = _GroupAction(f, float(t), spec.k, int(N))
    return LinearOperator(
        (N, N),
        matvec=lambda y: act.matvec(np.ravel(y)),
        rmatvec=lambda z: act.rmatvec(np.ravel(z)),
        matmat=act.matvec,
        rmatmat=act.rmatvec,
        dtype=np.complex128,
    )


def group_section(f: SpectralFn, t: float, spec: DiffSpaceSpec, N: int) -> OperatorSection:
    """Dense N x N section of ``Delta^k D_t Sigma^k``."""
    N = _check_size(N)
    act = _GroupAction(f, float(t), spec.k, N)
    entries = np.tril(act.matvec(np.eye(N, dtype=np.complex128)))
    return OperatorSection(
        entries=entries,
        provenance=f"Delta^{spec.k} . diag(exp(i*{float(t)!r}*{f.label}(n))) . Sigma^{spec.k}",
        N=N,
    )


def group_norm(f: SpectralFn, t: float, spec: DiffSpaceSpec, N: int) -> NormBounds:
    """Bounds on ``||M_{t,N}||_{p->p}`` (equal for p = 2)."""
    if spec.k == 0 or float(t) == 0.0:
        # unimodular diagonal: its norm is exactly 1 for every p
        return NormBounds(1.0, 1.0)
    if spec.p == 2 and N > DENSE_LIMIT:
        return section_norm(group_operator(f, t, spec, N), 2.0)
    return section_norm(group_section(f, t, spec, N), spec.p)


def _row(args):
    f, spec, N, t = args
    b = group_norm(f, t, spec, N)
    return GroupNormRow(N=int(N), t=float(t), lower=b.lower, upper=b.upper, converged=b.converged)


def group_norm_curve(f: SpectralFn, spec: DiffSpaceSpec, N_grid, t_grid, workers: int = 1) -> GroupNormCurve:
    """Section norms over the full product of ``N_grid`` x ``t_grid``.

    Rows come back in grid order (N outer, t inner) regardless of ``workers``.
    """
    N_grid = [int(n) for n in N_grid]
    t_grid = [float(t) for t in t_grid]
    if not N_grid or not t_grid:
        raise ValueError("N grid and t grid must be non-empty")
    if any(b <= a for a, b in zip(N_grid, N_grid[1:])):
        raise ValueError("N grid must be strictly ascending")
    jobs = [(f, spec, N, t) for N in N_grid for t in t_grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs))
    else:
        rows = [_row(j) for j in jobs]
    return GroupNormCurve(f=f, k=spec.k, p=spec.p, rows=rows)


def growth_bound_estimate(f: SpectralFn, spec: DiffSpaceSpec, N: int, t_grid, workers: int = 1) -> float:
    """``max ln(upper)/t`` over the three largest times of the grid."""
    t_grid = [float(t) for t in t_grid]
    if not t_grid or any(t <= 0 for t in t_grid):
        raise ValueError("growth-bound times must be positive")
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("growth-bound times must be increasing")
    if t_grid[-1] < 50:
        raise ValueError(f"growth-bound grid must reach t >= 50, got max {t_grid[-1]}")
    tail = t_grid[-3:]
    curve = group_norm_curve(f, spec, [N], tail, workers=workers)
    return max(math.log(r.upper) / r.t for r in curve.rows)


def strong_continuity_probe(x, f: SpectralFn, spec: DiffSpaceSpec, t_seq) -> list[float]:
    """``||e^{A_k t} x - x||`` in l_p(Delta^k) for each ``t``; ``x`` in coefficient coordinates."""
    c = as_sequence(x).astype(np.complex128)
    n = np.arange(1, c.size + 1, dtype=np.float64)
    if f.length is not None and f.length < c.size:
        raise ValueError(f"table profile supplies {f.length} values, sequence needs {c.size}")
    fn = f(n)
    out = []
    for t in t_seq:
        moved = np.expm1(1j * float(t) * fn) * c
        out.append(lp_norm(delta(moved, spec.k), spec.p))
    return out


def cesaro_rate_section(p: float, N: int) -> OperatorSection:
    """Lower-triangular section whose row n is filled with ``n^{1/p - 1}``."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    N = _check_size(N)
    n = np.arange(1, N + 1, dtype=np.float64)
    entries = np.tril(np.ones((N, N))) * (n ** (1.0 / p - 1.0))[:, None]
    return OperatorSection(entries=entries, provenance=f"rows n^(1/{p:g}-1), lower triangular", N=N)


def cesaro_constant_bound(p: float, N: int) -> float:
    """``||A 1||_p / ||1||_p = ((N+1)/2)^{1/p}`` for :func:`cesaro_rate_section`."""
    n = np.arange(1, N + 1, dtype=np.float64)
    return (math.fsum(n) / N) ** (1.0 / p)


def eigen_residual(f: SpectralFn, t: float, spec: DiffSpaceSpec, N: int, n: int) -> float:
    """``max |M_t y - e^{itf(n)} y|`` for ``y`` the coordinates of ``e_n`` (``y = Delta^k e_n``)."""
    e = np.zeros(N)
    e[n - 1] = 1.0
    y = delta(e, spec.k).astype(np.complex128)
    act = _GroupAction(f, float(t), spec.k, N)
    lam = np.exp(1j * float(t) * f(np.array([float(n)])))[0]
    return float(np.abs(act.matvec(y) - lam * y).max())
