"""The systems phi_n^k = (I-T)^k e_n, their biorthogonal families, and
certificates that {e_n} is not a basis of l_p(Delta^k).

All vectors are coordinate arrays of length ``N`` with 1-based index ``n``.
``phi`` is written in the coordinates of {e_n}, ``psi`` in the coordinates of
the biorthogonal functionals {e_n^*}, so ``<phi, psi>`` is the Euclidean
pairing in every basis model.

Every operator involved is lower triangular (or, for the functionals, upper
triangular with finite support), hence finite sections compose exactly and the
projection norms below are exact section values, not approximations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import EQUIVALENCE_CONSTANTS, BasisModel
from .norms import NormBounds, section_norm
from .sequences import DiffSpaceSpec, MAX_ORDER, delta, lp_norm, sigma


def _check(n, k, N):
    for name, v in (("n", n), ("N", N)):
        if int(v) != v or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")
    if int(k) != k or not 0 <= k <= MAX_ORDER:
        raise ValueError(f"order k must be an integer in [0, {MAX_ORDER}], got {k!r}")
    return int(n), int(k), int(N)


def binomial_energy(k: int) -> int:
    """``sum_j C(k,j)^2 = C(2k,k)``, the squared coordinate norm of phi_n^k."""
    return sum(math.comb(k, j) ** 2 for j in range(k + 1))


def phi(n: int, k: int, N: int) -> np.ndarray:
    """Coordinates of ``(I-T)^k e_n``: the alternating binomial row at n..n+k."""
    n, k, N = _check(n, k, N)
    if n + k > N:
        raise ValueError(f"phi_{n}^{k} needs n + k <= N, got n + k = {n + k} > N = {N}")
    out = np.zeros(N)
    out[n - 1 : n + k] = [(-1) ** j * math.comb(k, j) for j in range(k + 1)]
    return out


def _suffix_sums(a, k):
    for _ in range(k):
        a = np.cumsum(a[::-1])[::-1]
    return a


def _exact_dtype(N, k):
    # entries of Sigma^k psi stay below C(N+k, k)^2; beyond int64 fall back to Python ints
    return np.int64 if math.comb(N + k, k) ** 2 < 2**62 else object


def _psi_exact(n, k, N):
    e = np.zeros(N, dtype=_exact_dtype(N, k))
    e[n - 1] = 1
    return _suffix_sums(e, k)


def psi(n: int, k: int, N: int) -> np.ndarray:
    """Coordinates (w.r.t. {e_j^*}) of ``(I-T^*)^{-k} e_n^*``.

    These are the k-fold nested sums: for k = 1 the indicator of ``j <= n``,
    for k = 2 the ramp ``n - j + 1`` on ``j <= n``.
    """
    n, k, N = _check(n, k, N)
    if n > N:
        raise ValueError(f"psi_{n}^{k} needs n <= N = {N}")
    return _psi_exact(n, k, N).astype(np.float64)


def chi(n: int, k: int, N: int) -> np.ndarray:
    """Canonical-model coordinates of ``(I-T)^{-k}(I-T^*)^{-k} e_n^*`` on the N-section.

    Returned as an exact integer array: the entries grow like ``N^{2k}`` and a
    floating-point round trip through ``Delta^k`` would lose the small ones.
    """
    n, k, N = _check(n, k, N)
    if n > N:
        raise ValueError(f"chi_{n} needs n <= N = {N}")
    return sigma(_psi_exact(n, k, N), k)


def hk_inner(x, y, k: int) -> complex:
    """Canonical-model inner product ``<Delta^k x, Delta^k y>``."""
    dx = delta(np.asarray(x, dtype=np.complex128), k)
    dy = delta(np.asarray(y, dtype=np.complex128), k)
    return complex(np.vdot(dy, dx))


def gram_psi_phi(k: int, N: int) -> np.ndarray:
    """Matrix ``[<phi_j, psi_i>]`` for ``i, j <= N - k``."""
    m = N - k
    Phi = np.column_stack([phi(j, k, N) for j in range(1, m + 1)])
    Psi = np.column_stack([psi(i, k, N) for i in range(1, m + 1)])
    return Psi.T @ Phi


def gram_e_chi(k: int, N: int) -> np.ndarray:
    """Matrix ``[<e_n, chi_j>_k]`` for ``n, j <= N`` in the canonical model."""
    E = np.eye(N, dtype=np.int64)
    X = np.column_stack([chi(j, k, N) for j in range(1, N + 1)])
    dE = np.column_stack([delta(col, k) for col in E.T])
    dX = np.column_stack([delta(col, k) for col in X.T])
    return (dX.T @ dE).astype(np.float64)


def projection_section(Nproj: int, k: int, Nsec: int) -> np.ndarray:
    """N-section of ``Delta^k P_N Sigma^k``, the partial-sum projection in l_p coordinates.

    ``P_N`` keeps the first ``Nproj`` coefficients, because ``<x, chi_n>_k = c_n``.
    Columns past ``Nproj`` vanish and rows past ``Nproj + k`` vanish, so the
    section is exact once ``Nsec >= Nproj + k``.
    """
    _check(Nproj, k, Nsec)
    if Nproj + k > Nsec:
        raise ValueError(
            f"projection P_{Nproj} of order {k} needs a section of size >= {Nproj + k}, got {Nsec}"
        )
    S = np.eye(Nproj)
    for _ in range(k):
        S = np.cumsum(S, axis=0)
    A = np.zeros((Nsec, Nsec))
    block = np.zeros((Nproj + k, Nproj))
    block[:Nproj] = S
    for _ in range(k):
        block = np.diff(block, axis=0, prepend=np.zeros((1, Nproj)))
    A[: Nproj + k, :Nproj] = block
    return A


def projection_norm_bounds(Nproj: int, spec: DiffSpaceSpec, model: BasisModel | None = None, Nsec: int | None = None) -> NormBounds:
    """Bounds on the norm of the partial-sum projection ``P_Nproj`` on H_k / l_{p,k}."""
    model = model or BasisModel.orthonormal()
    k = spec.k
    if model.S is not None:
        if spec.p != 2:
            raise ValueError("Riesz-matrix models describe Hilbert spaces; use p = 2")
        if Nsec is not None and Nsec != model.dim:
            raise ValueError(f"section size {Nsec} differs from the basis dimension {model.dim}")
        Nsec = model.dim
    elif Nsec is None:
        Nsec = Nproj + k
    A = projection_section(Nproj, k, Nsec)
    if model.S is not None:
        B = model.S @ A
        B = scipy.linalg.solve(model.S.T, B.T).T
        return section_norm(B, 2.0)
    if k == 0:
        base = NormBounds(1.0, 1.0)
    else:
        base = section_norm(A[: Nproj + k, :Nproj], spec.p)
    if model.kind == EQUIVALENCE_CONSTANTS:
        r = (model.m / model.M) ** (1.0 / spec.p)
        return NormBounds(base.lower * r, base.upper / r, base.converged)
    return base


def projection_norm(Nproj: int, spec: DiffSpaceSpec, model: BasisModel | None = None, Nsec: int | None = None) -> float:
    """Norm of the partial-sum projection ``P_Nproj``.

    Exact for p = 2 in orthonormal and Riesz-matrix models; otherwise the
    certified lower bound, which is what a divergence certificate needs.
    """
    b = projection_norm_bounds(Nproj, spec, model, Nsec)
    return b.upper if b.lower == b.upper else b.lower


def expansion_divergence(k: int, N: int) -> np.ndarray:
    """``<x, psi_n^k>`` for ``x = sum e_n / n`` and ``n <= N``: nested harmonic sums."""
    _check(1, k, N)
    if N < 10:
        raise ValueError(f"expansion divergence needs N >= 10, got {N}")
    inv = 1.0 / np.arange(1, N + 1, dtype=np.float64)
    return sigma(inv, k, compensated=True)


@dataclass
class MinimalityReport:
    n_grid: list[int]
    phi_norms: list[float]
    psi_norms: list[float]
    products: list[float]
    k: int
    model: BasisModel
    phi_lower_bound: float


def phi_norm_lower_bound(k: int, model: BasisModel) -> float:
    """``sqrt(C_k)`` with ``C_k = ||S^{-1}||^{-2} sum_j C(k,j)^2``."""
    return math.sqrt(model.m * binomial_energy(k))


def uniform_minimality(k: int, model: BasisModel, N: int, n_grid=None) -> MinimalityReport:
    """Norms of phi_n^k, psi_n^k and their products over ``n_grid``."""
    _check(1, k, N)
    if N < 100:
        raise ValueError(f"uniform minimality table needs N >= 100, got {N}")
    if model.kind == EQUIVALENCE_CONSTANTS:
        raise ValueError("uniform minimality needs an orthonormal or Riesz-matrix model")
    if model.dim is not None and model.dim != N:
        raise ValueError(f"basis dimension {model.dim} differs from section size {N}")
    grid = list(range(1, N - k + 1)) if n_grid is None else [int(n) for n in n_grid]
    if any(n < 1 or n + k > N for n in grid):
        raise ValueError(f"grid indices must satisfy 1 <= n <= N - k = {N - k}")
    phi_norms, psi_norms = [], []
    for n in grid:
        phi_norms.append(model.vector_norm(phi(n, k, N)))
        psi_norms.append(model.functional_norm(psi(n, k, N)))
    products = [a * b for a, b in zip(phi_norms, psi_norms)]
    return MinimalityReport(grid, phi_norms, psi_norms, products, k, model, phi_norm_lower_bound(k, model))


@dataclass
class BasisFailureCertificate:
    k: int
    N: int
    unit_norms: np.ndarray
    inf_unit_norm: float
    tail_distances: np.ndarray


def basis_failure_certificate(k: int, N: int, p: float = 2.0) -> BasisFailureCertificate:
    """``inf_n ||e_n||_k`` and the distances ``||x - s_M||_k`` for the formal series ``x = sum e_n``.

    ``s_M`` are the partial sums.  Consecutive partial sums differ by
    ``||e_{M+1}||_k >= inf_n ||e_n||_k > 0``, so the series is not Cauchy, and
    the distances to ``x`` do not tend to zero.
    """
    _check(1, k, N)
    if k == 0:
        raise ValueError("for k = 0 the canonical basis is a basis; nothing to certify")
    unit = np.array([lp_norm(delta(_impulse(n, N), k), p) for n in range(1, N - k + 1)])
    x = np.ones(N)
    dist = []
    for M in range(1, N - k + 1):
        r = x.copy()
        r[:M] = 0.0
        dist.append(lp_norm(delta(r, k), p))
    return BasisFailureCertificate(k, N, unit, float(unit.min()), np.array(dist))


def _impulse(n, N):
    e = np.zeros(N)
    e[n - 1] = 1.0
    return e


def c0_closure_demo(k: int, M_grid, N: int, p: float = 2.0) -> list[dict]:
    """Sequences in l_p(Delta^k) ∩ c_0 approaching the constant sequence 1.

    ``c^(M)_n = (1 - n/M)_+`` vanishes past ``M``, yet ``||1 - c^(M)||_k`` -> 0,
    so the intersection is not closed.  This is only a finite-section
    illustration: closedness is not a finite-dimensional property.
    """
    _check(1, k, N)
    rows = []
    n = np.arange(1, N + 1, dtype=np.float64)
    for M in M_grid:
        if M + k > N:
            raise ValueError(f"demo needs M + k <= N, got M={M}, N={N}")
        c = np.clip(1.0 - n / M, 0.0, None)
        rows.append({
            "M": int(M),
            "distance_to_limit": lp_norm(delta(1.0 - c, k), p),
            "tail_sup": float(np.abs(c[M:]).max(initial=0.0)),
            "limit_tail_sup": 1.0,
        })
    return rows
