"""Coordinate calculus for the right shift, k-th differences and iterated prefix sums.

A coefficient sequence is a 1-D numpy array ``c`` holding ``c_1 .. c_N``.
Indices below 1 read as zero, and everything past ``N`` is dropped.  Because
the shift, the difference operator and the prefix-sum operator are all lower
triangular, truncating to the first ``N`` coordinates commutes with composing
them: every identity below holds exactly on truncations, not approximately.

Integer and ``object`` (Python int) arrays stay in exact arithmetic; float and
complex arrays use double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_ORDER = 62


@dataclass(frozen=True)
class DiffSpaceSpec:
    """The ambient space l_p(Delta^k); ``k = 0`` is plain l_p."""

    p: float = 2.0
    k: int = 1

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError(f"exponent p must be >= 1, got {self.p!r}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"order k must be a nonnegative integer, got {self.k!r}")
        if self.k > MAX_ORDER:
            raise ValueError(f"order k={self.k} exceeds the supported maximum {MAX_ORDER}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "p", float(self.p))


def as_sequence(c) -> np.ndarray:
    """Validate and return ``c`` as a non-empty, finite 1-D array."""
    arr = np.asarray(c)
    if arr.ndim != 1:
        raise ValueError(f"coefficient sequence must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("coefficient sequence must have length >= 1")
    if arr.dtype.kind in "fc" and not np.all(np.isfinite(arr)):
        raise ValueError("coefficient sequence contains NaN or infinite entries")
    if arr.dtype.kind not in "biufcO":
        raise TypeError(f"unsupported dtype {arr.dtype}")
    if arr.dtype.kind == "b":
        arr = arr.astype(np.int64)
    return arr


def _check_order(k):
    if int(k) != k or k < 0:
        raise ValueError(f"order must be a nonnegative integer, got {k!r}")
    if k > MAX_ORDER:
        raise ValueError(f"order {k} exceeds the supported maximum {MAX_ORDER}")
    return int(k)


def binom(k: int, j: int) -> int:
    """Binomial coefficient C(k, j) for 0 <= j <= k <= 62."""
    k = _check_order(k)
    if int(j) != j or not 0 <= j <= k:
        raise ValueError(f"need 0 <= j <= k, got j={j!r}, k={k}")
    return math.comb(k, int(j))


def delta(c, k: int = 1) -> np.ndarray:
    """k-th difference ``(Delta^k c)_n = sum_j (-1)^j C(k,j) c_{n-j}``.

    Computed as ``k`` streaming first-difference passes (O(kN)).
    """
    k = _check_order(k)
    y = as_sequence(c)
    for _ in range(k):
        y = np.diff(y, prepend=np.zeros(1, dtype=y.dtype))
    return y.copy() if k == 0 else y


def delta_binomial(c, k: int = 1) -> np.ndarray:
    """Same as :func:`delta`, but from the one-shot alternating binomial formula."""
    k = _check_order(k)
    c = as_sequence(c)
    out = np.zeros_like(c)
    for j in range(min(k, c.size - 1) + 1):
        coeff = (-1) ** j * math.comb(k, j)
        if j == 0:
            out = out + coeff * c
        else:
            out[j:] = out[j:] + coeff * c[:-j]
    return out


def prefix_sum(x, compensated: bool = False, block: int = 1024) -> np.ndarray:
    """Running sums ``x_1, x_1 + x_2, ...``.

    With ``compensated=True`` the sums are formed blockwise: a plain cumulative
    sum inside each block of ``block`` entries plus block offsets accumulated
    with Neumaier's compensated summation.  The rounding error then grows with
    the block length instead of with ``N``.
    """
    x = as_sequence(x)
    if not compensated or x.dtype.kind not in "fc" or x.size <= block:
        return np.cumsum(x)
    if x.dtype.kind == "c":
        return prefix_sum(x.real, True, block) + 1j * prefix_sum(x.imag, True, block)
    n = x.size
    nblocks = -(-n // block)
    padded = np.zeros(nblocks * block, dtype=np.float64)
    padded[:n] = x
    local = np.cumsum(padded.reshape(nblocks, block), axis=1)
    totals = [math.fsum(row) for row in padded.reshape(nblocks, block)]
    offsets = np.empty(nblocks)
    s = comp = 0.0
    for b, v in enumerate(totals):
        offsets[b] = s + comp
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return (local + offsets[:, None]).ravel()[:n]


def sigma(y, k: int = 1, compensated: bool = False) -> np.ndarray:
    """Iterated prefix sums, the inverse ``(I - T)^{-k}`` of :func:`delta`."""
    k = _check_order(k)
    s = as_sequence(y)
    if k == 0:
        return s.copy()
    for _ in range(k):
        s = prefix_sum(s, compensated=compensated)
    return s


def shift(c, j: int = 1) -> np.ndarray:
    """Coordinate action of ``T^j``.

    ``j > 0`` shifts right (leading zeros, tail dropped); ``j < 0`` shifts left,
    which is the adjoint's action on the truncation.
    """
    c = as_sequence(c)
    n = c.size
    if int(j) != j or abs(j) >= n:
        raise ValueError(f"shift amount must be an integer with |j| < N={n}, got {j!r}")
    j = int(j)
    out = np.zeros_like(c)
    if j > 0:
        out[j:] = c[:-j]
    elif j < 0:
        out[:j] = c[-j:]
    else:
        out[:] = c
    return out


def lp_norm(x, p: float) -> float:
    """Plain l_p norm of a finite vector (``p`` may be ``inf``)."""
    x = np.asarray(x)
    if x.dtype.kind == "O":
        x = x.astype(np.complex128 if any(isinstance(v, complex) for v in x) else np.float64)
    a = np.abs(x)
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    scale = a.max()
    if scale == 0:
        return 0.0
    if p == 2:
        return float(np.linalg.norm(x))
    return float(scale * math.fsum((a / scale) ** p) ** (1.0 / p))


def space_norm(c, spec: DiffSpaceSpec, model=None) -> float:
    """Norm of ``c`` in l_p(Delta^k): ``||Delta^k c||_p``.

    ``model`` may be a :class:`hardylab.basis.BasisModel`; for a Riesz-matrix
    model the differences are mapped through ``S`` before measuring, which is
    the norm of H_k built over the non-orthogonal basis.
    """
    y = delta(c, spec.k)
    if model is not None and model.S is not None:
        from .basis import apply_basis

        y = apply_basis(model, y)
    return lp_norm(y, spec.p)
