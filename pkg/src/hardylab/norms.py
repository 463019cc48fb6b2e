"""Operator norms of finite sections.

``p = 2`` is exact: the largest singular value, from a dense SVD for small
sections and from an implicitly restarted Lanczos bidiagonalization (ARPACK)
above ``DENSE_LIMIT``, followed by a residual check of the singular triplet.

For ``p != 2`` exact induced norms are out of reach, so a ``(lower, upper)``
pair is returned:

* ``lower`` -- the best ratio ``||Ax||_p / ||x||_p`` over structured test
  vectors and a nonlinear power iteration on ``A`` itself;
* ``upper`` -- a Schur-test certificate for ``|A|`` (entrywise absolute
  values), with weights taken from Boyd's power iteration on ``|A|``.  Since
  ``||A||_p <= || |A| ||_p``, and the Schur test holds for *any* positive
  weights, the bound is valid whether or not the iteration has converged.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, svds

DENSE_LIMIT = 2048
MAX_ITER = 10_000


class NormBounds(NamedTuple):
    lower: float
    upper: float
    converged: bool = True


def _as_dense(A):
    entries = getattr(A, "entries", None)
    if entries is not None:
        return np.asarray(entries)
    if isinstance(A, LinearOperator):
        return None
    return np.asarray(A)


def _conj_exponent(p):
    return p / (p - 1.0)


def _signed_power(v, r):
    # |v|^(r-1) * sign(v), complex sign for complex v
    a = np.abs(v)
    out = np.zeros_like(v)
    nz = a > 1e-290  # subnormal phases overflow in complex division
    out[nz] = v[nz] / a[nz] * a[nz] ** (r - 1.0)
    return out


def _pnorm(x, p):
    a = np.abs(x)
    s = a.max(initial=0.0)
    if s == 0:
        return 0.0
    return float(s * np.sum((a / s) ** p) ** (1.0 / p))


def spectral_norm(A, tol: float = 1e-9) -> NormBounds:
    """Largest singular value of a dense matrix or a ``LinearOperator``."""
    dense = _as_dense(A)
    if dense is not None and max(dense.shape) <= DENSE_LIMIT:
        if dense.size == 0:
            return NormBounds(0.0, 0.0)
        s = float(scipy.linalg.svdvals(dense)[0])
        return NormBounds(s, s)
    op = A if dense is None else dense
    m, n = op.shape
    if min(m, n) < 3:
        return spectral_norm(_materialize(op), tol)
    kind = np.complex128 if np.iscomplexobj(np.empty(0, dtype=op.dtype)) else np.float64
    v0 = np.ones(min(m, n), dtype=kind) / math.sqrt(min(m, n))
    u, s, vh = svds(op, k=1, tol=tol * 1e-3, v0=v0, maxiter=MAX_ITER)
    sigma = float(s[0])
    if sigma == 0:
        return NormBounds(0.0, 0.0)
    v = vh[0].conj()
    # residual certificate of the singular triplet
    r1 = np.linalg.norm(_matvec(op, v) - sigma * u[:, 0])
    r2 = np.linalg.norm(_rmatvec(op, u[:, 0]) - sigma * v)
    converged = max(r1, r2) <= tol * sigma
    return NormBounds(sigma, sigma, bool(converged))


def _matvec(op, x):
    return op @ x if isinstance(op, np.ndarray) else op.matvec(x)


def _rmatvec(op, x):
    return op.conj().T @ x if isinstance(op, np.ndarray) else op.rmatvec(x)


def _materialize(op):
    if isinstance(op, np.ndarray):
        return op
    return np.column_stack([op.matvec(e) for e in np.eye(op.shape[1])])


def boyd_upper(B, p: float, tol: float = 1e-9, max_iter: int = MAX_ITER):
    """Certified upper bound for ``||B||_{p->p}``, ``B`` entrywise nonnegative.

    Returns ``(upper, iterate_value, converged)`` where ``iterate_value`` is the
    Rayleigh-type value ``||Bx||_p`` at the final Boyd iterate (itself a lower
    bound for ``||B||``).
    """
    B = np.asarray(B, dtype=np.float64)
    q = _conj_exponent(p)
    n = B.shape[1]
    x = np.full(n, n ** (-1.0 / p))
    value = _pnorm(B @ x, p)
    converged = False
    for _ in range(max_iter):
        y = B @ x
        z = B.T @ (y ** (p - 1.0))
        zmax = z.max()
        if zmax == 0:
            converged = True
            break
        x_new = (z / zmax) ** (q - 1.0)
        x_new /= _pnorm(x_new, p)
        new_value = _pnorm(B @ x_new, p)
        x = x_new
        if abs(new_value - value) <= tol * max(new_value, 1e-300):
            value = new_value
            converged = True
            break
        value = new_value
    upper = _schur_bound(B, x, p, q)
    return max(upper, value), value, converged


def _schur_bound(B, x, p, q):
    # Schur test: with w > 0 and u^q = B w^q, ||B||_p <= max_j ((B^T u^p)_j / w_j^p)^{1/p}.
    floor = x.max() * 1e-12
    if floor == 0:
        return 0.0
    w = np.maximum(x, floor) ** (p / (p + q))
    u = (B @ w**q) ** (1.0 / q)
    ratio = (B.T @ u**p) / w**p
    return float(ratio.max() ** (1.0 / p))


def _test_vectors(n, p):
    idx = np.arange(1, n + 1, dtype=np.float64)
    yield np.ones(n)
    for j in sorted({0, 1, n // 2, n - 1}):
        e = np.zeros(n)
        e[j] = 1.0
        yield e
    for eps in (1.0, 0.3, 0.1, 0.03):
        yield idx ** (-(1.0 + eps) / p)
    yield idx ** (-1.0 / p) * np.log(idx + 1.0) ** (-1.0)
    yield (-1.0) ** idx


def lower_bound(A, p: float, extra_vectors=(), iterations: int = 200) -> float:
    """Best ``||Ax||_p / ||x||_p`` over test vectors and a power iteration."""
    A = np.asarray(A)
    n = A.shape[1]
    q = _conj_exponent(p)
    best = 0.0
    candidates = list(_test_vectors(n, p)) + [np.asarray(v) for v in extra_vectors]
    for x in candidates:
        nx = _pnorm(x, p)
        if nx > 0:
            best = max(best, _pnorm(A @ x, p) / nx)
    x = np.abs(A).sum(axis=0).astype(np.complex128)
    if not np.any(x):
        return best
    x /= _pnorm(x, p)
    AH = A.conj().T
    for _ in range(iterations):
        y = A @ x
        best = max(best, _pnorm(y, p))
        ymax = np.abs(y).max()
        if ymax == 0:
            break
        # rescale before powering so large p cannot overflow
        z = AH @ _signed_power(y / ymax, p)
        zmax = np.abs(z).max()
        if zmax == 0:
            break
        x = _signed_power(z / zmax, q)
        x /= _pnorm(x, p)
    return float(best)


def section_norm(A, p: float = 2.0, tol: float = 1e-9, max_iter: int = MAX_ITER) -> NormBounds:
    """``(lower, upper, converged)`` bounds on ``||A||_{p->p}``.

    ``A`` may be a dense array, an object with an ``entries`` array, or (for
    ``p = 2`` only) a ``scipy.sparse.linalg.LinearOperator``.
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    if p == 2:
        return spectral_norm(A, tol)
    dense = _as_dense(A)
    if dense is None:
        dense = _materialize(A)
    a = np.abs(dense)
    if p == 1:
        v = float(a.sum(axis=0).max())
        return NormBounds(v, v)
    if math.isinf(p):
        v = float(a.sum(axis=1).max())
        return NormBounds(v, v)
    upper, boyd_value, converged = boyd_upper(a, p, tol, max_iter)
    lower = lower_bound(dense, p)
    return NormBounds(min(lower, upper), upper, converged)
