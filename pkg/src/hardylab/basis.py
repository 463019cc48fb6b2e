"""Finite-dimensional models of Riesz bases of H and symmetric bases of l_p.

Every estimate downstream only sees a basis through its two equivalence
constants ``m <= M``::

    m * sum |c_n|^p  <=  || sum c_n e_n ||^p  <=  M * sum |c_n|^p

Three kinds of model are supported:

``orthonormal``
    ``e_n`` is the canonical basis, ``m = M = 1``.
``riesz_matrix``
    ``e_n = S e'_n`` for an invertible matrix ``S``; the constants are the
    squared extreme singular values of ``S``.
``equivalence_constants``
    only ``m`` and ``M`` are known.  Symmetric-basis equivalence in l_p is not
    a finite-section quantity, so for ``p != 2`` the constants are taken from
    the caller rather than estimated.

Normalization of ``S`` (unit-norm columns, i.e. normalized eigenvectors, or
raw columns) is the caller's choice; :meth:`BasisModel.riesz_matrix` can
rescale the columns on request.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .sequences import as_sequence

CONDITION_CAP = 1e12

ORTHONORMAL = "orthonormal"
RIESZ_MATRIX = "riesz_matrix"
EQUIVALENCE_CONSTANTS = "equivalence_constants"


class SingularBasisError(ValueError):
    """Raised when a basis matrix is numerically singular."""


def _condition_number(S):
    sv = scipy.linalg.svdvals(S)
    if sv[-1] == 0:
        return np.inf, sv
    return sv[0] / sv[-1], sv


def _check_square(S):
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
        raise ValueError(f"basis matrix must be square and non-empty, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("basis matrix has non-finite entries")
    return S


def _riesz_thorin(A, p):
    # ||A||_{p->p} <= ||A||_1^{1/p} ||A||_inf^{1-1/p}
    a = np.abs(A)
    n1 = a.sum(axis=0).max()
    ninf = a.sum(axis=1).max()
    return n1 ** (1.0 / p) * ninf ** (1.0 - 1.0 / p)


def frame_bounds(S, p: float = 2.0) -> tuple[float, float]:
    """Equivalence constants ``(m, M)`` of the basis ``e_n = S e'_n``.

    For ``p = 2`` these are exact: ``m = sigma_min(S)^2``, ``M = sigma_max(S)^2``.
    For other ``p`` the returned pair is certified but generally not sharp:
    ``M^{1/p}`` and ``m^{-1/p}`` are Riesz-Thorin upper bounds for
    ``||S||_p`` and ``||S^{-1}||_p`` (exact when ``p = 1``).

    Raises
    ------
    SingularBasisError
        If the 2-norm condition number of ``S`` exceeds 1e12.
    """
    S = _check_square(S)
    if not (1 <= p < np.inf):
        raise ValueError(f"p must satisfy 1 <= p < inf, got {p!r}")
    cond, sv = _condition_number(S)
    if cond > CONDITION_CAP:
        raise SingularBasisError(
            f"basis matrix is numerically singular: condition number {cond:.3e} "
            f"exceeds {CONDITION_CAP:.0e} (sigma_min={sv[-1]:.3e}, sigma_max={sv[0]:.3e})"
        )
    if p == 2:
        return float(sv[-1] ** 2), float(sv[0] ** 2)
    upper = _riesz_thorin(S, p) ** p
    lower = _riesz_thorin(scipy.linalg.inv(S), p) ** (-p)
    return float(lower), float(upper)


@dataclass(frozen=True)
class BasisModel:
    kind: str
    m: float = 1.0
    M: float = 1.0
    S: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in (ORTHONORMAL, RIESZ_MATRIX, EQUIVALENCE_CONSTANTS):
            raise ValueError(f"unknown basis model kind {self.kind!r}")
        if not (0 < self.m <= self.M < np.inf):
            raise ValueError(f"need 0 < m <= M, got m={self.m}, M={self.M}")
        if (self.kind == RIESZ_MATRIX) != (self.S is not None):
            raise ValueError("a matrix S is required for, and only for, riesz_matrix models")

    @classmethod
    def orthonormal(cls) -> "BasisModel":
        return cls(ORTHONORMAL)

    @classmethod
    def riesz_matrix(cls, S, normalize: bool = False) -> "BasisModel":
        """Model with ``e_n = S e'_n``; ``normalize`` rescales columns to unit length."""
        S = np.array(_check_square(S), dtype=np.complex128)
        if normalize:
            S = S / np.linalg.norm(S, axis=0)
        m, M = frame_bounds(S, 2.0)
        S.setflags(write=False)
        return cls(RIESZ_MATRIX, m=m, M=M, S=S)

    @classmethod
    def equivalence_constants(cls, m: float, M: float) -> "BasisModel":
        return cls(EQUIVALENCE_CONSTANTS, m=float(m), M=float(M))

    @property
    def dim(self) -> int | None:
        return None if self.S is None else self.S.shape[0]

    def vector_norm(self, c) -> float:
        """Hilbert-space norm of ``sum c_n e_n``."""
        self._require_norm()
        return float(np.linalg.norm(apply_basis(self, c)))

    def functional_norm(self, a) -> float:
        """Norm of the functional ``sum a_n e_n^*`` (biorthogonal coordinates)."""
        self._require_norm()
        a = as_sequence(a).astype(np.complex128)
        if self.S is None:
            return float(np.linalg.norm(a))
        _check_dim(self, a)
        return float(np.linalg.norm(scipy.linalg.solve(self.S.conj().T, a)))

    def _require_norm(self):
        if self.kind == EQUIVALENCE_CONSTANTS:
            raise ValueError(
                "an equivalence-constants model carries no ambient norm; "
                "only the bounds m, M are known"
            )


def _check_dim(model, c):
    if model.S is not None and c.shape[0] != model.S.shape[0]:
        raise ValueError(
            f"dimension mismatch: sequence has length {c.shape[0]}, "
            f"basis matrix is {model.S.shape[0]}x{model.S.shape[1]}"
        )


def apply_basis(model: BasisModel, c) -> np.ndarray:
    """Ambient-space vector of ``x = sum c_n e_n``.

    Orthonormal and equivalence-constant models act as the identity on
    coordinates; a Riesz-matrix model multiplies by ``S``.
    """
    c = as_sequence(c)
    if model.S is None:
        return c.copy()
    _check_dim(model, c)
    return model.S @ c.astype(np.complex128)


def matrix_from_json(data) -> np.ndarray:
    """Parse a row-major matrix of ``[re, im]`` pairs (a JSON string or decoded list)."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(
            f"matrix JSON must be rows of [re, im] pairs (shape R x C x 2), got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_json(S) -> str:
    S = np.asarray(S, dtype=np.complex128)
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in S]
    return json.dumps(rows)
