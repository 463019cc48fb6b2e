"""Eigenvalue profiles ``lambda_n = i * f(n)``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG = "log"
SQRT = "sqrt"
POWER = "power"
LOGLOG = "loglog"
TABLE = "table"
KINDS = (LOG, SQRT, POWER, LOGLOG, TABLE)


@dataclass(frozen=True)
class SpectralFn:
    """A real profile ``f`` evaluated at integers ``n >= 1``.

    ``log``: ln n; ``sqrt``: sqrt(n); ``power``: n^alpha; ``loglog``:
    ln ln sqrt(n + 1); ``table``: ``values[n - 1]``, with no extrapolation.
    """

    kind: str
    alpha: float | None = None
    values: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown spectral function kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == POWER and not (self.alpha is not None and self.alpha > 0):
            raise ValueError(f"power profile needs alpha > 0, got {self.alpha!r}")
        if self.kind == TABLE:
            if not self.values:
                raise ValueError("table profile needs at least one value")
            vals = tuple(float(v) for v in self.values)
            if not np.all(np.isfinite(vals)):
                raise ValueError("table profile has non-finite values")
            object.__setattr__(self, "values", vals)

    @classmethod
    def log(cls):
        return cls(LOG)

    @classmethod
    def sqrt(cls):
        return cls(SQRT)

    @classmethod
    def power(cls, alpha: float):
        return cls(POWER, alpha=float(alpha))

    @classmethod
    def loglog(cls):
        return cls(LOGLOG)

    @classmethod
    def table(cls, values):
        return cls(TABLE, values=tuple(values))

    @classmethod
    def parse(cls, text: str) -> "SpectralFn":
        """Parse ``log``, ``sqrt``, ``loglog`` or ``power:ALPHA``."""
        name, _, arg = text.strip().lower().partition(":")
        if name == POWER:
            if not arg:
                raise ValueError("power profile needs an exponent, e.g. 'power:0.5'")
            return cls.power(float(arg))
        if name in (LOG, SQRT, LOGLOG) and not arg:
            return cls(name)
        raise ValueError(f"cannot parse spectral function {text!r}")

    @property
    def label(self) -> str:
        if self.kind == POWER:
            return f"power:{self.alpha:g}"
        if self.kind == TABLE:
            return f"table[{len(self.values)}]"
        return self.kind

    @property
    def length(self) -> int | None:
        return len(self.values) if self.kind == TABLE else None

    def _check(self, n):
        n = np.asarray(n, dtype=np.float64)
        if np.any(n < 1):
            raise ValueError("spectral functions are evaluated at n >= 1")
        if self.kind == TABLE and np.any(n > len(self.values)):
            raise ValueError(
                f"table profile has {len(self.values)} values; "
                f"evaluation at n={int(n.max())} would need extrapolation"
            )
        return n

    def __call__(self, n):
        n = self._check(n)
        if self.kind == LOG:
            return np.log(n)
        if self.kind == SQRT:
            return np.sqrt(n)
        if self.kind == POWER:
            return n**self.alpha
        if self.kind == LOGLOG:
            return np.log(0.5 * np.log1p(n))
        return np.asarray(self.values)[n.astype(np.int64) - 1]

    def diff(self, a, b):
        """``f(a) - f(b)`` without cancellation when ``a`` and ``b`` are close."""
        a = self._check(a)
        b = self._check(b)
        h = a - b
        if self.kind == LOG:
            return np.log1p(h / b)
        if self.kind == SQRT:
            return h / (np.sqrt(a) + np.sqrt(b))
        if self.kind == POWER:
            return b**self.alpha * np.expm1(self.alpha * np.log1p(h / b))
        if self.kind == LOGLOG:
            return np.log1p(np.log1p(h / (b + 1.0)) / np.log1p(b))
        return self(a) - self(b)
