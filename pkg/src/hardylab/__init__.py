"""Exact finite-section experiments on difference sequence spaces l_p(Delta^k)."""
from .basis import BasisModel, SingularBasisError, apply_basis, frame_bounds
from .group import (
    GroupNormCurve,
    GroupNormRow,
    OperatorSection,
    cesaro_rate_section,
    group_norm,
    group_norm_curve,
    group_section,
    growth_bound_estimate,
    strong_continuity_probe,
)
from .hardy import HardyReport, hardy_sharpness_sweep, hardy_sides
from .nonbasis import (
    MinimalityReport,
    chi,
    expansion_divergence,
    phi,
    projection_norm,
    psi,
    uniform_minimality,
)
from .norms import NormBounds, section_norm
from .sequences import DiffSpaceSpec, binom, delta, shift, sigma, space_norm
from .spectral import SpectralFn
from .spectrum import GapReport, SkReport, geometric_condition, k_decompose, rate_check, sk_membership, uniform_gap

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
