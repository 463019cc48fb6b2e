"""The twelve acceptance experiments as plain functions.

Each ``criterion_N`` runs its experiment at the stated tolerance and returns a
:class:`CriterionResult` with the table it produced.  Wall-clock limits are
part of the verdict.  ``report-all`` and the acceptance tests both call
:func:`run_all`, so the two can never drift apart.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis import BasisModel
from .group import (
    cesaro_constant_bound,
    cesaro_rate_section,
    eigen_residual,
    group_norm_curve,
    group_section,
    growth_bound_estimate,
)
from .hardy import hardy_sides, near_extremal
from .nonbasis import (
    expansion_divergence,
    gram_e_chi,
    gram_psi_phi,
    projection_norm,
    uniform_minimality,
)
from .norms import section_norm
from .sequences import DiffSpaceSpec, delta, delta_binomial, lp_norm, sigma
from .spectral import SpectralFn
from .spectrum import CONSISTENT, INCONSISTENT, k_decompose, sk_membership, uniform_gap

SEED = 42
DOUBLING_GRID = [128, 256, 512, 1024, 2048, 4096, 8192]
GROWTH_TIMES = [float(t) for t in range(50, 101)]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    runtime: float
    limit: float
    rows: list[dict] = field(default_factory=list)
    detail: str = ""

    @property
    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d}: {self.title} ({self.runtime:.1f}s / {self.limit:.0f}s) {self.detail}"


def _timed(number, title, limit, body, workers=1):
    start = time.perf_counter()
    checks, rows, detail = body(workers)
    runtime = time.perf_counter() - start
    within = runtime < limit
    if not within:
        detail = f"{detail}; runtime over limit".lstrip("; ")
    return CriterionResult(number, title, bool(all(checks) and within), runtime, limit, rows, detail)


def _failed(names):
    return "failed: " + ", ".join(names) if names else "all checks hold"


def _collect(pairs):
    checks = [ok for _, ok in pairs]
    return checks, _failed([name for name, ok in pairs if not ok])


# 1 -------------------------------------------------------------------------

def _random_nonnegative(rng, N):
    kind = rng.integers(4)
    if kind == 0:
        return rng.random(N)
    if kind == 1:
        return rng.exponential(size=N) ** 3
    if kind == 2:
        a = rng.random(N)
        a[rng.random(N) < 0.9] = 0.0
        return a
    return np.sort(rng.random(N))[::-1] * np.arange(1, N + 1) ** (-rng.uniform(0.3, 1.5))


def _hardy(workers):
    rng = np.random.default_rng(SEED)
    rows, worst = [], {}
    for p in (1.5, 2.0, 3.0, 10.0):
        top = 0.0
        for _ in range(10_000):
            top = max(top, hardy_sides(_random_nonnegative(rng, 1000), p).ratio)
        worst[p] = top
        rows.append({"check": "random", "p": p, "N": 1000, "eps": "", "ratio": top})
    near = hardy_sides(near_extremal(2.0, 0.01, 10**6), 2.0)
    rows.append({"check": "near-extremal", "p": 2.0, "N": 10**6, "eps": 0.01, "ratio": near.ratio})
    checks, detail = _collect(
        [(f"random ratio <= 1 at p={p:g}", worst[p] <= 1.0) for p in worst]
        + [(f"near-extremal ratio {near.ratio:.4f} (need >= 0.87)", near.ratio >= 0.87)]
    )
    return checks, rows, detail


def criterion_1(workers=1):
    return _timed(1, "Hardy inequality and near-extremal ratio", 30, _hardy, workers)


# 2 -------------------------------------------------------------------------

def _calculus(workers):
    rng = np.random.default_rng(SEED)
    rows, exact, worst_rel = [], True, 0.0
    for k in range(5):
        # 200 sequences per order, lengths log-uniform up to 10^4, the top length always included
        sizes = np.unique(np.r_[np.round(10 ** rng.uniform(0, 4, size=199)).astype(int), 10_000])
        sizes = np.r_[sizes, rng.integers(1, 10_001, size=200 - sizes.size)]
        for N in sizes:
            c = rng.integers(-1000, 1001, size=int(N))
            exact &= bool(np.array_equal(sigma(delta(c, k), k), c))
            x = rng.standard_normal(int(N))
            ref = delta_binomial(x, k)
            scale = np.abs(ref).max()
            if scale > 0:
                worst_rel = max(worst_rel, float(np.abs(delta(x, k) - ref).max() / scale))
        rows.append({"k": k, "sequences": int(sizes.size), "max_N": int(sizes.max()), "round_trip_exact": exact, "binomial_rel_err": worst_rel})
    checks, detail = _collect([("round trip", exact), (f"binomial agreement {worst_rel:.1e} <= 1e-12", worst_rel <= 1e-12)])
    return checks, rows, detail


def criterion_2(workers=1):
    return _timed(2, "Delta/Sigma exactness", 5, _calculus, workers)


# 3 -------------------------------------------------------------------------

def _projection(workers):
    rows, pairs = [], []
    for Np in (3, 10, 99, 999):
        one = projection_norm(Np, DiffSpaceSpec(2.0, 1))
        two = projection_norm(Np, DiffSpaceSpec(2.0, 2))
        closed = math.sqrt(Np + 1)
        rows.append({"Nproj": Np, "k1_norm": one, "sqrt_Nproj_plus_1": closed, "k2_norm": two})
        pairs.append((f"k=1 at {Np}", abs(one - closed) <= 1e-8))
        pairs.append((f"k=2 > k=1 at {Np}", two > one))
    checks, detail = _collect(pairs)
    return checks, rows, detail


def criterion_3(workers=1):
    return _timed(3, "partial-sum projections diverge", 60, _projection, workers)


# 4 -------------------------------------------------------------------------

def _biorth(workers):
    rows, pairs = [], []
    for k in range(4):
        for N in (50, 300):
            g1 = gram_psi_phi(k, N)
            g2 = gram_e_chi(k, N)
            e1 = float(np.abs(g1 - np.eye(g1.shape[0])).max())
            e2 = float(np.abs(g2 - np.eye(N)).max())
            rows.append({"k": k, "N": N, "psi_phi_err": e1, "e_chi_err": e2})
            pairs.append((f"k={k} N={N}", e1 <= 1e-10 and e2 <= 1e-10))
    checks, detail = _collect(pairs)
    return checks, rows, detail


def criterion_4(workers=1):
    return _timed(4, "biorthogonal Gram matrices", 30, _biorth, workers)


# 5 -------------------------------------------------------------------------

def _minimality(workers):
    N = 10**4 + 1
    rep = uniform_minimality(1, BasisModel.orthonormal(), N)
    n = np.asarray(rep.n_grid, dtype=np.float64)
    inf_phi = min(rep.phi_norms)
    psi_err = float(np.max(np.abs(np.asarray(rep.psi_norms) - np.sqrt(n))))
    growth = rep.products[-1] / rep.products[0]
    rows = [
        {"n": i, "phi_norm": rep.phi_norms[i - 1], "psi_norm": rep.psi_norms[i - 1], "product": rep.products[i - 1]}
        for i in (1, 4, 10, 100, 1000, 10**4)
    ]
    checks, detail = _collect([
        ("inf phi = sqrt 2", abs(inf_phi - math.sqrt(2)) <= 1e-10),
        (f"psi = sqrt n (err {psi_err:.1e})", psi_err <= 1e-10),
        (f"product growth {growth:.2f} >= 100", growth >= 100),
    ])
    return checks, rows, detail


def criterion_5(workers=1):
    return _timed(5, "minimal but not uniformly minimal", 10, _minimality, workers)


# 6 -------------------------------------------------------------------------

def _harmonic(workers):
    H = expansion_divergence(1, 10**6)
    points = list(range(1, 101)) + [10**3, 10**4, 10**5, 10**6]
    worst, rows = 0.0, []
    for n in points:
        ref = math.fsum(1.0 / j for j in range(1, n + 1))
        worst = max(worst, abs(H[n - 1] - ref))
        if n in (1, 4, 100, 10**3, 10**6):
            rows.append({"n": n, "value": float(H[n - 1]), "direct_sum": ref})
    top = float(H[-1])
    checks, detail = _collect([(f"harmonic error {worst:.1e} <= 1e-10", worst <= 1e-10), (f"H(1e6)={top:.4f} > 14", top > 14)])
    return checks, rows, detail


def criterion_6(workers=1):
    return _timed(6, "divergent expansion coefficients", 5, _harmonic, workers)


# 7 -------------------------------------------------------------------------

def _growth_per_doubling(rows):
    vals = [r.upper for r in rows]
    return [b / a - 1.0 for a, b in zip(vals, vals[1:])]


def _dichotomy(workers):
    spec = DiffSpaceSpec(2.0, 1)
    log = group_norm_curve(SpectralFn.log(), spec, DOUBLING_GRID, [1.0], workers=workers)
    sq = group_norm_curve(SpectralFn.sqrt(), spec, DOUBLING_GRID, [1.0], workers=workers)
    rows = []
    for a, b in zip(log.rows, sq.rows):
        rows.append({"N": a.N, "t": 1.0, "log_norm": a.upper, "sqrt_norm": b.upper, "converged": a.converged and b.converged})
    lg, sg = _growth_per_doubling(log.rows), _growth_per_doubling(sq.rows)
    by_n = {r.N: r.upper for r in sq.rows}
    checks, detail = _collect([
        ("log <= 5", max(r.upper for r in log.rows) <= 5.0),
        (f"log last doubling {lg[-1]:.2%} < 2%", lg[-1] < 0.02),
        ("sqrt(8192) >= 2 sqrt(512)", by_n[8192] >= 2 * by_n[512]),
        (f"sqrt growth per doubling >= 10% (min {min(sg):.1%})", min(sg) >= 0.10),
        ("converged", all(r["converged"] for r in rows)),
    ])
    return checks, rows, detail


def criterion_7(workers=1):
    return _timed(7, "generation dichotomy log vs sqrt", 600, _dichotomy, workers)


# 8 -------------------------------------------------------------------------

def _higher_order(workers):
    grid = [N for N in DOUBLING_GRID if N <= 4096]
    curve = group_norm_curve(SpectralFn.log(), DiffSpaceSpec(2.0, 2), grid, [1.0], workers=workers)
    cap = 1.0 + 4**2 * 1.0
    g = _growth_per_doubling(curve.rows)
    rows = [{"N": r.N, "t": r.t, "norm": r.upper, "cap": cap, "converged": r.converged} for r in curve.rows]
    checks, detail = _collect([
        (f"under cap {cap:g}", max(r.upper for r in curve.rows) < cap),
        (f"last doubling {g[-1]:.2%} < 3%", g[-1] < 0.03),
        ("converged", all(r.converged for r in curve.rows)),
    ])
    return checks, rows, detail


def criterion_8(workers=1):
    return _timed(8, "order-2 plateau under analytic cap", 300, _higher_order, workers)


# 9 -------------------------------------------------------------------------

def _growth_bound(workers):
    rows, pairs = [], []
    for k, cap in ((1, 0.05), (2, 0.1)):
        est = growth_bound_estimate(SpectralFn.log(), DiffSpaceSpec(2.0, k), 4096, GROWTH_TIMES, workers=workers)
        rows.append({"k": k, "N": 4096, "t_min": GROWTH_TIMES[0], "t_max": GROWTH_TIMES[-1], "estimate": est, "cap": cap})
        pairs.append((f"k={k} estimate {est:.4f} (need <= {cap})", est <= cap))
    checks, detail = _collect(pairs)
    return checks, rows, detail


def criterion_9(workers=1):
    return _timed(9, "growth bound ln(norm)/t", 300, _growth_bound, workers)


# 10 ------------------------------------------------------------------------

def _cesaro(workers):
    rows, pairs, prev = [], [], -math.inf
    for N in (4, 64, 1024):
        sec = cesaro_rate_section(2.0, N)
        norm2 = section_norm(sec, 2.0).upper
        floor2 = math.sqrt((N + 1) / 2)
        A3 = cesaro_rate_section(3.0, N).entries
        ones = np.ones(N)
        const3 = lp_norm(A3 @ ones, 3.0) / lp_norm(ones, 3.0)
        rows.append({"N": N, "p2_norm": norm2, "p2_floor": floor2, "p3_constant_vector": const3, "p3_closed_form": cesaro_constant_bound(3.0, N)})
        pairs.append((f"p=2 N={N}", norm2 >= floor2))
        pairs.append((f"p=3 increase at N={N}", const3 > prev))
        prev = const3
    checks, detail = _collect(pairs)
    return checks, rows, detail


def criterion_10(workers=1):
    return _timed(10, "triangular rate matrices unbounded", 60, _cesaro, workers)


# 11 ------------------------------------------------------------------------

def _spectrum(workers):
    logs = np.log(np.arange(1, 10**5 + 1, dtype=np.float64))
    gap = uniform_gap(logs, 10**5)
    ref = math.log(10**5) - math.log(10**5 - 1)
    dec = k_decompose(logs[: 10**4], 5, 0.01)
    cases = [
        (SpectralFn.log(), 1, CONSISTENT),
        (SpectralFn.log(), 2, INCONSISTENT),
        (SpectralFn.sqrt(), 1, INCONSISTENT),
        (SpectralFn.loglog(), 1, CONSISTENT),
    ]
    rows = [{"check": "uniform_gap", "value": gap, "expected": ref}, {"check": "k_decompose", "value": dec.decomposable_at_threshold, "expected": False}]
    pairs = [("gap within 1%", abs(gap - ref) <= 0.01 * ref), ("K=5 infeasible", not dec.decomposable_at_threshold)]
    for f, k, want in cases:
        rep = sk_membership(f, k)
        rows.append({"check": f"S_{k} {f.label}", "value": rep.verdict, "expected": want})
        pairs.append((f"{f.label} k={k}", rep.verdict == want))
    checks, detail = _collect(pairs)
    return checks, rows, detail


def criterion_11(workers=1):
    return _timed(11, "spectrum hypotheses", 30, _spectrum, workers)


# 12 ------------------------------------------------------------------------

def _axioms(workers):
    rng = np.random.default_rng(SEED)
    f, N = SpectralFn.log(), 512
    rows, pairs = [], []
    eye = np.eye(N)
    for k in range(4):
        spec = DiffSpaceSpec(2.0, k)
        law = inv = 0.0
        for s, t in rng.uniform(-2.0, 2.0, size=(50, 2)):
            Ms = group_section(f, s, spec, N).entries
            Mt = group_section(f, t, spec, N).entries
            Mst = group_section(f, s + t, spec, N).entries
            law = max(law, float(np.abs(Ms @ Mt - Mst).max()))
            Minv = scipy.linalg.solve_triangular(Mt, eye, lower=True)
            inv = max(inv, float(np.abs(group_section(f, -t, spec, N).entries - Minv).max()))
        eig = max(eigen_residual(f, 1.0, spec, N, n) for n in range(1, N - k + 1))
        rows.append({"k": k, "N": N, "group_law_err": law, "inverse_err": inv, "eigen_residual": eig})
        pairs += [(f"law k={k}", law <= 1e-10), (f"inverse k={k}", inv <= 1e-8), (f"eigen k={k}", eig <= 1e-12)]
    checks, detail = _collect(pairs)
    return checks, rows, detail


def criterion_12(workers=1):
    return _timed(12, "group law, inverse, eigenvectors", 120, _axioms, workers)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


def run_all(workers: int = 1, only=None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if only is None else sorted(only)
    return [CRITERIA[n](workers) for n in numbers]
