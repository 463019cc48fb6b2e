import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg

from hardylab.basis import BasisModel
from hardylab.nonbasis import (
    basis_failure_certificate,
    binomial_energy,
    c0_closure_demo,
    chi,
    expansion_divergence,
    gram_e_chi,
    gram_psi_phi,
    hk_inner,
    phi,
    phi_norm_lower_bound,
    projection_norm,
    projection_norm_bounds,
    projection_section,
    psi,
    uniform_minimality,
)
from hardylab.sequences import DiffSpaceSpec, space_norm


def dense_projection(Nproj, k, N):
    """Delta^k P Sigma^k from explicit N x N matrices."""
    D = np.eye(N) - np.eye(N, k=-1)
    Dk = np.linalg.matrix_power(D, k)
    Sk = np.linalg.matrix_power(np.tril(np.ones((N, N))), k)
    P = np.diag([1.0] * Nproj + [0.0] * (N - Nproj))
    return Dk @ P @ Sk


def test_phi_examples():
    assert phi(1, 1, 4).tolist() == [1, -1, 0, 0]
    assert phi(2, 2, 6).tolist() == [0, 1, -2, 1, 0, 0]
    for n in range(1, 8):
        assert np.dot(phi(n, 3, 10), phi(n, 3, 10)) == 20


def test_phi_rejects_truncation():
    with pytest.raises(ValueError):
        phi(4, 2, 5)


def test_psi_examples():
    v = psi(3, 1, 5)
    assert v.tolist() == [1, 1, 1, 0, 0] and math.isclose(np.linalg.norm(v), math.sqrt(3))
    w = psi(3, 2, 5)
    assert w.tolist() == [3, 2, 1, 0, 0] and np.dot(w, w) == 14 == 3 * 4 * 7 // 6
    with pytest.raises(ValueError):
        psi(6, 1, 5)


def test_psi_general_k_is_nested_sum():
    # coordinate j of psi_n^k is C(n - j + k - 1, k - 1)
    for k in (1, 2, 3, 5):
        n, N = 9, 12
        ref = [math.comb(n - j + k - 1, k - 1) if j <= n else 0 for j in range(1, N + 1)]
        assert psi(n, k, N).tolist() == ref


@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("N", [20, 300])
def test_biorthogonality_psi_phi(k, N):
    G = gram_psi_phi(k, N)
    assert np.abs(G - np.eye(N - k)).max() <= 1e-10


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_biorthogonality_e_chi(k):
    G = gram_e_chi(k, 300)
    assert np.abs(G - np.eye(300)).max() <= 1e-10


def test_chi_k1_oracle():
    # Sigma applied to the indicator of j <= n: min(j, n)
    assert chi(3, 1, 6).tolist() == [1, 2, 3, 3, 3, 3]
    N = 50
    E = np.eye(N)
    G = np.array([[hk_inner(E[i], chi(j, 1, N).astype(float), 1) for j in range(1, N + 1)] for i in range(N)])
    assert np.abs(G - np.eye(N)).max() <= 1e-10


def test_chi_k0_is_identity():
    assert chi(4, 0, 6).tolist() == [0, 0, 0, 1, 0, 0]


def test_chi_norm_unbounded():
    norms = [space_norm(chi(n, 1, 2000).astype(float), DiffSpaceSpec(2, 1)) for n in (1, 10, 100, 1000)]
    assert np.allclose(norms, np.sqrt([1, 10, 100, 1000]))


def test_chi_large_k_stays_exact():
    x = chi(5, 8, 60)
    assert x.dtype == object
    # prefix sums keep the first coordinate: psi_5^8 at j = 1 is C(11, 7)
    assert x[0] == math.comb(11, 7)
    assert x[-1] == sum(math.comb(60 - j + 7, 7) * math.comb(5 - j + 7, 7) for j in range(1, 6))
    dx = x
    for _ in range(8):
        dx = np.diff(dx, prepend=0)
    assert list(dx) == list(psi(5, 8, 60).astype(np.int64).astype(object))


@pytest.mark.parametrize("Nproj", [3, 10, 99, 999])
def test_projection_closed_form(Nproj):
    assert abs(projection_norm(Nproj, DiffSpaceSpec(2, 1)) - math.sqrt(Nproj + 1)) <= 1e-8


@pytest.mark.parametrize("Nproj,k", [(3, 1), (7, 2), (12, 3)])
def test_projection_section_matches_dense_product(Nproj, k):
    N = Nproj + k + 5
    assert np.allclose(projection_section(Nproj, k, N), dense_projection(Nproj, k, N), atol=1e-9)


def test_projection_independent_of_section_size():
    vals = [projection_norm(10, DiffSpaceSpec(2, 2), Nsec=N) for N in (12, 20, 60)]
    assert max(vals) - min(vals) <= 1e-10 * vals[0]


@pytest.mark.parametrize("Nproj", [3, 10, 99])
def test_order_two_is_worse(Nproj):
    assert projection_norm(Nproj, DiffSpaceSpec(2, 2)) > projection_norm(Nproj, DiffSpaceSpec(2, 1))


def test_projection_order_zero():
    for Np in (1, 5, 50):
        assert projection_norm(Np, DiffSpaceSpec(2, 0)) == 1.0


def test_projection_rejects_small_section():
    with pytest.raises(ValueError):
        projection_norm(10, DiffSpaceSpec(2, 2), Nsec=11)


def test_projection_p_not_two_brackets():
    b = projection_norm_bounds(20, DiffSpaceSpec(3, 1))
    assert 0 < b.lower <= b.upper
    # the section contains an all-ones row sum, so the norm grows with Nproj
    assert projection_norm_bounds(80, DiffSpaceSpec(3, 1)).lower > b.upper


def test_projection_riesz_model_similarity(rng):
    N = 12
    S = rng.standard_normal((N, N)) + 5 * np.eye(N)
    model = BasisModel.riesz_matrix(S)
    A = dense_projection(5, 1, N)
    ref = scipy.linalg.svdvals(S @ A @ np.linalg.inv(S))[0]
    assert math.isclose(projection_norm(5, DiffSpaceSpec(2, 1), model), ref, rel_tol=1e-9)


def test_projection_equivalence_constants_widen():
    base = projection_norm_bounds(10, DiffSpaceSpec(2, 1))
    b = projection_norm_bounds(10, DiffSpaceSpec(2, 1), BasisModel.equivalence_constants(0.25, 4.0))
    assert math.isclose(b.lower, base.lower / 4) and math.isclose(b.upper, base.upper * 4)


def test_expansion_divergence_harmonic():
    v = expansion_divergence(1, 10**6)
    assert math.isclose(v[3], float(sum(Fraction(1, j) for j in range(1, 5))), rel_tol=1e-15)
    assert math.isclose(v[3], 25 / 12)
    assert abs(v[-1] - (math.log(10**6) + 0.5772156649015329)) < 1e-6
    assert v[-1] > 14
    assert np.all(np.diff(v) > 0)


def test_expansion_divergence_order_two():
    v = expansion_divergence(2, 10)
    assert math.isclose(v[2], 1 + 1.5 + 11 / 6)


def test_expansion_divergence_min_size():
    with pytest.raises(ValueError):
        expansion_divergence(1, 9)


def test_uniform_minimality_orthonormal():
    rep = uniform_minimality(1, BasisModel.orthonormal(), 200, [4, 100])
    assert np.allclose(rep.products, [math.sqrt(2) * 2, math.sqrt(2) * 10])
    full = uniform_minimality(1, BasisModel.orthonormal(), 200)
    assert min(full.phi_norms) == math.sqrt(2)
    assert all(b >= a for a, b in zip(full.products, full.products[1:]))


def test_uniform_minimality_order_zero():
    rep = uniform_minimality(0, BasisModel.orthonormal(), 100)
    assert all(p == 1.0 for p in rep.products)


def test_phi_lower_bound_random_riesz(rng):
    N = 120
    for _ in range(20):
        S = rng.standard_normal((N, N)) / math.sqrt(N) + rng.uniform(1, 3) * np.eye(N)
        model = BasisModel.riesz_matrix(S)
        for k in (1, 2, 3):
            rep = uniform_minimality(k, model, N, range(1, N - k + 1, 7))
            bound = math.sqrt(model.m * binomial_energy(k))
            assert min(rep.phi_norms) >= bound - 1e-9
            upper = math.sqrt(model.M * binomial_energy(k))
            assert max(rep.phi_norms) <= upper + 1e-9
            assert rep.phi_lower_bound == pytest.approx(bound)


def test_uniform_minimality_validation():
    with pytest.raises(ValueError):
        uniform_minimality(1, BasisModel.orthonormal(), 99)
    with pytest.raises(ValueError):
        uniform_minimality(1, BasisModel.equivalence_constants(1, 2), 200)
    with pytest.raises(ValueError):
        uniform_minimality(1, BasisModel.riesz_matrix(np.eye(150)), 200)
    with pytest.raises(ValueError):
        uniform_minimality(2, BasisModel.orthonormal(), 200, [199])


def test_phi_norm_lower_bound_orthonormal():
    assert phi_norm_lower_bound(3, BasisModel.orthonormal()) == math.sqrt(20)


def test_basis_failure_certificate():
    cert = basis_failure_certificate(1, 50)
    assert cert.inf_unit_norm == math.sqrt(2)
    # ||x - s_M||_1 is the norm of the step starting at M + 1, which is 1
    assert np.allclose(cert.tail_distances, 1.0)
    with pytest.raises(ValueError):
        basis_failure_certificate(0, 50)


def test_arithmetic_subsequence_spot_check():
    # even-indexed phi_n^1 keep the same biorthogonal pairing, so products still grow
    rep = uniform_minimality(1, BasisModel.orthonormal(), 1000, range(2, 999, 2))
    assert rep.products[-1] / rep.products[0] > 20


def test_c0_demo_distances_shrink():
    rows = c0_closure_demo(1, [10, 100, 1000], 5000)
    d = [r["distance_to_limit"] for r in rows]
    assert d[0] > d[1] > d[2]
    # the ramp has slope 1/M over M steps: distance 1/sqrt(M)
    assert np.allclose(d, [1 / math.sqrt(M) for M in (10, 100, 1000)])
    assert all(r["tail_sup"] == 0.0 for r in rows)
