import json

import numpy as np
import pytest

from hardylab.basis import (
    BasisModel,
    SingularBasisError,
    apply_basis,
    frame_bounds,
    matrix_from_json,
    matrix_to_json,
)
from hardylab.sequences import DiffSpaceSpec, space_norm


def random_riesz(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A + 3 * np.sqrt(n) * np.eye(n)


def test_identity_bounds():
    assert frame_bounds(np.eye(4)) == (1.0, 1.0)


def test_diagonal_bounds():
    m, M = frame_bounds(np.diag([1.0, 2.0]))
    assert np.isclose(m, 1.0) and np.isclose(M, 4.0)


def test_unitary_bounds(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    m, M = frame_bounds(Q)
    assert np.isclose(m, 1.0, atol=1e-12) and np.isclose(M, 1.0, atol=1e-12)


def test_bounds_match_svd_oracle(rng):
    for _ in range(20):
        S = rng.standard_normal((2, 2)) + 2 * np.eye(2)
        # explicit 2x2 singular values from the eigenvalues of S^T S
        G = S.T @ S
        tr, det = np.trace(G), np.linalg.det(G)
        disc = np.sqrt(tr**2 / 4 - det)
        m, M = frame_bounds(S)
        assert abs(m - (tr / 2 - disc)) <= 1e-10 * M
        assert abs(M - (tr / 2 + disc)) <= 1e-10 * M


def test_two_sided_equivalence(rng):
    S = random_riesz(rng, 8)
    model = BasisModel.riesz_matrix(S)
    for _ in range(1000):
        c = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        v = model.vector_norm(c) ** 2
        nc = np.vdot(c, c).real
        assert model.m * nc * (1 - 1e-12) <= v <= model.M * nc * (1 + 1e-12)
    U, s, Vh = np.linalg.svd(S)
    assert abs(model.vector_norm(Vh[0].conj()) ** 2 - model.M) <= 1e-8
    assert abs(model.vector_norm(Vh[-1].conj()) ** 2 - model.m) <= 1e-8


def test_p_not_two_bounds_are_certified(rng):
    S = random_riesz(rng, 6).real
    for p in (1.0, 1.5, 3.0):
        m, M = frame_bounds(S, p)
        for _ in range(200):
            c = rng.standard_normal(6)
            x = np.sum(np.abs(S @ c) ** p)
            sc = np.sum(np.abs(c) ** p)
            assert m * sc * (1 - 1e-12) <= x <= M * sc * (1 + 1e-12)


def test_p_one_is_exact():
    S = np.array([[2.0, 1.0], [0.0, 1.0]])
    m, M = frame_bounds(S, 1.0)
    assert np.isclose(M, 2.0)
    assert np.isclose(m, 1 / np.abs(np.linalg.inv(S)).sum(axis=0).max())


def test_singular_matrix_rejected():
    with pytest.raises(SingularBasisError, match="condition number"):
        frame_bounds(np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]]))


@pytest.mark.parametrize("S", [np.ones((2, 3)), np.zeros((0, 0)), np.array([[np.nan]])])
def test_bad_matrix_rejected(S):
    with pytest.raises(ValueError):
        frame_bounds(S)


def test_apply_basis_examples():
    assert apply_basis(BasisModel.orthonormal(), [1, 2]).tolist() == [1, 2]
    model = BasisModel.riesz_matrix(np.diag([1.0, 2.0]))
    assert np.allclose(apply_basis(model, [1, 1]), [1, 2])
    assert not np.any(apply_basis(model, [0, 0]))
    assert apply_basis(BasisModel.equivalence_constants(0.5, 2.0), [3, 4]).tolist() == [3, 4]


def test_apply_basis_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        apply_basis(BasisModel.riesz_matrix(np.eye(3)), [1, 2])


def test_model_validation():
    with pytest.raises(ValueError):
        BasisModel.equivalence_constants(2.0, 1.0)
    with pytest.raises(ValueError):
        BasisModel.equivalence_constants(0.0, 1.0)
    with pytest.raises(ValueError):
        BasisModel("riesz_matrix")


def test_equivalence_model_has_no_norm():
    with pytest.raises(ValueError):
        BasisModel.equivalence_constants(0.5, 2).vector_norm([1.0])


def test_normalized_columns(rng):
    S = rng.standard_normal((5, 5)) + 4 * np.eye(5)
    model = BasisModel.riesz_matrix(S, normalize=True)
    assert np.allclose(np.linalg.norm(model.S, axis=0), 1.0)


def test_functional_norm_is_dual(rng):
    S = random_riesz(rng, 5)
    model = BasisModel.riesz_matrix(S)
    a = rng.standard_normal(5)
    # sup over x of |<a, c>| / ||S c|| equals ||S^{-H} a||
    best = 0.0
    for _ in range(4000):
        c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        best = max(best, abs(np.dot(a, c)) / np.linalg.norm(S @ c))
    assert best <= model.functional_norm(a) * (1 + 1e-12)
    assert best >= 0.8 * model.functional_norm(a)


def test_space_norm_through_model():
    model = BasisModel.riesz_matrix(np.diag([1.0, 2.0, 3.0]))
    assert np.isclose(space_norm(np.ones(3), DiffSpaceSpec(2, 1), model), 1.0)
    assert np.isclose(space_norm(np.array([0.0, 1.0, 1.0]), DiffSpaceSpec(2, 1), model), 2.0)


def test_json_round_trip(rng):
    S = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.array_equal(matrix_from_json(matrix_to_json(S)), S)
    assert matrix_from_json(json.dumps([[[1, 0], [0, 2]]])).tolist() == [[1, 2j]]
    with pytest.raises(ValueError):
        matrix_from_json("[[1, 2]]")
