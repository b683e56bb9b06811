import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import linalg

from tphase_core.exceptions import BranchCut, BranchSpread, NotAccretive, NotSectorial
from tphase_core.kernels import (
    is_accretive_matrix, matrix_geomean, matrix_geomean_integral_oracle, max_rotation_margin,
    principal_power_contour, principal_power_matrix, require_accretive, rotation_margin,
    sectorial_decompose_matrix, wrap_angle,
)
from tphase_core.sampling import congruence_slices, random_frames


def accretive_matrix(rng, n, max_phase=1.2):
    frame = random_frames(rng, n, 1)[0]
    return congruence_slices(frame, rng.uniform(-max_phase, max_phase, n))


def test_wrap_angle():
    assert_allclose(wrap_angle([3 * np.pi / 2, -3 * np.pi / 2, np.pi]), [-np.pi / 2, np.pi / 2, np.pi])


def test_rotation_margin_of_identity():
    assert_allclose(rotation_margin(np.eye(2), [0.0, np.pi / 3]), [1.0, 0.5])
    gamma, margin = max_rotation_margin(np.eye(3))
    assert gamma == pytest.approx(0.0, abs=1e-6)
    assert margin == pytest.approx(1.0)


def test_sectorial_decomposition_reconstructs(rng):
    M = accretive_matrix(rng, 4)
    decomposition = sectorial_decompose_matrix(M)
    assert_allclose(decomposition.reconstruct(), M, atol=1e-10)
    assert np.all(np.diff(decomposition.phases) <= 0)


def test_sectorial_decomposition_of_unitary_diagonal():
    phases = np.array([0.9, -0.3, 0.2])
    decomposition = sectorial_decompose_matrix(np.diag(np.exp(1j * phases)))
    assert_allclose(decomposition.phases, [0.9, 0.2, -0.3], atol=1e-12)


def test_zero_matrix_is_not_sectorial():
    with pytest.raises(NotSectorial):
        sectorial_decompose_matrix(np.zeros((2, 2)))


def test_spread_reaching_pi_is_rejected():
    # sectorial, but its phases straddle the negative real axis
    with pytest.raises(BranchSpread):
        sectorial_decompose_matrix(np.diag(np.exp(1j * np.array([1.6, -1.6]))))


def test_sector_straddling_the_branch_cut_is_named():
    phases = np.array([np.pi - 0.05, -(np.pi - 0.05)])
    with pytest.raises(BranchSpread, match='branch cut'):
        sectorial_decompose_matrix(np.diag(np.exp(1j * phases)))


def test_phases_recovered_from_random_congruence(rng):
    T0 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    phases = np.array([0.9, 0.3, -0.4])
    M = T0.conj().T @ np.diag(np.exp(1j * phases)) @ T0
    assert_allclose(sectorial_decompose_matrix(M).phases, phases, atol=1e-9)


def test_principal_square_root(rng):
    M = accretive_matrix(rng, 3)
    root = principal_power_matrix(M, 0.5)
    assert_allclose(root @ root, M, atol=1e-10)
    assert is_accretive_matrix(root)


def test_square_root_of_square_root_is_fourth_root(rng):
    M = accretive_matrix(rng, 3)
    twice = principal_power_matrix(principal_power_matrix(M, 0.5), 0.5)
    assert_allclose(twice, principal_power_matrix(M, 0.25), atol=1e-9)


def test_principal_power_matches_scipy_and_contour(rng):
    M = accretive_matrix(rng, 3, max_phase=1.0)
    ours = principal_power_matrix(M, 0.3)
    assert_allclose(ours, linalg.fractional_matrix_power(M, 0.3), atol=1e-9)
    assert_allclose(principal_power_contour(M, 0.3), ours, atol=1e-7)


def test_power_on_branch_cut():
    with pytest.raises(BranchCut):
        principal_power_matrix(-np.eye(2), 0.5)


def test_accretive_checks():
    assert is_accretive_matrix(np.eye(2))
    assert not is_accretive_matrix(np.diag([1.0, -1.0]))
    with pytest.raises(NotAccretive):
        require_accretive(-np.eye(2))


def test_geomean_of_positive_definite_pair():
    A = np.diag([4.0, 9.0])
    B = np.eye(2)
    assert_allclose(matrix_geomean(A, B), np.diag([2.0, 3.0]), atol=1e-12)


def test_geomean_riccati_and_symmetry(rng):
    A = accretive_matrix(rng, 3)
    B = accretive_matrix(rng, 3)
    X = matrix_geomean(A, B)
    assert_allclose(X @ np.linalg.solve(A, X), B, atol=1e-9)
    assert_allclose(matrix_geomean(B, A), X, atol=1e-9)
    assert is_accretive_matrix(X)


def test_geomean_integral_oracle(rng):
    A = accretive_matrix(rng, 3)
    B = accretive_matrix(rng, 3)
    X = matrix_geomean(A, B)
    oracle = matrix_geomean_integral_oracle(A, B)
    assert np.linalg.norm(oracle - X) <= 1e-6 * np.linalg.norm(X)


def test_integral_oracle_of_scalars():
    oracle = matrix_geomean_integral_oracle(np.array([[1.0]]), np.array([[4.0]]))
    assert oracle[0, 0] == pytest.approx(2.0, rel=1e-6)
