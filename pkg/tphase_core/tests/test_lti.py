import numpy as np
import pytest
from numpy.testing import assert_allclose

from tphase_core.exceptions import (
    DimensionMismatch, IllPosed, ImproperSystem, PoleAtFrequency, SectorAssumptionViolated, Unstable,
)
from tphase_core.lti import (
    RationalSliceTF, StateSpaceTensor, StaticGain, bode_export, feedback_stable, freq_response,
    frequency_grid, gang_of_four, hinf_norm, in_phase_class, phase_envelope, small_gain_certificate,
    small_phase_certificate,
)
from tphase_core.phase import canonical_phases
from tphase_core.tensor import ComplexTensor3, bcirc, identity


def scalar(num, den):
    return RationalSliceTF([[[(num, den)]]])


def static(value, n=1, p=1):
    return StaticGain(identity(n, p) * value)


def response_matrix(A, B, C, D, omega):
    return C @ np.linalg.solve(1j * omega * np.eye(A.shape[0]) - A, B) + D


def gang_order(p, q, o):
    """Row order taking the matrix Gang of Four of bcirc(G), bcirc(H) to bcirc of the tensor one"""
    order = []
    for b in range(p):
        order += [b * q + i for i in range(q)]
        order += [p * q + b * o + j for j in range(o)]
    return order


def test_frequency_grid():
    grid = frequency_grid(10, 1e-2, 1e2)
    assert grid.size == 12
    assert grid[0] == 0 and np.isinf(grid[-1])
    assert grid[1] == pytest.approx(1e-2) and grid[-2] == pytest.approx(1e2)


def test_static_response_is_constant(rng):
    D = ComplexTensor3(rng.standard_normal((2, 2, 3)))
    G = StaticGain(D)
    for omega in (0.0, 1.0, np.inf):
        assert_allclose(freq_response(G, omega).data, D.data, atol=1e-14)


def test_worked_example_at_dc(rational_system):
    response = freq_response(rational_system, 0.0)
    assert_allclose(response.data[:, :, 0], [[2, 0.5], [0.5, 1.5]], atol=1e-14)
    assert_allclose(response.data[:, :, 1], [[0.5, 0.1], [0.1, 0.5]], atol=1e-14)


def test_limit_at_infinity(rational_system):
    response = freq_response(rational_system, np.inf)
    assert_allclose(response.data[:, :, 0], [[2, 0.5], [0.5, 1.5]])
    assert_allclose(freq_response(scalar([1.0], [1.0, 1.0]), np.inf).data, [[[0.0]]])


def test_realization_matches_rational_response(rational_system):
    A, B, C, D = rational_system.realization()
    for omega in (0.0, 0.3, 2.0, 15.0):
        expected = bcirc(freq_response(rational_system, omega))
        assert_allclose(response_matrix(A, B, C, D, omega), expected, atol=1e-9)


def test_state_space_response_and_realization(rng):
    A = -identity(2, 2)
    B = ComplexTensor3(rng.standard_normal((2, 1, 2)))
    C = ComplexTensor3(rng.standard_normal((1, 2, 2)))
    D = ComplexTensor3(rng.standard_normal((1, 1, 2)))
    G = StateSpaceTensor(A, B, C, D)
    assert G.is_stable
    Am, Bm, Cm, Dm = G.realization()
    assert np.isrealobj(Am)
    for omega in (0.0, 1.0):
        assert_allclose(bcirc(freq_response(G, omega)), response_matrix(Am, Bm, Cm, Dm, omega), atol=1e-10)
    assert_allclose(freq_response(G, np.inf).data, D.data)


def test_state_space_shape_checks(rng):
    A = ComplexTensor3(rng.standard_normal((2, 2, 2)))
    with pytest.raises(DimensionMismatch):
        StateSpaceTensor(A, ComplexTensor3(np.ones((3, 1, 2))), ComplexTensor3(np.ones((1, 2, 2))),
                         ComplexTensor3(np.ones((1, 1, 2))))


def test_pole_on_the_imaginary_axis():
    integrator = scalar([1.0], [1.0, 0.0])
    with pytest.raises(PoleAtFrequency):
        freq_response(integrator, 0.0)
    A = ComplexTensor3(np.zeros((1, 1, 1)))
    one = ComplexTensor3(np.ones((1, 1, 1)))
    with pytest.raises(PoleAtFrequency):
        freq_response(StateSpaceTensor(A, one, one, one), 0.0)


def test_improper_entries_are_rejected():
    with pytest.raises(ImproperSystem):
        scalar([1.0, 0.0, 0.0], [1.0, 1.0])


def test_ragged_slices_are_rejected():
    entry = ([1.0], [1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        RationalSliceTF([[[entry, entry]], [[entry]]])


def test_rh_inf_membership(rational_system):
    assert rational_system.in_rh_inf
    assert_allclose(np.sort_complex(np.unique(np.round(rational_system.poles(), 12))), [-1 - 1j, -1 + 1j])
    assert not scalar([1.0], [1.0, -1.0]).is_stable


def test_hinf_norm_of_first_order_lag():
    assert hinf_norm(scalar([1.0], [1.0, 1.0])) == pytest.approx(1.0, abs=1e-6)


def test_hinf_norm_of_static_gain(rng):
    D = ComplexTensor3(rng.standard_normal((2, 2, 2)))
    assert hinf_norm(StaticGain(D)) == pytest.approx(np.linalg.svd(bcirc(D), compute_uv=False)[0])


def test_hinf_norm_matches_dense_bcirc_sweep(rational_system):
    fine = frequency_grid(4000)
    dense = max(np.linalg.svd(bcirc(freq_response(rational_system, w)), compute_uv=False)[0] for w in fine)
    assert hinf_norm(rational_system) == pytest.approx(dense, rel=1e-4)


def test_hinf_norm_with_peak_at_grid_edges():
    grid = np.logspace(-1, 1, 50)
    high_pass = scalar([1.0, 0.0], [1.0, 1.0])
    grid_max = max(abs(10 / (1 + 10j)), abs(0.1j / (1 + 0.1j)))
    assert grid_max - 1e-12 <= hinf_norm(high_pass, grid) <= 1.0 + 1e-12
    low_pass = hinf_norm(scalar([1.0], [1.0, 1.0]), grid)
    assert 1 / np.sqrt(1.01) - 1e-12 <= low_pass <= 1.0 + 1e-12


def test_phase_envelope_on_grid_without_limits():
    grid = np.logspace(-1, 1, 50)
    envelope = phase_envelope(scalar([1.0, 0.0], [1.0, 1.0]), grid)
    assert envelope.upper_bound <= np.pi / 2 + 1e-12
    assert envelope.upper_bound >= np.angle(0.1j / (1 + 0.1j)) - 1e-12


def test_hinf_norm_needs_stability():
    with pytest.raises(Unstable):
        hinf_norm(scalar([1.0], [1.0, -1.0]))


def test_hinf_norm_invariant_under_representation():
    one = ComplexTensor3(np.ones((1, 1, 1)))
    state_space = StateSpaceTensor(-one, one, one, 0 * one)
    rational = scalar([1.0], [1.0, 1.0])
    grid = frequency_grid(100)
    assert hinf_norm(state_space, grid) == pytest.approx(hinf_norm(rational, grid), abs=1e-8)
    assert_allclose(phase_envelope(state_space, grid).upper, phase_envelope(rational, grid).upper, atol=1e-8)


def test_phase_envelope_of_worked_example(rational_system):
    envelope = phase_envelope(rational_system)
    assert envelope.frequency_wise_sectorial
    assert envelope.lower_bound_deg == pytest.approx(-39.04, abs=0.5)
    assert envelope.upper_bound_deg == pytest.approx(19.74, abs=0.5)
    assert envelope.spread_deg == pytest.approx(58.8, abs=1.0)
    assert np.all(envelope.upper >= envelope.lower)
    assert in_phase_class(envelope, np.pi / 2)


def test_phase_envelope_of_static_positive_definite_gain():
    envelope = phase_envelope(static(2.0, n=2, p=2), frequency_grid(20))
    assert_allclose(envelope.upper, 0.0, atol=1e-10)
    assert_allclose(envelope.lower, 0.0, atol=1e-10)
    assert in_phase_class(envelope, 0.1)


def test_phase_envelope_flags_non_sectorial_frequencies():
    envelope = phase_envelope(StaticGain(ComplexTensor3.zeros(1, 1, 1)), frequency_grid(5))
    assert not envelope.frequency_wise_sectorial
    assert len(envelope.non_sectorial_frequencies) == 7
    assert not in_phase_class(envelope, np.pi)


def test_conjugate_symmetry(rational_system):
    for omega in (0.4, 3.0):
        positive = canonical_phases(freq_response(rational_system, omega))
        negative = canonical_phases(freq_response(rational_system, -omega))
        assert negative.upper == pytest.approx(-positive.lower, abs=1e-9)


def test_bode_export(tmp_path, rational_system):
    path = tmp_path / 'bode.csv'
    grid = frequency_grid(50)
    envelope = bode_export(rational_system, path, grid)
    lines = path.read_text().splitlines()
    assert lines[0] == 'omega_rad_s,sigma_max,sigma_min,phi_max_deg,phi_min_deg,sectorial'
    assert len(lines) == grid.size + 1
    assert lines[-1].startswith('inf,')
    assert envelope.omega.size == 52


def test_bode_rows_of_static_gain_are_constant(tmp_path):
    path = tmp_path / 'static.csv'
    bode_export(static(3.0), path, frequency_grid(10))
    rows = {tuple(line.split(',')[1:]) for line in path.read_text().splitlines()[1:]}
    assert len(rows) == 1


def test_gang_of_four_with_zero_controller(rational_system):
    H = StaticGain(ComplexTensor3.zeros(2, 2, 2))
    blocks = freq_response(gang_of_four(rational_system, H), 0.7).data
    G = freq_response(rational_system, 0.7).data
    assert_allclose(blocks[:2, :2], identity(2, 2).data, atol=1e-12)
    assert_allclose(blocks[:2, 2:], 0, atol=1e-12)
    assert_allclose(blocks[2:, :2], G, atol=1e-12)
    assert_allclose(blocks[2:, 2:], 0, atol=1e-12)


def test_gang_of_four_is_permutation_similar_to_matrix_gang(rational_system):
    H = StaticGain(ComplexTensor3(np.array([[[0.3, 0.1], [0.0, 0.2]], [[0.1, 0.0], [0.2, 0.4]]])))
    p, q, o = 2, 2, 2
    omega = 1.3
    Gm = bcirc(freq_response(rational_system, omega))
    Hm = bcirc(freq_response(H, omega))
    S = np.linalg.inv(np.eye(q * p) + Hm @ Gm)
    matrix_gang = np.block([[S, S @ Hm], [Gm @ S, Gm @ S @ Hm]])
    order = gang_order(p, q, o)
    tensor_gang = bcirc(freq_response(gang_of_four(rational_system, H), omega))
    assert_allclose(tensor_gang, matrix_gang[np.ix_(order, order)], atol=1e-9)


def test_gang_of_four_realization_matches_response(rational_system):
    gang = gang_of_four(rational_system, static(0.5, n=2, p=2))
    A, B, C, D = gang.realization()
    order = gang_order(2, 2, 2)
    realized = response_matrix(A, B, C, D, 0.8)[np.ix_(order, order)]
    assert_allclose(realized, bcirc(freq_response(gang, 0.8)), atol=1e-9)


def test_scalar_sensitivity():
    gang = gang_of_four(scalar([1.0], [1.0, 1.0]), static(1.0))
    s = 0.5j
    assert freq_response(gang, 0.5).data[0, 0, 0] == pytest.approx((s + 1) / (s + 2))


def test_ill_posed_loop():
    with pytest.raises(IllPosed):
        gang_of_four(static(1.0), static(-1.0))


def test_feedback_stability():
    assert feedback_stable(scalar([1.0], [1.0, 1.0]), static(1.0)).stable
    result = feedback_stable(scalar([2.0], [1.0, -1.0]), static(0.25))
    assert not result
    assert_allclose(result.poles.real, [0.5])


def test_feedback_of_worked_example_with_zero_controller(rational_system):
    assert feedback_stable(rational_system, StaticGain(ComplexTensor3.zeros(2, 2, 2))).stable


def test_feedback_ignores_modes_cancelled_in_a_slice():
    lag = ([1.0], [1.0, -1.0])
    G = RationalSliceTF([[[lag]], [[lag]]])
    result = feedback_stable(G, StaticGain(identity(1, 2)))
    assert result.stable
    assert_allclose(result.poles, [-1.0], atol=1e-10)
    assert not feedback_stable(G, StaticGain(ComplexTensor3.zeros(1, 1, 2))).stable


def test_small_gain_certificate(rational_system):
    grid = frequency_grid(100)
    half = RationalSliceTF([
        [[(np.asarray(num) * 0.5 / hinf_norm(rational_system), den) for num, den in row] for row in frontal]
        for frontal in rational_system.slices
    ])
    verdict = small_gain_certificate(half, half, grid)
    assert verdict.certified
    assert verdict.worst_value == pytest.approx(0.25, rel=1e-4)
    assert verdict.feedback.stable
    assert small_gain_certificate(rational_system, StaticGain(ComplexTensor3.zeros(2, 2, 2)), grid).certified


def test_small_gain_is_only_sufficient():
    g = scalar([2.0], [1.0, 1.0])
    verdict = small_gain_certificate(g, static(1.0), frequency_grid(50))
    assert verdict.status == 'inconclusive'
    assert verdict.worst_value == pytest.approx(2.0)
    assert feedback_stable(g, static(1.0)).stable


def test_small_gain_needs_stable_open_loop():
    with pytest.raises(Unstable):
        small_gain_certificate(scalar([1.0], [1.0, -1.0]), static(0.1), frequency_grid(10))


def test_small_phase_certificate(rational_system):
    verdict = small_phase_certificate(rational_system, static(0.1, n=2, p=2), frequency_grid(100))
    assert verdict.certified
    assert verdict.feedback.stable
    assert verdict.to_dict()['note'].startswith('grid-based')


def test_small_phase_inconclusive_with_large_lag():
    # ((s + 10) / (s + 1))^2 lags by up to about 110 degrees
    lag = scalar([1.0, 20.0, 100.0], [1.0, 2.0, 1.0])
    verdict = small_phase_certificate(lag, lag, frequency_grid(100))
    assert verdict.status == 'inconclusive'
    assert verdict.violating_frequencies


def test_small_phase_assumption_violated(rational_system):
    zero = StaticGain(ComplexTensor3.zeros(2, 2, 2))
    verdict = small_phase_certificate(rational_system, zero, frequency_grid(10))
    assert verdict.status == 'assumption-violated'
    assert len(verdict.violating_frequencies) == 12
    with pytest.raises(SectorAssumptionViolated) as excinfo:
        small_phase_certificate(rational_system, zero, frequency_grid(10), strict=True)
    assert excinfo.value.frequencies[0] == 0.0
