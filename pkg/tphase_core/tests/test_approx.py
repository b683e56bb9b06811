import numpy as np
import pytest
from numpy.testing import assert_allclose

from tphase_core.approx import (
    half_phase_truncate, is_feasible_truncation, optimal_tprank_value, phase_rank_bridge,
    sample_rank_competitors, sample_tprank_competitor_phases, sample_tprank_competitors,
    sector_arithmetic_checks, t_singular_values, t_svd, tensor_rank, tprank_lower_bound_witness,
    truncate_rank, truncation_objective,
)
from tphase_core.exceptions import NotInSector, RankOutOfRange
from tphase_core.phase import GaugeSpec, canonical_phases, gauge_eval, tprank
from tphase_core.sampling import diagonal_phase_tensor, random_accretive, random_sectorial, random_tensor
from tphase_core.tensor import bcirc, identity

FRO = GaugeSpec.lp(2)


def test_t_svd_reconstructs(rng):
    A = random_tensor(rng, 3, 2, 4)
    factors = t_svd(A)
    assert_allclose(factors.reconstruct().data, A.data, atol=1e-10)
    assert_allclose(factors.sigma, np.linalg.svd(bcirc(A), compute_uv=False), atol=1e-10)


def test_singular_values_match_bcirc(rng):
    A = random_tensor(rng, 2, 3, 3)
    assert_allclose(t_singular_values(A), np.linalg.svd(bcirc(A), compute_uv=False), atol=1e-10)


@pytest.mark.parametrize('psi', [GaugeSpec.lp(2), GaugeSpec.ky_fan(2), GaugeSpec.lp(np.inf), GaugeSpec.lp(1)])
def test_truncate_rank_matches_dense_eckart_young(rng, psi):
    A = random_tensor(rng, 3, 3, 3)
    dense_sigma = np.linalg.svd(bcirc(A), compute_uv=False)
    for r in range(10):
        result = truncate_rank(A, r, psi)
        assert result.optimal_value == pytest.approx(gauge_eval(psi, dense_sigma[r:]), abs=1e-10)
        residual = np.linalg.svd(bcirc(A) - bcirc(result.E), compute_uv=False)
        assert gauge_eval(psi, residual) == pytest.approx(result.optimal_value, abs=1e-9)
        assert tensor_rank(result.E, reference=A) == r


def test_truncate_rank_limits(rng):
    A = random_tensor(rng, 2, 2, 3)
    E, value, psi = truncate_rank(A, 6)
    assert value == pytest.approx(0.0, abs=1e-12)
    assert psi == FRO
    empty = truncate_rank(A, 0)
    assert empty.optimal_value == pytest.approx(np.sqrt(3) * A.fro_norm())
    assert empty.fro_error == pytest.approx(A.fro_norm())
    with pytest.raises(RankOutOfRange):
        truncate_rank(A, 7)


def test_rank_competitors_never_win(rng):
    A = random_tensor(rng, 2, 2, 3)
    best = truncate_rank(A, 2).optimal_value
    values = sample_rank_competitors(A, 2, samples=200, rng=rng)
    assert values.min() >= best - 1e-10


def test_half_phase_truncation_of_worked_example(half_phase_tensor):
    result = half_phase_truncate(half_phase_tensor, 3)
    assert_allclose(canonical_phases(result.W).values, [0.2, 0.1, 0.05, 0, 0, 0], atol=1e-8)
    assert_allclose(result.residual_phases.values, [0.2, 0.1, 0.05], atol=1e-10)
    assert_allclose(result.kept_phases.values, [0.3, 0.2, 0.15], atol=1e-10)
    assert tprank(result.E) == 3
    assert optimal_tprank_value(half_phase_tensor, 3, GaugeSpec.ky_fan(3)) == pytest.approx(0.35)
    assert optimal_tprank_value(half_phase_tensor, 0, GaugeSpec.ky_fan(6)) == pytest.approx(1.65)


def test_half_phase_truncation_limits(half_phase_tensor):
    untouched = half_phase_truncate(half_phase_tensor, 0)
    assert_allclose(canonical_phases(untouched.W).values, canonical_phases(half_phase_tensor).values, atol=1e-10)
    assert tprank(untouched.E) == 0
    full = half_phase_truncate(half_phase_tensor, 6)
    assert truncation_objective(half_phase_tensor, full.E, FRO) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(RankOutOfRange):
        half_phase_truncate(half_phase_tensor, 7)


def test_half_phase_needs_positive_imaginary_sector():
    with pytest.raises(NotInSector):
        half_phase_truncate(diagonal_phase_tensor([[0.5, -0.3]]), 1)


def test_half_phase_optimal_value_for_every_gauge(rng):
    A = random_sectorial(rng, 2, 3, 0.05, 2.9)
    gauges = [GaugeSpec.ky_fan(k) for k in range(1, 7)] + [GaugeSpec.lp(1), GaugeSpec.lp(np.inf)]
    for r in range(7):
        result = half_phase_truncate(A, r)
        assert is_feasible_truncation(A, result.E, r)
        for psi in gauges:
            attained = truncation_objective(A, result.E, psi)
            assert attained == pytest.approx(optimal_tprank_value(A, r, psi), abs=1e-8)


def test_tprank_competitors_never_win(rng):
    A = random_sectorial(rng, 2, 2, 0.05, 2.9)
    psi = GaugeSpec.lp(1)
    best = optimal_tprank_value(A, 2, psi)
    values = sample_tprank_competitors(A, 2, psi, samples=100, rng=rng)
    assert values.size > 0
    assert values.min() >= best - 1e-8


def test_competitor_phases_are_scored_under_every_gauge(rng):
    A = random_sectorial(rng, 2, 2, 0.05, 2.9)
    rows = sample_tprank_competitor_phases(A, 1, samples=50, rng=rng)
    assert 0 < len(rows) <= 50
    assert rows.shape[1] == 4
    assert np.all(rows >= -1e-10) and np.all(rows < np.pi)
    for psi in [GaugeSpec.ky_fan(k) for k in range(1, 5)] + [GaugeSpec.lp(1), GaugeSpec.lp(np.inf)]:
        best = optimal_tprank_value(A, 1, psi)
        assert min(gauge_eval(psi, row) for row in rows) >= best - 1e-8


def test_competitor_sampling_stops_after_max_draws(rng):
    A = random_sectorial(rng, 2, 2, 0.05, 2.9)
    assert len(sample_tprank_competitor_phases(A, 1, samples=50, rng=rng, max_draws=3)) <= 3


def test_optimal_tprank_value_is_nonincreasing_in_r(rng):
    A = random_sectorial(rng, 3, 2, 0.05, 2.9)
    for k in range(1, 7):
        psi = GaugeSpec.ky_fan(k)
        values = [optimal_tprank_value(A, r, psi) for r in range(7)]
        assert np.all(np.diff(values) <= 1e-12)
        assert values[-1] == 0.0


def test_rank_bridge(rng):
    phases = np.array([[1.2, 0.0], [0.7, 0.0], [0.0, 0.0]])
    A = diagonal_phase_tensor(phases)
    bridge = phase_rank_bridge(A)
    assert bridge.holds
    assert bridge.rank == bridge.tprank == 2
    assert tprank_lower_bound_witness(A) == 2

    S = random_sectorial(rng, 3, 2, 0.1, 2.0)
    assert phase_rank_bridge(S).holds
    assert tprank_lower_bound_witness(S) == tprank(S) == 6


def test_tensor_rank_of_identity():
    assert tensor_rank(identity(2, 3)) == 6


def test_sector_arithmetic(rng):
    A = random_accretive(rng, 2, 2, max_phase=0.6)
    B = random_accretive(rng, 2, 2, max_phase=0.6)
    report = sector_arithmetic_checks(A, B)
    assert report.sum_in_sector
    assert report.product_checked
    assert report.holds


def test_sector_arithmetic_skips_outside_window():
    A = diagonal_phase_tensor([[2.6, 2.4]])
    report = sector_arithmetic_checks(A, A)
    assert not report.product_checked
    assert 'skipped' in report.message
