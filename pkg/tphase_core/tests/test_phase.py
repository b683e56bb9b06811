import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from tphase_core.exceptions import NotAccretive, NotSectorial
from tphase_core.kernels import sectorial_decompose_matrix
from tphase_core.phase import (
    GaugeSpec, canonical_phases, classify_sector, gauge_eval, global_phase_sort, is_accretive,
    majorizes, phase_gauge, require_accretive, sectorial_factorization, tprank,
)
from tphase_core.sampling import diagonal_phase_tensor, random_accretive, random_nonsingular, random_sectorial
from tphase_core.tensor import bcirc, conj_transpose, from_fourier, identity, tprod

EXAMPLE_PHASES = [0.6, 0.4, 0.3, 0.2, 0.1, 0.05]
SAMPLE_GAUGES = [
    GaugeSpec.ky_fan(1), GaugeSpec.ky_fan(3), GaugeSpec.lp(1), GaugeSpec.lp(2), GaugeSpec.lp(math.inf),
    GaugeSpec('weighted', weights=(3.0, 2.0, 1.0)),
]


def test_canonical_phases_of_worked_example(half_phase_tensor):
    phases = canonical_phases(half_phase_tensor)
    assert_allclose(phases.values, EXAMPLE_PHASES, atol=1e-10)
    assert_array_equal(phases.provenance, [[0, 0], [1, 0], [2, 0], [0, 1], [1, 1], [2, 1]])
    assert tprank(half_phase_tensor) == 6


def test_identity_has_zero_phases():
    phases = canonical_phases(identity(2, 3))
    assert_allclose(phases.values, np.zeros(6), atol=1e-12)
    assert tprank(identity(2, 3)) == 0


def test_canonical_phases_match_dense_bcirc(rng):
    A = random_sectorial(rng, 2, 3, 0.05, 2.0)
    dense = sectorial_decompose_matrix(bcirc(A)).phases
    assert_allclose(canonical_phases(A).values, dense, atol=1e-8)


def test_phase_gauge_is_congruence_invariant(rng):
    A = random_accretive(rng, 2, 3)
    X = random_nonsingular(rng, 2, 3)
    B = tprod(tprod(conj_transpose(X), A), X)
    assert_allclose(canonical_phases(B).values, canonical_phases(A).values, atol=1e-8)
    for psi in SAMPLE_GAUGES:
        assert phase_gauge(B, psi) == pytest.approx(phase_gauge(A, psi), abs=1e-8)


def test_factorization_reconstructs(rng):
    A = random_sectorial(rng, 3, 4, -0.4, 1.9)
    factorization = sectorial_factorization(A)
    T = factorization.T
    assert_allclose(tprod(tprod(conj_transpose(T), factorization.D), T).data, A.data, atol=1e-9)
    assert factorization.permutation.shape == (12,)
    assert np.all(np.diff(factorization.phases.values) <= 0)


def test_phases_of_sampled_sector_stay_inside(rng):
    phases = canonical_phases(random_sectorial(rng, 2, 3, 0.2, 1.1))
    assert phases.lower >= 0.2 - 1e-9
    assert phases.upper <= 1.1 + 1e-9
    assert phases.spread < np.pi


def test_ties_break_by_slice_then_position():
    vector = global_phase_sort([[0.5, 0.1], [0.5, 0.5]])
    assert_array_equal(vector.provenance, [[0, 0], [1, 0], [1, 1], [0, 1]])


def test_non_sectorial_tensor():
    with pytest.raises(NotSectorial):
        canonical_phases(from_fourier(np.array([np.diag([1.0, -1.0])])))


def test_phase_vector_helpers(half_phase_tensor):
    phases = canonical_phases(half_phase_tensor)
    kept, residual = phases.split(2)
    assert_allclose(kept.values, [0.6, 0.4])
    assert_allclose(residual.values, [0.3, 0.2, 0.1, 0.05])
    assert len(phases.padded(8)) == 8
    assert phases.to_dict()['values'][0] == pytest.approx(0.6)


@pytest.mark.parametrize('text, canonical', [
    ('linf', 'linf'),
    ('L1', 'l1'),
    ('fro', 'lp:2'),
    ('lp:inf', 'linf'),
    ('kyfan:3', 'kyfan:3'),
    ('weighted:1,0.5', 'weighted:1,0.5'),
])
def test_gauge_parse(text, canonical):
    assert str(GaugeSpec.parse(text)) == canonical
    assert GaugeSpec.parse(canonical) == GaugeSpec.parse(text)


@pytest.mark.parametrize('text', ['kyfan:0', 'lp:0.5', 'weighted:0.5,1', 'nuclear', 'kyfan:x'])
def test_gauge_parse_rejects(text):
    with pytest.raises(ValueError):
        GaugeSpec.parse(text)


def test_gauge_values():
    x = [0.1, -0.4, 0.3]
    assert gauge_eval(GaugeSpec.ky_fan(2), x) == pytest.approx(0.7)
    assert gauge_eval(GaugeSpec.lp(1), x) == pytest.approx(0.8)
    assert gauge_eval(GaugeSpec.lp(math.inf), x) == pytest.approx(0.4)
    assert gauge_eval(GaugeSpec.lp(2), x) == pytest.approx(math.sqrt(0.26))
    assert gauge_eval(GaugeSpec('weighted', weights=(1.0, 0.5)), x) == pytest.approx(0.55)
    assert gauge_eval(GaugeSpec.lp(2), []) == 0.0


def test_gauges_are_symmetric_norms(rng):
    x, y = rng.standard_normal(6), rng.standard_normal(6)
    signs = rng.choice([-1.0, 1.0], size=6)
    permuted = signs * x[rng.permutation(6)]
    for psi in SAMPLE_GAUGES:
        assert gauge_eval(psi, x + y) <= gauge_eval(psi, x) + gauge_eval(psi, y) + 1e-12
        assert gauge_eval(psi, -2.5 * x) == pytest.approx(2.5 * gauge_eval(psi, x))
        assert gauge_eval(psi, permuted) == pytest.approx(gauge_eval(psi, x))


def test_ky_fan_dominance_bounds_every_gauge(rng):
    y = np.sort(rng.uniform(0, 1, 6))[::-1]
    mixing = sum(weight * np.eye(6)[rng.permutation(6)] for weight in rng.dirichlet(np.ones(4)))
    x = 0.9 * mixing @ y
    for k in range(1, 7):
        assert gauge_eval(GaugeSpec.ky_fan(k), x) <= gauge_eval(GaugeSpec.ky_fan(k), y)
    for psi in SAMPLE_GAUGES:
        assert gauge_eval(psi, x) <= gauge_eval(psi, y) + 1e-12


def test_phase_gauge_of_example(half_phase_tensor):
    assert phase_gauge(half_phase_tensor, GaugeSpec.ky_fan(3)) == pytest.approx(1.3)
    assert phase_gauge(half_phase_tensor, GaugeSpec.ky_fan(6)) == pytest.approx(1.65)


def test_majorization():
    assert majorizes([2, 0], [1, 1]).holds
    result = majorizes([1, 1], [2, 0])
    assert not result
    assert result.violated_prefix == 1
    assert majorizes([2, 1], [1, 1], mode='weak').holds
    assert not majorizes([2, 1], [1, 1], mode='strong').holds


def test_sector_class(half_phase_tensor):
    sector = classify_sector(half_phase_tensor)
    assert sector.alpha == pytest.approx(0.05)
    assert sector.beta == pytest.approx(0.6)
    assert sector.accretive
    assert sector.positive_imaginary
    assert not sector.negative_imaginary
    assert sector.contains(0.0, np.pi / 2)
    assert not sector.contains(0.1, np.pi / 2)


def test_negative_imaginary_class():
    sector = classify_sector(diagonal_phase_tensor([[-1.0, -0.2]]))
    assert sector.negative_imaginary
    assert not sector.positive_imaginary


def test_accretive_tensor(half_phase_tensor):
    assert is_accretive(half_phase_tensor)
    assert not is_accretive(-identity(2, 2))
    with pytest.raises(NotAccretive):
        require_accretive(diagonal_phase_tensor([[2.0, 0.1]]))
