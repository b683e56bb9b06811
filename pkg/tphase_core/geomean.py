"""
Tensor principal powers, the T-product geometric mean and the
majorization inequalities built on it.

Everything is evaluated slice-wise in the Fourier domain; bcirc commutes
with powers and with the mean, so the dense path is only a test oracle.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .conf import resolve
from .exceptions import DimensionMismatch, NotHermitian, TPhaseError
from .kernels import (
    hermitian_part, matrix_geomean, matrix_geomean_integral_oracle, principal_power_matrix,
)
from .phase import (
    GaugeSpec, PhaseVector, canonical_phases, gauge_eval, global_phase_sort, majorizes,
    require_accretive, sectorial_factorization,
)
from .tensor import (
    require_frontal_square, conj_transpose, fourier_slices, from_fourier, is_t_hermitian,
    t_inverse, tprod,
)

logger = logging.getLogger(__name__)


def _require_pair(A, B):
    require_frontal_square(A)
    if A.shape != B.shape:
        raise DimensionMismatch(f'shapes differ: {A.shape} vs {B.shape}')


def t_power(A, alpha, pd_tol=None):
    """
    Principal power A^alpha, slice-wise in the Fourier domain.

    alpha = 1 and alpha = -1 only need invertibility; every other exponent
    needs A strictly accretive.
    """
    require_frontal_square(A)
    if alpha == 1:
        return A
    if alpha == -1:
        return t_inverse(A)
    require_accretive(A, 'A', pd_tol)
    slices = fourier_slices(A).matrices
    return from_fourier(np.array([principal_power_matrix(M, alpha) for M in slices]))


def t_geomean(A, B, pd_tol=None):
    """A # B, the unique accretive solution of X * A^{-1} * X = B"""
    _require_pair(A, B)
    require_accretive(A, 'A', pd_tol)
    require_accretive(B, 'B', pd_tol)
    fa = fourier_slices(A).matrices
    fb = fourier_slices(B).matrices
    return from_fourier(np.array([matrix_geomean(a, b) for a, b in zip(fa, fb)]))


def t_geomean_integral_oracle(A, B, **quadrature):
    _require_pair(A, B)
    require_accretive(A, 'A')
    require_accretive(B, 'B')
    fa = fourier_slices(A).matrices
    fb = fourier_slices(B).matrices
    return from_fourier(np.array([
        matrix_geomean_integral_oracle(a, b, **quadrature) for a, b in zip(fa, fb)
    ]))


def riccati_residual(X, A, B):
    """||X * A^{-1} * X - B||_F / ||B||_F"""
    lhs = tprod(tprod(X, t_inverse(A)), X)
    return float(np.linalg.norm((lhs - B).data) / max(B.fro_norm(), 1e-300))


def arithmetic_mean(X, Y):
    return (X + Y) / 2


def tprank_problem_identity(A, E):
    """
    Relative gap between E and X^{-1} # A for X = E^{-1} * A * E^{-1}.

    Needs X^{-1} and A accretive; E must be accretive for it to be the
    Riccati solution that the mean picks.
    """
    E_inv = t_inverse(E)
    X = tprod(tprod(E_inv, A), E_inv)
    recovered = t_geomean(t_inverse(X), A)
    return float(np.linalg.norm((recovered - E).data) / E.fro_norm())


# --- majorization reports -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class InequalityCheck:
    """``lhs ≺ rhs`` (or ``lhs ≺_w rhs``) with its prefix-sum outcome"""
    name: str
    lhs: np.ndarray
    rhs: np.ndarray
    result: object

    @property
    def holds(self):
        return self.result.holds

    def to_dict(self):
        return {
            'name': self.name,
            'lhs': [float(v) for v in self.lhs],
            'rhs': [float(v) for v in self.rhs],
            **self.result.to_dict(),
        }


def majorization_check(name, lhs, rhs, mode='strong', tol=None):
    return InequalityCheck(name=name, lhs=np.asarray(lhs), rhs=np.asarray(rhs), result=majorizes(rhs, lhs, mode, tol))


@dataclass(frozen=True)
class GaugeCheck:
    gauge: str
    mean_value: float
    bound: float
    holds: bool

    def to_dict(self):
        return {'gauge': self.gauge, 'mean_value': self.mean_value, 'bound': self.bound, 'holds': self.holds}


@dataclass(frozen=True, eq=False)
class MajorizationReport:
    checks: list
    gauge_checks: list = field(default_factory=list)

    @property
    def holds(self):
        return all(c.holds for c in self.checks) and all(g.holds for g in self.gauge_checks)

    def to_dict(self):
        return {
            'holds': self.holds,
            'checks': [c.to_dict() for c in self.checks],
            'gauge_checks': [g.to_dict() for g in self.gauge_checks],
        }


def t_hermitian_eigenvalues(X, tol=None):
    """Real T-eigenvalues of a T-Hermitian tensor, sorted nonincreasing"""
    if not is_t_hermitian(X, tol):
        raise NotHermitian('tensor is not T-Hermitian')
    slices = hermitian_part(fourier_slices(X).matrices)
    return np.sort(np.linalg.eigvalsh(slices).reshape(-1))[::-1]


def check_kyfan_eig(X, Y, tol=None):
    """lambda(X + Y) ≺ lambda↓(X) + lambda↓(Y)"""
    lx = t_hermitian_eigenvalues(X)
    ly = t_hermitian_eigenvalues(Y)
    ls = t_hermitian_eigenvalues(X + Y)
    return MajorizationReport(checks=[majorization_check('ky_fan', ls, lx + ly, tol=tol)])


def check_lidskii_eig(X, Y, tol=None):
    """lambda↓(X + Y) - lambda↓(X) ≺ lambda↓(Y)"""
    lx = t_hermitian_eigenvalues(X)
    ly = t_hermitian_eigenvalues(Y)
    ls = t_hermitian_eigenvalues(X + Y)
    return MajorizationReport(checks=[majorization_check('lidskii', ls - lx, ly, tol=tol)])


def square_root_check(A, name='square_root', tol=None):
    """2 phi(A^{1/2}) ≺ phi(A)"""
    root_phases = canonical_phases(t_power(A, 0.5)).values
    return majorization_check(name, 2 * root_phases, canonical_phases(A).values, tol=tol)


def check_phase_majorization(A, B, tol=None):
    """
    phi(A # B) ≺ (phi(A) + phi(B)) / 2, plus the Ky-Fan/l1 gauge bounds and
    the square-root corollary for both arguments.
    """
    tol = resolve(tol, 'MAJORIZATION_TOL')
    mean = t_geomean(A, B)
    phi_a = canonical_phases(A).values
    phi_b = canonical_phases(B).values
    phi_mean = canonical_phases(mean).values
    checks = [majorization_check('geometric_mean', phi_mean, (phi_a + phi_b) / 2, tol=tol)]
    checks.append(square_root_check(A, 'square_root_a', tol))
    checks.append(square_root_check(B, 'square_root_b', tol))

    gauges = [GaugeSpec.ky_fan(k) for k in range(1, len(phi_a) + 1)] + [GaugeSpec.lp(1)]
    gauge_checks = []
    for psi in gauges:
        value = gauge_eval(psi, phi_mean)
        bound = (gauge_eval(psi, phi_a) + gauge_eval(psi, phi_b)) / 2
        gauge_checks.append(GaugeCheck(gauge=str(psi), mean_value=value, bound=bound, holds=value <= bound + tol))
    return MajorizationReport(checks=checks, gauge_checks=gauge_checks)


@dataclass(frozen=True, eq=False)
class MaximalElementWitness:
    """
    X = T_A^{-1} * T_B and the phases of (X^H * A * X) # B.

    ``slice_bound`` pairs phases slice by slice (what the congruence can
    reach); ``bound`` is the global (phi(A) + phi(B)) / 2. The two agree
    whenever the slice pairing matches the global order, e.g. for p = 1.
    """
    X: object
    achieved: PhaseVector
    bound: np.ndarray
    slice_bound: np.ndarray
    attains_bound: bool
    majorized: object

    def to_dict(self):
        return {
            'achieved': self.achieved.to_dict(),
            'bound': [float(v) for v in self.bound],
            'slice_bound': [float(v) for v in self.slice_bound],
            'attains_bound': self.attains_bound,
            'majorized': self.majorized.to_dict(),
        }


def maximal_element_witness(A, B, atol=1e-8):
    _require_pair(A, B)
    require_accretive(A, 'A')
    require_accretive(B, 'B')
    fact_a = sectorial_factorization(A)
    fact_b = sectorial_factorization(B)
    X = tprod(t_inverse(fact_a.T), fact_b.T)
    congruent = tprod(tprod(conj_transpose(X), A), X)
    achieved = canonical_phases(t_geomean(congruent, B))

    bound = (fact_a.phases.values + fact_b.phases.values) / 2
    slice_bound = global_phase_sort((fact_a.slice_phases + fact_b.slice_phases) / 2).values
    attains = bool(np.allclose(achieved.values, bound, rtol=0, atol=atol))
    return MaximalElementWitness(
        X=X,
        achieved=achieved,
        bound=bound,
        slice_bound=slice_bound,
        attains_bound=attains,
        majorized=majorizes(bound, achieved.values),
    )


# --- phase-domain Lidskii probe -----------------------------------------------

def phase_lidskii_gap(A, B, tol=None):
    """Check 2 phi(A # B) - phi(A) ≺ phi(B); returns the InequalityCheck"""
    phi_mean = canonical_phases(t_geomean(A, B)).values
    phi_a = canonical_phases(A).values
    phi_b = canonical_phases(B).values
    return majorization_check('phase_lidskii', 2 * phi_mean - phi_a, phi_b, tol=tol)


def probe_phase_lidskii(trials, seed, sizes=((2, 2),), max_phase=1.3, tol=None, output_dir=None):
    """
    Sample accretive pairs and record how far the phase Lidskii inequality
    fails. Reports only; nothing here asserts the inequality.

    Trial seeds are children of ``SeedSequence(seed)`` so any trial can be
    replayed alone. With ``output_dir`` the worst pair is written as .ttj.
    """
    from .fileformats import write_ttj
    from .sampling import random_accretive

    tol = resolve(tol, 'MAJORIZATION_TOL')
    sizes = [tuple(int(v) for v in size) for size in sizes]
    children = np.random.SeedSequence(seed).spawn(trials)
    logger.info('phase Lidskii probe: %d trials, seed %s', trials, seed)

    worst = None
    violations = 0
    skipped = 0
    for index, child in enumerate(children):
        rng = np.random.default_rng(child)
        n, p = sizes[index % len(sizes)]
        A = random_accretive(rng, n, p, max_phase)
        B = random_accretive(rng, n, p, max_phase)
        try:
            check = phase_lidskii_gap(A, B, tol)
        except TPhaseError as exc:
            logger.debug('trial %d skipped: %s', index, exc)
            skipped += 1
            continue
        excess = max(0.0, check.result.max_excess)
        if not check.holds:
            violations += 1
        if worst is None or excess > worst[0]:
            worst = (excess, index, A, B, (n, p))

    report = {
        'trials': trials,
        'seed': seed,
        'sizes': [list(s) for s in sizes],
        'tolerance': tol,
        'violations': violations,
        'skipped': skipped,
        'max_violation': worst[0] if worst else 0.0,
        'worst_pair': None,
        'worst_pair_files': [],
        'versions': {'numpy': np.__version__, 'scipy': scipy.__version__},
    }
    if worst is not None:
        _, index, A, B, (n, p) = worst
        report['worst_pair'] = {'trial': index, 'spawn_key': list(children[index].spawn_key), 'n': n, 'p': p}
        if output_dir is not None:
            output_dir = Path(output_dir)
            output_dir.mkdir(parents=True, exist_ok=True)
            files = [output_dir / 'worst_A.ttj', output_dir / 'worst_B.ttj']
            write_ttj(A, files[0])
            write_ttj(B, files[1])
            report['worst_pair_files'] = [str(f) for f in files]
    return report
