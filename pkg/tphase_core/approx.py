"""
Low-rank and low T-phase-rank approximation.

Rank truncation keeps the r largest T-singular values (globally sorted
across Fourier slices); its optimal value under a symmetric gauge is the
gauge of the discarded singular values, i.e. the Eckart-Young/Schmidt-Mirsky
value of bcirc(A). Half-phase truncation cancels the r largest canonical
phases through the congruence E^{-1} * A * E^{-1}.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .conf import resolve
from .exceptions import NotInSector, RankOutOfRange, TPhaseError
from .kernels import hermitian_part
from .phase import (
    GaugeSpec, PhaseVector, canonical_phases, count_nonzero_phases, gauge_eval, majorizes,
    sectorial_factorization, sort_with_provenance,
)
from .sampling import complex_gaussian, congruence_slices
from .tensor import (
    conj_transpose, fourier_slices, from_fourier, identity, require_frontal_square, t_eigenvalues,
    t_inverse, tprod,
)

logger = logging.getLogger(__name__)

FROBENIUS = GaugeSpec.lp(2)


# --- T-SVD ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TSVDFactors:
    """A = U * S * V^H with Fourier-domain factors kept for truncation"""
    U: object
    S: object
    V: object
    sigma: np.ndarray
    provenance: np.ndarray
    slice_sigma: np.ndarray

    def reconstruct(self):
        return tprod(tprod(self.U, self.S), conj_transpose(self.V))


def _slice_svd(A):
    return np.linalg.svd(fourier_slices(A).matrices, full_matrices=True)


def t_svd(A):
    u, s, vh = _slice_svd(A)
    p, m, n = u.shape[0], u.shape[1], vh.shape[1]
    k = s.shape[1]
    diagonals = np.zeros((p, m, n), dtype=complex)
    diagonals[:, np.arange(k), np.arange(k)] = s
    sigma, provenance = sort_with_provenance(s)
    return TSVDFactors(
        U=from_fourier(u),
        S=from_fourier(diagonals),
        V=from_fourier(np.conj(np.swapaxes(vh, -1, -2))),
        sigma=sigma,
        provenance=provenance,
        slice_sigma=s,
    )


def t_singular_values(A):
    """Globally sorted T-singular values (the singular values of bcirc(A))"""
    s = np.linalg.svd(fourier_slices(A).matrices, compute_uv=False)
    return np.sort(s.reshape(-1))[::-1]


@dataclass(frozen=True, eq=False)
class RankTruncation:
    """
    Result of ``truncate_rank``.

    ``optimal_value`` is the gauge of the discarded T-singular values, which
    measures bcirc(A - E); ``fro_error`` is the tensor Frobenius norm
    ||A - E||_F = ||bcirc(A - E)||_F / sqrt(p).
    """
    E: object
    r: int
    optimal_value: float
    psi: GaugeSpec
    sigma: np.ndarray
    fro_error: float

    def __iter__(self):
        return iter((self.E, self.optimal_value, self.psi))

    def sidecar(self):
        return {
            'r': self.r,
            'gauge': str(self.psi),
            'optimal_value': self.optimal_value,
            'kept_singular_values': [float(v) for v in self.sigma[:self.r]],
            'residual_singular_values': [float(v) for v in self.sigma[self.r:]],
            'tensor_fro_error': self.fro_error,
        }


def truncate_rank(A, r, psi=None):
    psi = psi or FROBENIUS
    u, s, vh = _slice_svd(A)
    k = s.shape[1]
    total = s.size
    if not 0 <= r <= total:
        raise RankOutOfRange(f'r must lie in [0, {total}], got {r}')
    sigma, provenance = sort_with_provenance(s)

    kept = np.zeros_like(s)
    for slice_index, position in provenance[:r]:
        kept[slice_index, position] = s[slice_index, position]
    E = from_fourier(u[:, :, :k] @ (kept[:, :, None] * vh[:, :k, :]))
    value = gauge_eval(psi, sigma[r:])
    logger.debug('rank-%d truncation, %s value %.6g', r, psi, value)
    return RankTruncation(
        E=E, r=int(r), optimal_value=value, psi=psi, sigma=sigma,
        fro_error=float(np.linalg.norm((A - E).data)),
    )


def sample_rank_competitors(A, r, samples=None, rng=None, psi=None):
    """
    Gauge values of random approximants with rank(bcirc(E)) <= r.

    Each sample spreads the rank budget over random Fourier slices, starts
    from random singular subspaces mixed with the leading ones, and fits
    the best coefficients on them.
    """
    psi = psi or FROBENIUS
    samples = int(resolve(samples, 'COMPETITOR_SAMPLES'))
    rng = np.random.default_rng(rng)
    slices = fourier_slices(A).matrices
    p, m, n = slices.shape
    u, s, vh = np.linalg.svd(slices, full_matrices=False)
    k = s.shape[1]

    values = np.empty(samples)
    for index in range(samples):
        budget = np.bincount(rng.integers(0, p, size=r), minlength=p) if r else np.zeros(p, dtype=int)
        residual = []
        noise = rng.uniform(0, 1)
        for i in range(p):
            ri = min(int(budget[i]), k)
            if ri == 0:
                residual.append(s[i])
                continue
            basis = u[i, :, :ri] + noise * complex_gaussian(rng, m, ri)
            Q, _ = np.linalg.qr(basis)
            approx = Q @ (Q.conj().T @ slices[i])
            residual.append(np.linalg.svd(slices[i] - approx, compute_uv=False))
        values[index] = gauge_eval(psi, np.concatenate(residual))
    return values


# --- half-phase truncation ----------------------------------------------------

def _require_positive_imaginary(phases, zero_tol=None, branch_tol=None):
    zero_tol = resolve(zero_tol, 'PHASE_ZERO_TOL')
    branch_tol = resolve(branch_tol, 'BRANCH_TOL')
    if phases.lower < -zero_tol or phases.upper >= np.pi - branch_tol:
        raise NotInSector(
            f'canonical phases span [{phases.lower:.6g}, {phases.upper:.6g}], outside [0, pi)'
        )


def _require_rank(r, total):
    if not 0 <= r <= total:
        raise RankOutOfRange(f'r must lie in [0, {total}], got {r}')


@dataclass(frozen=True, eq=False)
class HalfPhaseTruncation:
    E: object
    r: int
    kept_phases: PhaseVector
    residual_phases: PhaseVector
    W: object

    def sidecar(self, psi=None, optimal_value=None):
        payload = {
            'r': self.r,
            'kept_phases': self.kept_phases.to_dict(),
            'residual_phases': self.residual_phases.to_dict(),
        }
        if psi is not None:
            payload['gauge'] = str(psi)
            payload['optimal_value'] = optimal_value
        return payload


def half_phase_truncate(A, r, zero_tol=None, branch_tol=None):
    """
    E = T^H * Lambda * T with Lambda carrying e^{i phi_k / 2} at the r
    largest canonical phases (ties by slice, then in-slice index) and 1
    elsewhere, so W = E^{-1} * A * E^{-1} keeps only phi_{r+1}, ..., phi_np.
    """
    require_frontal_square(A)
    factorization = sectorial_factorization(A)
    phases = factorization.phases
    _require_positive_imaginary(phases, zero_tol, branch_tol)
    _require_rank(r, len(phases))

    half = np.zeros_like(factorization.slice_phases)
    for (slice_index, position), phi in zip(phases.provenance[:r], phases.values[:r]):
        half[slice_index, position] = phi / 2
    frames = factorization.slice_factors
    E = from_fourier(congruence_slices(frames, half))
    E_inv = t_inverse(E)
    W = tprod(tprod(E_inv, A), E_inv)

    kept, residual = phases.split(r)
    logger.debug('half-phase truncation r=%d, residual phases %s', r, residual.values)
    return HalfPhaseTruncation(
        E=E,
        r=int(r),
        kept_phases=PhaseVector(kept.values / 2, kept.provenance),
        residual_phases=residual,
        W=W,
    )


def optimal_tprank_value(A, r, psi, zero_tol=None, branch_tol=None):
    """psi(phi_{r+1}(A), ..., phi_np(A), 0, ..., 0)"""
    phases = canonical_phases(A)
    _require_positive_imaginary(phases, zero_tol, branch_tol)
    _require_rank(r, len(phases))
    return gauge_eval(psi, phases.values[r:])


def truncation_objective(A, E, psi):
    """Phase gauge of E^{-1} * A * E^{-1}"""
    E_inv = t_inverse(E)
    return gauge_eval(psi, canonical_phases(tprod(tprod(E_inv, A), E_inv)).values)


def is_feasible_truncation(A, E, r, zero_tol=None, branch_tol=None):
    """E sectorial with tprank(E) <= r and E^{-1} * A * E^{-1} in C[0, pi)"""
    try:
        if count_nonzero_phases(canonical_phases(E).values, zero_tol) > r:
            return False
        E_inv = t_inverse(E)
        _require_positive_imaginary(canonical_phases(tprod(tprod(E_inv, A), E_inv)), zero_tol, branch_tol)
    except TPhaseError:
        return False
    return True


def sample_tprank_competitor_phases(A, r, samples=None, rng=None, max_frame_noise=0.5,
                                    grid_points=None, max_draws=None):
    """
    Canonical phases of W = E^{-1} * A * E^{-1} for random feasible E, one
    row per draw. E takes the congruence frames of A, perturbed, with
    half-phases at r randomly chosen positions. Infeasible draws are
    discarded; drawing stops at ``samples`` rows or ``max_draws`` attempts.
    """
    samples = int(resolve(samples, 'COMPETITOR_SAMPLES'))
    grid_points = int(resolve(grid_points, 'COMPETITOR_GRID_POINTS'))
    max_draws = 4 * samples if max_draws is None else int(max_draws)
    rng = np.random.default_rng(rng)
    factorization = sectorial_factorization(A)
    frames = factorization.slice_factors
    slice_phases = factorization.slice_phases
    p, n = slice_phases.shape
    A_slices = fourier_slices(A).matrices

    rows, draws = [], 0
    while len(rows) < samples and draws < max_draws:
        draws += 1
        chosen = rng.choice(p * n, size=r, replace=False)
        half = np.zeros(p * n)
        half[chosen] = slice_phases.reshape(-1)[chosen] / 2 * rng.uniform(0.5, 1.0)
        noise = rng.uniform(0, max_frame_noise)
        perturbed = frames + noise * complex_gaussian(rng, p, n, n) * np.abs(frames).mean()
        E_slices = congruence_slices(perturbed, half.reshape(p, n))
        try:
            if count_nonzero_phases(canonical_phases(from_fourier(E_slices), grid_points=grid_points).values) > r:
                continue
            E_inv = np.linalg.inv(E_slices)
            phases = canonical_phases(from_fourier(E_inv @ A_slices @ E_inv), grid_points=grid_points)
            _require_positive_imaginary(phases)
        except (TPhaseError, np.linalg.LinAlgError):
            continue
        rows.append(phases.values)
    logger.debug('competitors r=%d: %d feasible of %d draws', r, len(rows), draws)
    return np.array(rows).reshape(len(rows), p * n)


def sample_tprank_competitors(A, r, psi, samples=None, rng=None, max_frame_noise=0.5):
    """Objective values of random feasible E; fewer than ``samples`` may come back"""
    phases = sample_tprank_competitor_phases(A, r, samples, rng, max_frame_noise)
    return np.array([gauge_eval(psi, row) for row in phases])


# --- rank / phase-rank bridge -------------------------------------------------

@dataclass(frozen=True, eq=False)
class RankBridge:
    """A = M + R with M = T^H * T T-positive definite and rank(R) = tprank(A)"""
    R: object
    M: object
    rank: int
    tprank: int
    min_eig_M: float

    @property
    def holds(self):
        return self.rank == self.tprank and self.min_eig_M > 0

    def to_dict(self):
        return {'rank': self.rank, 'tprank': self.tprank, 'min_eig_M': self.min_eig_M, 'holds': self.holds}


def tensor_rank(A, reference=None, rtol=None):
    """rank(bcirc(A)) with threshold rtol * sigma_max (of ``reference`` too, if given)"""
    rtol = resolve(rtol, 'RANK_TOL')
    sigma = t_singular_values(A)
    scale = sigma[0] if sigma.size else 0.0
    if reference is not None:
        scale = max(scale, t_singular_values(reference)[0])
    if scale == 0:
        return 0
    return int(np.count_nonzero(sigma > rtol * scale))


def phase_rank_bridge(A, zero_tol=None, rtol=None):
    factorization = sectorial_factorization(A)
    T = factorization.T
    M = tprod(conj_transpose(T), T)
    R = A - M
    min_eig = float(np.linalg.eigvalsh(hermitian_part(fourier_slices(M).matrices)).min())
    return RankBridge(
        R=R,
        M=M,
        rank=tensor_rank(R, reference=A, rtol=rtol),
        tprank=count_nonzero_phases(factorization.phases.values, zero_tol),
        min_eig_M=min_eig,
    )


def congruence_rank(A, T, rtol=None):
    """rank(T^H * A * T - I): the quantity minimized over nonsingular T"""
    shifted = tprod(tprod(conj_transpose(T), A), T) - identity(A.n, A.p)
    return tensor_rank(shifted, reference=identity(A.n, A.p), rtol=rtol)


def tprank_lower_bound_witness(A, rtol=None):
    """congruence_rank at T = T_A^{-1}, where T^H * A * T is the phase tensor D"""
    return congruence_rank(A, t_inverse(sectorial_factorization(A).T), rtol)


# --- sector arithmetic --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SectorArithmeticReport:
    sum_in_sector: bool
    sum_sector: tuple
    product_checked: bool
    product_holds: bool
    product_result: object
    message: str

    @property
    def holds(self):
        return self.sum_in_sector and (self.product_holds or not self.product_checked)

    def to_dict(self):
        return {
            'sum_in_sector': self.sum_in_sector,
            'sum_sector': list(self.sum_sector),
            'product_checked': self.product_checked,
            'product_holds': self.product_holds,
            'product': self.product_result.to_dict() if self.product_result else None,
            'message': self.message,
        }


def sector_arithmetic_checks(A, B, alpha=None, beta=None, tol=None):
    """
    (a) A + B stays in C[alpha, beta]; (b) angle(lambda(A * B)) is weakly
    majorized by phi(A) + phi(B) when the eigen-arguments of A * B lie in
    (gamma(A) + gamma(B) - pi, gamma(A) + gamma(B) + pi).

    The sector defaults to the hull of both phase ranges.
    """
    tol = resolve(tol, 'MAJORIZATION_TOL')
    phi_a = canonical_phases(A)
    phi_b = canonical_phases(B)
    if alpha is None:
        alpha = min(phi_a.lower, phi_b.lower)
    if beta is None:
        beta = max(phi_a.upper, phi_b.upper)

    phi_sum = canonical_phases(A + B)
    sum_ok = phi_sum.lower >= alpha - tol and phi_sum.upper <= beta + tol

    center = (phi_a.upper + phi_a.lower) / 2 + (phi_b.upper + phi_b.lower) / 2
    eigenvalues = t_eigenvalues(tprod(A, B))
    # principal eigen-arguments; the window is taken literally, no unwrapping
    args = np.angle(eigenvalues)
    window = bool(np.all(np.abs(args - center) < np.pi - tol))
    if not window:
        message = 'window condition not met, check skipped'
        return SectorArithmeticReport(sum_ok, (phi_sum.lower, phi_sum.upper), False, False, None, message)

    result = majorizes(phi_a.values + phi_b.values, args, mode='weak', tol=tol)
    message = 'product phases weakly majorized' if result.holds else 'product majorization violated'
    return SectorArithmeticReport(sum_ok, (phi_sum.lower, phi_sum.upper), True, result.holds, result, message)
