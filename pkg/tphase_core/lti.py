"""
Frequency-domain analysis of tensor MIMO LTI systems.

A system maps s to a transfer tensor G(s); bcirc(G(s)) is an ordinary
transfer matrix, so norms, phases and closed-loop poles are all computed on
the Fourier slices of G(jw) or on a real realization of bcirc(G).

Every frequency-domain statement here is checked on a grid (0, a log sweep
and the w -> inf limit) with golden-section refinement around extrema;
certificates say so in their ``note``.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg, signal
from scipy.fft import fft
from scipy.optimize import minimize_scalar

from .conf import resolve
from .exceptions import (
    CertificateInconsistent, DimensionMismatch, IllPosed, ImproperSystem, PoleAtFrequency,
    SectorAssumptionViolated, TPhaseError, Unstable,
)
from .fileformats import fmt, write_csv_atomic
from .phase import canonical_phases
from .tensor import bcirc, fourier_slices, from_fourier, t_eigenvalues

logger = logging.getLogger(__name__)

GRID_NOTE = 'grid-based: checked on the sampled frequencies plus refinement, not for every w'


def frequency_grid(points=None, wmin=None, wmax=None):
    """0, ``points`` log-spaced frequencies in [wmin, wmax], then inf"""
    points = int(resolve(points, 'FREQ_POINTS'))
    wmin = resolve(wmin, 'FREQ_MIN')
    wmax = resolve(wmax, 'FREQ_MAX')
    return np.concatenate([[0.0], np.logspace(np.log10(wmin), np.log10(wmax), points), [np.inf]])


def _stability_threshold(poles, margin=None):
    margin = resolve(margin, 'STABILITY_MARGIN')
    radius = float(np.max(np.abs(poles))) if len(poles) else 0.0
    return -margin * (1 + radius)


def _is_stable(poles, margin=None):
    if len(poles) == 0:
        return True
    return bool(np.max(np.real(poles)) < _stability_threshold(poles, margin))


class TensorSystem:
    """Common interface: Fourier slices of G(jw), realization of bcirc(G), poles"""

    outputs = inputs = p = None

    def fourier_response(self, omega):
        raise NotImplementedError

    def response(self, omega):
        return from_fourier(self.fourier_response(omega))

    def realization(self):
        raise NotImplementedError

    def slice_realizations(self):
        """One complex (A, B, C, D) per Fourier slice of G(s)"""
        raise NotImplementedError

    def poles(self):
        A = self.realization()[0]
        return linalg.eigvals(A) if A.size else np.array([])

    @property
    def is_stable(self):
        return _is_stable(self.poles())


def freq_response(G, omega):
    return G.response(omega)


# --- representations ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StateSpaceTensor(TensorSystem):
    """dX/dt = A * X + B * U, Y = C * X + D * U, all products T-products"""
    A: object
    B: object
    C: object
    D: object

    def __post_init__(self):
        k = self.A.m
        if self.A.n != k:
            raise DimensionMismatch(f'A must be frontal-square, got {self.A.shape}')
        if len({t.p for t in (self.A, self.B, self.C, self.D)}) != 1:
            raise DimensionMismatch('A, B, C and D must share the tube length p')
        if self.B.m != k or self.C.n != k:
            raise DimensionMismatch('B and C must conform with the state dimension of A')
        if self.D.shape[:2] != (self.C.m, self.B.n):
            raise DimensionMismatch(f'D must be {self.C.m} x {self.B.n}, got {self.D.shape[:2]}')

    @property
    def outputs(self):
        return self.C.m

    @property
    def inputs(self):
        return self.B.n

    @property
    def p(self):
        return self.A.p

    @property
    def is_real(self):
        return all(t.is_real() for t in (self.A, self.B, self.C, self.D))

    @cached_property
    def _slices(self):
        return tuple(fourier_slices(t).matrices for t in (self.A, self.B, self.C, self.D))

    def poles(self):
        return t_eigenvalues(self.A)

    def fourier_response(self, omega):
        a, b, c, d = self._slices
        if np.isinf(omega):
            return d.copy()
        pencil = 1j * omega * np.eye(self.A.m) - a
        cond = np.linalg.cond(pencil)
        limit = resolve(None, 'POLE_COND_LIMIT')
        if np.any(~(cond < limit)):
            raise PoleAtFrequency(f'jw is a pole at w = {omega:g}')
        return c @ np.linalg.solve(pencil, b) + d

    def realization(self):
        matrices = tuple(bcirc(t) for t in (self.A, self.B, self.C, self.D))
        if self.is_real:
            matrices = tuple(M.real for M in matrices)
        return matrices

    def slice_realizations(self):
        return list(zip(*self._slices))


def _trim(coefficients):
    trimmed = np.trim_zeros(np.asarray(coefficients, dtype=float), 'f')
    return trimmed if trimmed.size else np.zeros(1)


@dataclass(frozen=True, eq=False)
class RationalSliceTF(TensorSystem):
    """
    Frontal slices of real-rational entries: ``slices[k][i][j] = (num, den)``,
    coefficients in descending powers of s.
    """
    slices: tuple

    def __post_init__(self):
        normalized = []
        shape = None
        for k, frontal in enumerate(self.slices):
            rows = []
            for row in frontal:
                entries = []
                for num, den in row:
                    num, den = _trim(num), _trim(den)
                    if not np.any(den):
                        raise ImproperSystem(f'slice {k} has a zero denominator')
                    if num.size > den.size:
                        raise ImproperSystem(f'slice {k} has an improper entry (deg num > deg den)')
                    entries.append((num, den))
                rows.append(tuple(entries))
            current = (len(rows), len(rows[0]) if rows else 0)
            if not rows or any(len(r) != current[1] for r in rows) or current[1] == 0:
                raise DimensionMismatch(f'slice {k} is not a rectangular matrix of entries')
            if shape is not None and current != shape:
                raise DimensionMismatch('all frontal slices must have the same size')
            shape = current
            normalized.append(tuple(rows))
        if not normalized:
            raise DimensionMismatch('a rational system needs at least one slice')
        object.__setattr__(self, 'slices', tuple(normalized))

    @property
    def outputs(self):
        return len(self.slices[0])

    @property
    def inputs(self):
        return len(self.slices[0][0])

    @property
    def p(self):
        return len(self.slices)

    def _entries(self):
        for k, frontal in enumerate(self.slices):
            for i, row in enumerate(frontal):
                for j, (num, den) in enumerate(row):
                    yield k, i, j, num, den

    def denominator_roots(self):
        roots = [np.roots(den) for _, _, _, _, den in self._entries()]
        return np.concatenate(roots) if roots else np.array([])

    @property
    def in_rh_inf(self):
        roots = self.denominator_roots()
        margin = resolve(None, 'STABILITY_MARGIN')
        return bool(roots.size == 0 or np.max(roots.real) < -margin)

    @property
    def is_stable(self):
        return self.in_rh_inf

    def time_response(self, omega):
        """G(jw) frontal slices in the time (tube) domain, shape (m, n, p)"""
        out = np.empty((self.outputs, self.inputs, self.p), dtype=complex)
        s = 1j * omega
        for k, i, j, num, den in self._entries():
            if np.isinf(omega):
                out[i, j, k] = num[0] / den[0] if num.size == den.size else 0.0
                continue
            denominator = np.polyval(den, s)
            scale = np.abs(den).sum() * max(1.0, abs(s)) ** (den.size - 1)
            if abs(denominator) <= 1e-12 * scale:
                raise PoleAtFrequency(f'entry ({k}, {i}, {j}) has a pole at w = {omega:g}')
            out[i, j, k] = np.polyval(num, s) / denominator
        return out

    def fourier_response(self, omega):
        return np.moveaxis(fft(self.time_response(omega), axis=2), 2, 0)

    def realization(self):
        """
        Real (non-minimal) realization of bcirc(G): one ``tf2ss`` block per
        nonzero entry of the block-circulant transfer matrix.
        """
        m, n, p = self.outputs, self.inputs, self.p
        D = np.zeros((m * p, n * p))
        blocks, inputs, outputs = [], [], []
        for k, i, j, num, den in self._entries():
            if not np.any(num):
                continue
            a, b, c, d = signal.tf2ss(num, den)
            for block_row in range(p):
                row = block_row * m + i
                col = ((block_row - k) % p) * n + j
                D[row, col] += d[0, 0]
                if a.size:
                    blocks.append(a)
                    inputs.append((b[:, 0], col))
                    outputs.append((c[0, :], row))
        if not blocks:
            return np.zeros((0, 0)), np.zeros((0, n * p)), np.zeros((m * p, 0)), D
        A = linalg.block_diag(*blocks)
        B = np.zeros((A.shape[0], n * p))
        C = np.zeros((m * p, A.shape[0]))
        offset = 0
        for a, (b, col), (c, row) in zip(blocks, inputs, outputs):
            size = a.shape[0]
            B[offset:offset + size, col] = b
            C[row, offset:offset + size] = c
            offset += size
        return A, B, C, D

    def _slice_entry(self, k, i, j):
        """Entry (i, j) of Fourier slice k as one numerator over a real monic denominator"""
        twiddle = np.exp(-2j * np.pi * k * np.arange(self.p) / self.p)
        denominators, terms = [], []
        for l in range(self.p):
            num, den = self.slices[l][i][j]
            if not np.any(num):
                continue
            monic = den / den[0]
            for index, known in enumerate(denominators):
                if known.size == monic.size and np.allclose(known, monic):
                    break
            else:
                index = len(denominators)
                denominators.append(monic)
            terms.append((index, twiddle[l] * num / den[0]))

        den = np.ones(1)
        for factor in denominators:
            den = np.polymul(den, factor)
        num = np.zeros(1, dtype=complex)
        for index, numerator in terms:
            for other, factor in enumerate(denominators):
                if other != index:
                    numerator = np.polymul(numerator, factor)
            num = np.polyadd(num, numerator)
        return num, den

    def slice_realizations(self):
        """Minimal realization of each Fourier slice, so no cancelled mode survives"""
        m, n = self.outputs, self.inputs
        realizations = []
        for k in range(self.p):
            entries = [(i, j, _entry_realization(*self._slice_entry(k, i, j)))
                       for i in range(m) for j in range(n)]
            realizations.append(minimal_realization(*_assemble(entries, m, n)))
        return realizations

    def poles(self):
        return self.denominator_roots()


def _entry_realization(num, den):
    """Controllable-form realization of num/den; num may be complex, den is real"""
    order = den.size - 1
    if order == 0:
        return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), np.array([[num[-1] / den[0]]])
    a = b = None
    c = np.zeros((1, order), dtype=complex)
    d = 0j
    for unit, part in ((1, num.real), (1j, num.imag)):
        if not np.any(part):
            continue
        a, b, c_part, d_part = signal.tf2ss(part, den)
        c = c + unit * c_part
        d += unit * d_part[0, 0]
    if a is None:
        return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), np.zeros((1, 1))
    return a, b, c, np.array([[d]])


def _assemble(entries, m, n):
    """Block-diagonal state space from per-entry SISO realizations"""
    blocks = [a for _, _, (a, _, _, _) in entries if a.size]
    A = linalg.block_diag(*blocks) if blocks else np.zeros((0, 0))
    B = np.zeros((A.shape[0], n), dtype=complex)
    C = np.zeros((m, A.shape[0]), dtype=complex)
    D = np.zeros((m, n), dtype=complex)
    offset = 0
    for i, j, (a, b, c, d) in entries:
        D[i, j] += d[0, 0]
        size = a.shape[0]
        if size:
            B[offset:offset + size, j] = b[:, 0]
            C[i, offset:offset + size] = c[0]
            offset += size
    return A, B, C, D


def _reachable_basis(A, B, rcond):
    """Orthonormal basis of span[B, AB, A^2 B, ...]"""
    basis = linalg.orth(B, rcond=rcond)
    while basis.shape[1]:
        grown = linalg.orth(np.hstack([basis, A @ basis]), rcond=rcond)
        if grown.shape[1] <= basis.shape[1]:
            break
        basis = grown
    return basis


def minimal_realization(A, B, C, D, rcond=None):
    """Project out unreachable and then unobservable states"""
    if A.size == 0:
        return A, B, C, D
    rcond = resolve(rcond, 'RANK_TOL')
    Q = _reachable_basis(A, B, rcond)
    A, B, C = Q.conj().T @ A @ Q, Q.conj().T @ B, C @ Q
    if A.size == 0:
        return A, B, C, D
    P = _reachable_basis(A.conj().T, C.conj().T, rcond)
    return P.conj().T @ A @ P, P.conj().T @ B, C @ P, D


@dataclass(frozen=True, eq=False)
class StaticGain(TensorSystem):
    """Memoryless system G(s) = D"""
    D: object

    @property
    def outputs(self):
        return self.D.m

    @property
    def inputs(self):
        return self.D.n

    @property
    def p(self):
        return self.D.p

    def fourier_response(self, omega):
        return fourier_slices(self.D).matrices

    def realization(self):
        D = bcirc(self.D)
        if self.D.is_real():
            D = D.real
        return np.zeros((0, 0)), np.zeros((0, D.shape[1])), np.zeros((D.shape[0], 0)), D

    def slice_realizations(self):
        return [(np.zeros((0, 0)), np.zeros((0, d.shape[1])), np.zeros((d.shape[0], 0)), d)
                for d in fourier_slices(self.D).matrices]

    def poles(self):
        return np.array([])


# --- gain ----------------------------------------------------------------------

def sigma_extremes(slices):
    """(largest, smallest) singular value of bcirc from its Fourier slices"""
    s = np.linalg.svd(slices, compute_uv=False)
    return float(s.max()), float(s.min())


def _refine_peak(func, omegas, values):
    """
    Golden-section/Brent refinement of max func(w) in log w around the grid
    argmax. ``func`` may return NaN, which counts as -inf.
    """
    values = np.where(np.isnan(values), -np.inf, values)
    index = int(np.argmax(values))
    best = (float(values[index]), float(omegas[index]))
    w = omegas[index]
    if not np.isfinite(w) or w <= 0 or not np.isfinite(best[0]):
        return best
    lower = omegas[index - 1] if index > 0 and omegas[index - 1] > 0 else w / 10
    upper = omegas[index + 1] if index + 1 < len(omegas) and np.isfinite(omegas[index + 1]) else w * 10

    def objective(x):
        try:
            value = func(10.0 ** x)
        except TPhaseError:
            return np.inf
        return -value if np.isfinite(value) else np.inf

    result = minimize_scalar(objective, bounds=(np.log10(lower), np.log10(upper)), method='bounded',
                             options={'xatol': 1e-10})
    if result.success and np.isfinite(result.fun) and -result.fun > best[0]:
        best = (float(-result.fun), float(10.0 ** result.x))
    return best


def hinf_peak(G, grid=None):
    """(||G||_inf, peak frequency) from the grid and a refinement step"""
    if not G.is_stable:
        raise Unstable('H-infinity norm needs a stable system')
    omegas = frequency_grid() if grid is None else np.asarray(grid, dtype=float)

    def gain(w):
        return sigma_extremes(G.fourier_response(w))[0]

    values = np.array([gain(w) for w in omegas])
    return _refine_peak(gain, omegas, values)


def hinf_norm(G, grid=None):
    return hinf_peak(G, grid)[0]


# --- phase ---------------------------------------------------------------------

def phase_extremes(tensor):
    """(upper, lower, sectorial) canonical phase bounds of one response tensor"""
    try:
        phases = canonical_phases(tensor)
    except TPhaseError:
        return np.nan, np.nan, False
    return phases.upper, phases.lower, True


@dataclass(frozen=True, eq=False)
class PhaseEnvelope:
    """Per-frequency phase and gain extremes of G(jw); phases NaN where not sectorial"""
    omega: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    sectorial: np.ndarray
    sigma_max: np.ndarray
    sigma_min: np.ndarray
    refined_upper: float = np.nan
    refined_lower: float = np.nan
    hinf: float = field(default=np.nan)

    @property
    def frequency_wise_sectorial(self):
        return bool(np.all(self.sectorial))

    @property
    def non_sectorial_frequencies(self):
        return [float(w) for w in self.omega[~self.sectorial]]

    @property
    def upper_bound(self):
        return float(np.nanmax(np.append(self.upper, self.refined_upper)))

    @property
    def lower_bound(self):
        return float(np.nanmin(np.append(self.lower, self.refined_lower)))

    @property
    def spread(self):
        return self.upper_bound - self.lower_bound

    @property
    def upper_bound_deg(self):
        return float(np.degrees(self.upper_bound))

    @property
    def lower_bound_deg(self):
        return float(np.degrees(self.lower_bound))

    @property
    def spread_deg(self):
        return float(np.degrees(self.spread))

    @property
    def phi_infinity(self):
        """sup of the phase over all w in R, using conjugate symmetry"""
        return max(self.upper_bound, -self.lower_bound)

    def rows(self):
        for w, smax, smin, hi, lo, ok in zip(self.omega, self.sigma_max, self.sigma_min,
                                             self.upper, self.lower, self.sectorial):
            yield [fmt(w), fmt(smax), fmt(smin), fmt(np.degrees(hi)), fmt(np.degrees(lo)), str(int(ok))]

    def to_dict(self):
        return {
            'points': int(self.omega.size),
            'lower_rad': self.lower_bound,
            'upper_rad': self.upper_bound,
            'lower_deg': self.lower_bound_deg,
            'upper_deg': self.upper_bound_deg,
            'spread_deg': self.spread_deg,
            'frequency_wise_sectorial': self.frequency_wise_sectorial,
            'non_sectorial_frequencies': self.non_sectorial_frequencies,
            'hinf': self.hinf,
        }


def phase_envelope(G, grid=None, refine=True):
    omegas = frequency_grid() if grid is None else np.asarray(grid, dtype=float)
    upper, lower, flags, smax, smin = [], [], [], [], []
    for w in omegas:
        slices = G.fourier_response(w)
        hi, lo, ok = phase_extremes(from_fourier(slices))
        gain_max, gain_min = sigma_extremes(slices)
        upper.append(hi)
        lower.append(lo)
        flags.append(ok)
        smax.append(gain_max)
        smin.append(gain_min)
    upper, lower, smax = np.array(upper), np.array(lower), np.array(smax)
    flags = np.array(flags, dtype=bool)
    if not flags.all():
        logger.info('response is not sectorial at %d of %d frequencies', (~flags).sum(), flags.size)

    refined_upper = refined_lower = np.nan
    if refine and flags.any():
        refined_upper = _refine_peak(lambda w: phase_extremes(G.response(w))[0], omegas, upper)[0]
        refined_lower = -_refine_peak(lambda w: -phase_extremes(G.response(w))[1], omegas, -lower)[0]
    return PhaseEnvelope(
        omega=omegas, upper=upper, lower=lower, sectorial=flags,
        sigma_max=smax, sigma_min=np.array(smin),
        refined_upper=refined_upper, refined_lower=refined_lower,
        hinf=float(smax.max()),
    )


def in_phase_class(envelope, alpha):
    """G in C[alpha]: frequency-wise sectorial with Phi_inf(G) < alpha"""
    return envelope.frequency_wise_sectorial and envelope.phi_infinity < alpha


def bode_export(G, path, grid=None):
    envelope = phase_envelope(G, grid)
    header = ['omega_rad_s', 'sigma_max', 'sigma_min', 'phi_max_deg', 'phi_min_deg', 'sectorial']
    write_csv_atomic(header, envelope.rows(), path)
    logger.info('wrote %d Bode rows to %s', envelope.omega.size, path)
    return envelope


# --- feedback ------------------------------------------------------------------

def _require_loop(G, H):
    if G.p != H.p or G.inputs != H.outputs or G.outputs != H.inputs:
        raise DimensionMismatch('G and H do not form a feedback loop')


def _require_well_posed(G_slices, H_slices, omega, tol=None):
    tol = resolve(tol, 'WELL_POSED_TOL')
    loop = np.eye(H_slices.shape[1]) + H_slices @ G_slices
    smallest = np.linalg.svd(loop, compute_uv=False).min()
    if smallest <= tol:
        raise IllPosed(f'I + H * G is singular at w = {omega:g} (sigma_min {smallest:.3g})')
    return loop


@dataclass(frozen=True, eq=False)
class GangOfFour(TensorSystem):
    """[[S, S * H], [G * S, G * S * H]] with S = (I + H * G)^{-1}"""
    G: object
    H: object

    def __post_init__(self):
        _require_loop(self.G, self.H)
        _require_well_posed(self.G.fourier_response(np.inf), self.H.fourier_response(np.inf), np.inf)

    @property
    def outputs(self):
        return self.G.inputs + self.G.outputs

    inputs = outputs

    @property
    def p(self):
        return self.G.p

    def fourier_response(self, omega):
        g = self.G.fourier_response(omega)
        h = self.H.fourier_response(omega)
        S = np.linalg.inv(_require_well_posed(g, h, omega))
        top = np.concatenate([S, S @ h], axis=2)
        bottom = np.concatenate([g @ S, g @ S @ h], axis=2)
        return np.concatenate([top, bottom], axis=1)

    def realization(self):
        return closed_loop_realization(self.G, self.H)


def gang_of_four(G, H):
    return GangOfFour(G, H)


def _interconnect(first, second, tol=None):
    """Loop u1 = w1 - y2, u2 = y1 - w2 around two (A, B, C, D) realizations"""
    A1, B1, C1, D1 = first
    A2, B2, C2, D2 = second
    tol = resolve(tol, 'WELL_POSED_TOL')
    loop = np.eye(D2.shape[0]) + D2 @ D1
    if np.linalg.svd(loop, compute_uv=False).min() <= tol:
        raise IllPosed('I + H(inf) G(inf) is singular')
    E = np.linalg.inv(loop)
    # u1 = E (w1 + D2 w2 - D2 C1 x1 - C2 x2), u2 = C1 x1 + D1 u1 - w2
    U_x = np.hstack([-E @ D2 @ C1, -E @ C2])
    U_w = np.hstack([E, E @ D2])
    n1, n2 = A1.shape[0], A2.shape[0]
    V_x = np.hstack([C1, np.zeros((C1.shape[0], n2))]) + D1 @ U_x
    V_w = np.hstack([np.zeros((C1.shape[0], E.shape[1])), -np.eye(C1.shape[0])]) + D1 @ U_w

    A = np.zeros((n1 + n2, n1 + n2), dtype=np.result_type(A1, A2, B1, B2, C1, C2, E))
    A[:n1, :n1] = A1
    A[n1:, n1:] = A2
    A[:n1] += B1 @ U_x
    A[n1:] += B2 @ V_x
    B = np.vstack([B1 @ U_w, B2 @ V_w])
    C = np.vstack([U_x, np.hstack([C1, np.zeros((C1.shape[0], n2))]) + D1 @ U_x])
    D = np.vstack([U_w, D1 @ U_w])
    return A, B, C, D


def closed_loop_realization(G, H, tol=None):
    """
    Realization of the loop u1 = w1 - y2, u2 = y1 - w2 around the real
    realizations of bcirc(G) and bcirc(H). Inputs (w1, w2), outputs (u1, y1),
    so its transfer matrix is the Gang of Four of bcirc(G) and bcirc(H).
    """
    _require_loop(G, H)
    return _interconnect(G.realization(), H.realization(), tol)


@dataclass(frozen=True, eq=False)
class FeedbackResult:
    stable: bool
    poles: np.ndarray
    abscissa: float
    threshold: float

    def __bool__(self):
        return self.stable

    def to_dict(self):
        return {
            'stable': self.stable,
            'abscissa': self.abscissa,
            'threshold': self.threshold,
            'poles': [[float(z.real), float(z.imag)] for z in self.poles],
        }


def feedback_stable(G, H, margin=None):
    """
    Closed-loop poles of G and H in feedback, collected over the Fourier
    slices. Rational systems enter through minimal slice realizations, so a
    pole cancelled inside a slice of G or H is not reported.
    """
    _require_loop(G, H)
    poles = []
    for first, second in zip(G.slice_realizations(), H.slice_realizations()):
        A = _interconnect(first, second)[0]
        if A.size:
            poles.append(linalg.eigvals(A))
    poles = np.concatenate(poles) if poles else np.array([])
    abscissa = float(np.max(poles.real)) if poles.size else -np.inf
    threshold = _stability_threshold(poles, margin)
    return FeedbackResult(stable=_is_stable(poles, margin), poles=poles, abscissa=abscissa, threshold=threshold)


# --- certificates --------------------------------------------------------------

CERTIFIED = 'certified'
INCONCLUSIVE = 'inconclusive'
ASSUMPTION_VIOLATED = 'assumption-violated'


@dataclass(frozen=True, eq=False)
class Verdict:
    test: str
    status: str
    worst_value: float
    worst_frequency: float
    grid_points: int
    feedback: FeedbackResult = None
    violating_frequencies: list = field(default_factory=list)
    note: str = GRID_NOTE

    @property
    def certified(self):
        return self.status == CERTIFIED

    def to_dict(self):
        return {
            'test': self.test,
            'status': self.status,
            'worst_value': self.worst_value,
            'worst_frequency': self.worst_frequency,
            'grid_points': self.grid_points,
            'feedback': self.feedback.to_dict() if self.feedback else None,
            'violating_frequencies': self.violating_frequencies,
            'note': self.note,
        }


def _confirm(test, G, H):
    feedback = feedback_stable(G, H)
    if not feedback.stable:
        raise CertificateInconsistent(f'{test} certified an unstable loop (abscissa {feedback.abscissa:.3g})')
    return feedback


def small_gain_certificate(G, H, grid=None):
    """sigma_max(G(jw)) * sigma_max(H(jw)) < 1 on the grid"""
    _require_loop(G, H)
    for name, system in (('G', G), ('H', H)):
        if not system.is_stable:
            raise Unstable(f'{name} is not stable')
    omegas = frequency_grid() if grid is None else np.asarray(grid, dtype=float)

    def loop_gain(w):
        return sigma_extremes(G.fourier_response(w))[0] * sigma_extremes(H.fourier_response(w))[0]

    values = np.array([loop_gain(w) for w in omegas])
    worst, worst_w = _refine_peak(loop_gain, omegas, values)
    if worst >= 1:
        return Verdict('small_gain', INCONCLUSIVE, worst, worst_w, omegas.size,
                       violating_frequencies=[float(w) for w in omegas[values >= 1]])
    return Verdict('small_gain', CERTIFIED, worst, worst_w, omegas.size, feedback=_confirm('small gain', G, H))


def small_phase_certificate(G, H, grid=None, strict=False):
    """
    phi_max(G) + phi_max(H) < pi and phi_min(G) + phi_min(H) > -pi on the
    grid, for G frequency-wise quasi-sectorial and H frequency-wise
    semi-sectorial. ``strict`` raises SectorAssumptionViolated instead of
    returning an assumption-violated verdict.
    """
    _require_loop(G, H)
    for name, system in (('G', G), ('H', H)):
        if not system.is_stable:
            raise Unstable(f'{name} is not stable')
    omegas = frequency_grid() if grid is None else np.asarray(grid, dtype=float)
    env_g = phase_envelope(G, omegas, refine=False)
    env_h = phase_envelope(H, omegas, refine=False)

    bad = ~(env_g.sectorial & env_h.sectorial)
    if bad.any():
        frequencies = [float(w) for w in omegas[bad]]
        if strict:
            raise SectorAssumptionViolated('sector assumptions fail on the grid', frequencies)
        return Verdict('small_phase', ASSUMPTION_VIOLATED, np.nan, frequencies[0], omegas.size,
                       violating_frequencies=frequencies)

    excess = np.maximum(env_g.upper + env_h.upper - np.pi, -np.pi - (env_g.lower + env_h.lower))
    index = int(np.argmax(excess))
    worst, worst_w = float(excess[index]), float(omegas[index])
    if worst >= 0:
        return Verdict('small_phase', INCONCLUSIVE, worst, worst_w, omegas.size,
                       violating_frequencies=[float(w) for w in omegas[excess >= 0]])
    return Verdict('small_phase', CERTIFIED, worst, worst_w, omegas.size, feedback=_confirm('small phase', G, H))
