"""
Canonical T-phases and everything measured on them.

Phases of a sectorial tensor are the phases of bcirc(A); since bcirc(A) is
unitarily similar to diag(A_1, ..., A_p), they are collected slice by slice
and sorted globally (ties: slice index, then in-slice index).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .conf import resolve
from .exceptions import BranchSpread, DimensionMismatch, NotAccretive, NotSectorial
from .kernels import hermitian_part, sectorial_decompose_matrix, spectral_norm, spread_message
from .tensor import from_fourier, fourier_slices, sectoriality_margin

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Nonincreasing phases with (slice index, in-slice index) per entry"""
    values: np.ndarray
    provenance: np.ndarray

    def __len__(self):
        return len(self.values)

    @property
    def upper(self):
        return float(self.values[0])

    @property
    def lower(self):
        return float(self.values[-1])

    @property
    def spread(self):
        return self.upper - self.lower

    def padded(self, length):
        """Zero-extension, phi_k = 0 for k beyond np"""
        out = np.zeros(max(length, len(self.values)))
        out[:len(self.values)] = self.values
        return out

    def split(self, r):
        """(first r entries, remaining entries), provenance kept"""
        return (
            PhaseVector(self.values[:r], self.provenance[:r]),
            PhaseVector(self.values[r:], self.provenance[r:]),
        )

    def to_dict(self):
        return {
            'values': [float(v) for v in self.values],
            'provenance': [[int(s), int(k)] for s, k in self.provenance],
        }


@dataclass(frozen=True, eq=False)
class SectorialFactorization:
    """
    A = T^H * D * T assembled from slice decompositions A_i = T_i^H D_i T_i.

    ``slice_factors[i]`` is T_i with rows ordered so that ``slice_phases[i]``
    is nonincreasing; ``phases`` is the global sort of all slice phases.
    """
    slice_factors: np.ndarray
    slice_phases: np.ndarray
    gamma: float
    phases: PhaseVector

    @property
    def n(self):
        return self.slice_factors.shape[1]

    @property
    def p(self):
        return self.slice_factors.shape[0]

    @property
    def permutation(self):
        """Flat Fourier-domain positions (slice * n + in-slice) in sorted order"""
        prov = self.phases.provenance
        return prov[:, 0] * self.n + prov[:, 1]

    @property
    def T(self):
        return from_fourier(self.slice_factors)

    @property
    def D(self):
        p, n = self.slice_phases.shape
        diagonals = np.zeros((p, n, n), dtype=complex)
        idx = np.arange(n)
        diagonals[:, idx, idx] = np.exp(1j * self.slice_phases)
        return from_fourier(diagonals)


def sort_with_provenance(table):
    """
    Flatten a (p, k) per-slice table and sort it nonincreasing.

    Ties keep slice-major order, so they break by slice index and then
    in-slice index. Returns ``(values, provenance)``.
    """
    table = np.asarray(table, dtype=float)
    k = table.shape[1]
    flat = table.reshape(-1)
    order = np.argsort(-flat, kind='stable')
    return flat[order], np.stack([order // k, order % k], axis=1)


def global_phase_sort(slice_phases):
    values, provenance = sort_with_provenance(slice_phases)
    return PhaseVector(values=values, provenance=provenance)


def sectorial_factorization(A, pd_tol=None, branch_tol=None, grid_points=None):
    margin = sectoriality_margin(A, grid_points=grid_points, pd_tol=pd_tol)
    if not margin.sectorial:
        raise NotSectorial(f'tensor is not sectorial (margin {margin.margin:.3g})')
    branch_tol = resolve(branch_tol, 'BRANCH_TOL')

    factors, phases = [], []
    for matrix in fourier_slices(A).matrices:
        decomposition = sectorial_decompose_matrix(
            matrix, gamma=margin.gamma, pd_tol=pd_tol, branch_tol=branch_tol,
        )
        factors.append(decomposition.T)
        phases.append(decomposition.phases)

    slice_phases = np.array(phases)
    vector = global_phase_sort(slice_phases)
    if vector.spread >= np.pi - branch_tol:
        raise BranchSpread(spread_message(vector.values, margin.gamma))
    return SectorialFactorization(
        slice_factors=np.array(factors),
        slice_phases=slice_phases,
        gamma=margin.gamma,
        phases=vector,
    )


def canonical_phases(A, **kwargs):
    return sectorial_factorization(A, **kwargs).phases


def count_nonzero_phases(values, zero_tol=None):
    zero_tol = resolve(zero_tol, 'PHASE_ZERO_TOL')
    return int(np.count_nonzero(np.abs(np.asarray(values)) > zero_tol))


def tprank(A, zero_tol=None):
    """T-phase rank: number of nonzero canonical phases"""
    return count_nonzero_phases(canonical_phases(A).values, zero_tol)


# --- gauges -------------------------------------------------------------------

GAUGE_KINDS = ('kyfan', 'lp', 'weighted')


@dataclass(frozen=True)
class GaugeSpec:
    """Symmetric gauge function: Ky-Fan k-norm, l_p norm or sorted weighted sum"""
    kind: str
    k: int = None
    p: float = None
    weights: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in GAUGE_KINDS:
            raise ValueError(f"unknown gauge kind '{self.kind}'")
        if self.kind == 'kyfan' and (self.k is None or self.k < 1):
            raise ValueError('Ky-Fan gauge needs k >= 1')
        if self.kind == 'lp' and (self.p is None or self.p < 1):
            raise ValueError('l_p gauge needs p >= 1')
        if self.kind == 'weighted':
            w = np.asarray(self.weights, dtype=float)
            if w.size == 0 or np.any(w < 0) or np.any(np.diff(w) > 0) or w[0] == 0:
                raise ValueError('weights must be nonnegative, nonincreasing and not all zero')

    @classmethod
    def ky_fan(cls, k):
        return cls('kyfan', k=int(k))

    @classmethod
    def lp(cls, p):
        return cls('lp', p=float(p))

    @classmethod
    def parse(cls, text):
        """Parse 'kyfan:3', 'lp:2', 'linf', 'l1', 'fro' or 'weighted:1,0.5'"""
        text = str(text).strip().lower()
        aliases = {'linf': math.inf, 'l1': 1.0, 'fro': 2.0, 'frobenius': 2.0, 'l2': 2.0}
        if text in aliases:
            return cls.lp(aliases[text])
        name, _, arg = text.partition(':')
        try:
            if name == 'kyfan':
                return cls.ky_fan(int(arg))
            if name == 'lp':
                return cls.lp(math.inf if arg in ('inf', 'infinity') else float(arg))
            if name == 'weighted':
                return cls('weighted', weights=tuple(float(w) for w in arg.split(',')))
        except ValueError as exc:
            raise ValueError(f"invalid gauge '{text}': {exc}") from exc
        raise ValueError(f"unknown gauge '{text}'")

    def __str__(self):
        if self.kind == 'kyfan':
            return f'kyfan:{self.k}'
        if self.kind == 'lp':
            if math.isinf(self.p):
                return 'linf'
            if self.p == 1:
                return 'l1'
            return f'lp:{self.p:g}'
        return 'weighted:' + ','.join(format(w, '.17g') for w in self.weights)

    def __call__(self, x):
        return gauge_eval(self, x)


def gauge_eval(psi, x):
    magnitudes = np.abs(np.asarray(x, dtype=float).reshape(-1))
    if psi.kind == 'lp':
        if magnitudes.size == 0:
            return 0.0
        return float(np.linalg.norm(magnitudes, ord=psi.p))
    ordered = np.sort(magnitudes)[::-1]
    if psi.kind == 'kyfan':
        return float(ordered[:psi.k].sum())
    weights = np.asarray(psi.weights, dtype=float)
    length = max(len(weights), len(ordered))
    padded_x = np.zeros(length)
    padded_x[:len(ordered)] = ordered
    padded_w = np.zeros(length)
    padded_w[:len(weights)] = weights
    return float(padded_x @ padded_w)


def phase_gauge(A, psi):
    """T-phase gauge: psi applied to the canonical phase vector"""
    return gauge_eval(psi, canonical_phases(A).values)


# --- majorization -------------------------------------------------------------

@dataclass(frozen=True)
class MajorizationResult:
    """Outcome of ``majorizes(x, y)``: does x majorize y"""
    holds: bool
    mode: str
    violated_prefix: int = None
    max_excess: float = 0.0

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {
            'holds': self.holds,
            'mode': self.mode,
            'violated_prefix': self.violated_prefix,
            'max_excess': self.max_excess,
        }


def majorizes(x, y, mode='strong', tol=None):
    """
    Check y ≺ x (strong) or y ≺_w x (weak) on sorted prefix sums.

    ``violated_prefix`` is the length of the first prefix where y's partial
    sum exceeds x's by more than tol (or the full length when only the
    total-sum equality of strong majorization fails).
    """
    if mode not in ('weak', 'strong'):
        raise ValueError(f"unknown majorization mode '{mode}'")
    tol = resolve(tol, 'MAJORIZATION_TOL')
    x = np.sort(np.asarray(x, dtype=float).reshape(-1))[::-1]
    y = np.sort(np.asarray(y, dtype=float).reshape(-1))[::-1]
    if x.shape != y.shape:
        raise DimensionMismatch(f'lengths differ: {x.size} vs {y.size}')
    if x.size == 0:
        return MajorizationResult(holds=True, mode=mode)

    excess = np.cumsum(y) - np.cumsum(x)
    max_excess = float(excess.max())
    bad = np.flatnonzero(excess > tol)
    violated = int(bad[0]) + 1 if bad.size else None
    if mode == 'strong':
        total_gap = abs(float(excess[-1]))
        max_excess = max(max_excess, total_gap)
        if violated is None and total_gap > tol:
            violated = int(x.size)
    return MajorizationResult(holds=violated is None, mode=mode, violated_prefix=violated, max_excess=max_excess)


# --- sector classes -----------------------------------------------------------

@dataclass(frozen=True)
class SectorClass:
    """Smallest closed sector [alpha, beta] holding the canonical phases"""
    alpha: float
    beta: float
    quasi_sectorial: bool
    semi_sectorial: bool
    accretive: bool
    negative_imaginary: bool
    positive_imaginary: bool

    def contains(self, alpha, beta, tol=0.0):
        return alpha - tol <= self.alpha and self.beta <= beta + tol

    def to_dict(self):
        return {
            'alpha': self.alpha,
            'beta': self.beta,
            'quasi_sectorial': self.quasi_sectorial,
            'semi_sectorial': self.semi_sectorial,
            'accretive': self.accretive,
            'negative_imaginary': self.negative_imaginary,
            'positive_imaginary': self.positive_imaginary,
        }


def sector_of(phases, zero_tol=None):
    zero_tol = resolve(zero_tol, 'PHASE_ZERO_TOL')
    alpha, beta = phases.lower, phases.upper
    spread = beta - alpha
    return SectorClass(
        alpha=alpha,
        beta=beta,
        quasi_sectorial=spread < np.pi,
        semi_sectorial=spread <= np.pi,
        accretive=-np.pi / 2 < alpha and beta < np.pi / 2,
        negative_imaginary=-np.pi < alpha and beta <= zero_tol,
        positive_imaginary=alpha >= -zero_tol and beta < np.pi,
    )


def classify_sector(A, **kwargs):
    return sector_of(canonical_phases(A, **kwargs))


def is_accretive(A, pd_tol=None):
    """Hermitian part of every Fourier slice positive definite, i.e. A in T_+"""
    if not A.is_frontal_square:
        return False
    slices = fourier_slices(A).matrices
    scale = spectral_norm(slices)
    if scale == 0:
        return False
    pd_tol = resolve(pd_tol, 'PD_TOL')
    lam_min = np.linalg.eigvalsh(hermitian_part(slices))[:, 0]
    return bool(lam_min.min() > pd_tol * scale)


def require_accretive(A, name='tensor', pd_tol=None):
    if not is_accretive(A, pd_tol=pd_tol):
        raise NotAccretive(f'{name} is not strictly accretive')
