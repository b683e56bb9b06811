"""
Dense complex matrix kernels used slice-wise by the tensor layer.

Sectorial decomposition, principal powers, the accretive geometric mean and
two quadrature oracles (Dunford-Taylor contour for powers, the inverse-mean
integral for the geometric mean). Every function here works on plain
``numpy`` arrays.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg
from scipy.optimize import minimize_scalar

from .conf import resolve
from .exceptions import (
    BranchCut, BranchSpread, DimensionMismatch, NotAccretive, NotSectorial,
    QuadratureNotConverged,
)

logger = logging.getLogger(__name__)


def wrap_angle(x):
    """Map angles into (-pi, pi]"""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def hermitian_part(M):
    return (M + np.conj(np.swapaxes(M, -1, -2))) / 2


def skew_part(M):
    """Im(M) in the Cartesian sense: (M - M^H) / 2i, Hermitian"""
    return (M - np.conj(np.swapaxes(M, -1, -2))) / 2j


def as_square(M, name='matrix'):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f'{name} must be square, got shape {M.shape}')
    return M


def spectral_norm(mats):
    """Largest spectral norm over a matrix or a stack of matrices"""
    mats = np.asarray(mats)
    if mats.size == 0:
        return 0.0
    if mats.ndim == 2:
        mats = mats[None]
    return float(np.max(np.linalg.norm(mats, 2, axis=(-2, -1))))


# --- numerical range rotation -------------------------------------------------

def rotation_margin(mats, theta):
    """
    lambda_min(Re(e^{-i theta} M)) minimized over a stack of matrices.

    ``mats`` has shape (k, n, n), ``theta`` shape (t,); returns shape (t,).
    """
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim == 2:
        mats = mats[None]
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    H = hermitian_part(mats)
    K = skew_part(mats)
    c = np.cos(theta)[:, None, None, None]
    s = np.sin(theta)[:, None, None, None]
    rotated = c * H[None] + s * K[None]
    lam_min = np.linalg.eigvalsh(rotated)[..., 0]
    return lam_min.min(axis=1)


def max_rotation_margin(mats, grid_points=None):
    """
    Best rotation of the numerical range away from the imaginary axis.

    A coarse grid on (-pi, pi] is followed by bounded golden-section/Brent
    refinement around the best grid point. Returns ``(gamma, margin)``.
    """
    grid_points = int(resolve(grid_points, 'THETA_GRID_POINTS'))
    theta = -np.pi + 2 * np.pi * (np.arange(grid_points) + 1) / grid_points
    values = rotation_margin(mats, theta)
    best = int(np.argmax(values))
    gamma, margin = float(theta[best]), float(values[best])

    half_width = 2 * np.pi / grid_points
    result = minimize_scalar(
        lambda t: -rotation_margin(mats, t)[0],
        bounds=(gamma - half_width, gamma + half_width),
        method='bounded',
        options={'xatol': 1e-12},
    )
    if result.success and -result.fun > margin:
        gamma, margin = float(result.x), float(-result.fun)
    return float(wrap_angle(gamma)), margin


def is_accretive_matrix(M, pd_tol=None):
    """Numerical range strictly inside the open right half-plane"""
    M = as_square(M)
    scale = spectral_norm(M)
    if scale == 0:
        return False
    pd_tol = resolve(pd_tol, 'PD_TOL')
    return bool(linalg.eigvalsh(hermitian_part(M))[0] > pd_tol * scale)


def require_accretive(M, name='matrix', pd_tol=None):
    if not is_accretive_matrix(M, pd_tol=pd_tol):
        raise NotAccretive(f'{name} is not strictly accretive')


# --- sectorial decomposition ------------------------------------------------

def spread_message(phases, gamma):
    """BranchSpread text; names the branch cut when the phases fit a half-plane around gamma"""
    phases = np.asarray(phases)
    relative = wrap_angle(phases - gamma)
    if relative.max() - relative.min() < np.pi:
        return (f'sector [{gamma + relative.min():.6g}, {gamma + relative.max():.6g}] straddles the branch cut '
                f'at +-pi; phases are kept in (-pi, pi]')
    return f'phase spread {phases.max() - phases.min():.6g} is not below pi'


@dataclass(frozen=True)
class SectorialFactorizationM:
    """M = T^H diag(e^{i phases}) T with phases sorted nonincreasing"""
    T: np.ndarray
    phases: np.ndarray
    gamma: float

    @property
    def D(self):
        return np.diag(np.exp(1j * self.phases))

    def reconstruct(self):
        return self.T.conj().T @ (np.exp(1j * self.phases)[:, None] * self.T)


def sectorial_decompose_matrix(M, gamma=None, pd_tol=None, branch_tol=None):
    """
    Sectorial decomposition through a rotated Cholesky factorization.

    Rotate by gamma so that H = Re(e^{-i gamma} M) is positive definite,
    factor H = L L^H, diagonalize the Hermitian S = L^{-1} Im(e^{-i gamma} M) L^{-H}
    as Q diag(theta) Q^H, and read off phases gamma + atan(theta).
    """
    M = as_square(M)
    scale = spectral_norm(M)
    pd_tol = resolve(pd_tol, 'PD_TOL')
    branch_tol = resolve(branch_tol, 'BRANCH_TOL')
    if scale == 0:
        raise NotSectorial('zero matrix is not sectorial')
    if gamma is None:
        gamma, _ = max_rotation_margin(M)

    rotated = np.exp(-1j * gamma) * M
    H = hermitian_part(rotated)
    K = skew_part(rotated)
    if linalg.eigvalsh(H)[0] <= pd_tol * scale:
        raise NotSectorial(f'no rotation makes the Hermitian part positive definite (gamma={gamma:.6g})')

    L = linalg.cholesky(H, lower=True)
    X = linalg.solve_triangular(L, K, lower=True)
    S = hermitian_part(linalg.solve_triangular(L, X.conj().T, lower=True))
    theta, Q = linalg.eigh(S)

    phases = wrap_angle(gamma + np.arctan(theta))
    if phases.max() - phases.min() >= np.pi - branch_tol:
        raise BranchSpread(spread_message(phases, gamma))
    T = ((1 + theta ** 2) ** 0.25)[:, None] * (Q.conj().T @ L.conj().T)

    order = np.argsort(-phases, kind='stable')
    return SectorialFactorizationM(T=T[order], phases=phases[order], gamma=float(gamma))


# --- principal powers ---------------------------------------------------------

def check_branch_cut(eigenvalues, atol=1e-12):
    w = np.asarray(eigenvalues)
    on_cut = (np.abs(w.imag) <= atol) & (w.real <= atol)
    if np.any(on_cut):
        raise BranchCut(f'eigenvalue {w[on_cut][0]} lies on the branch cut (-inf, 0]')


def principal_power_matrix(M, alpha, cond_limit=None):
    """
    Principal power M^alpha, z^alpha = r^alpha e^{i alpha theta}, theta in (-pi, pi).

    Eigendecomposition when the eigenvector matrix is well conditioned,
    otherwise the Schur-Pade route of scipy.linalg.fractional_matrix_power.
    """
    M = as_square(M)
    n = M.shape[0]
    w, V = linalg.eig(M)
    check_branch_cut(w)
    if alpha == 0:
        return np.eye(n, dtype=complex)
    if alpha == 1:
        return M.copy()

    cond_limit = resolve(cond_limit, 'EIG_COND_LIMIT')
    if np.linalg.cond(V) < cond_limit:
        return (V * w.astype(complex) ** alpha) @ np.linalg.inv(V)
    logger.debug('eigenvector condition above %g, using Schur route', cond_limit)
    return np.asarray(linalg.fractional_matrix_power(M, alpha), dtype=complex)


def principal_power_contour(M, alpha, nodes=None):
    """
    Dunford-Taylor integral for M^alpha, trapezoid rule on a circle.

    The circle is centred at c > 0 with radius below c so it never meets
    (-inf, 0]; this needs every eigenvalue in the open right half-plane.
    Test oracle only.
    """
    M = as_square(M)
    n = M.shape[0]
    nodes = int(resolve(nodes, 'CONTOUR_NODES'))
    w = linalg.eigvals(M)
    if np.any(w.real <= 0):
        raise BranchCut('contour oracle needs the spectrum in the open right half-plane')

    center = 1.5 * np.max(np.abs(w) ** 2 / (2 * w.real))
    inner = np.max(np.abs(w - center))
    radius = (inner + center) / 2

    angles = 2 * np.pi * np.arange(nodes) / nodes
    z = center + radius * np.exp(1j * angles)
    resolvents = np.linalg.inv(z[:, None, None] * np.eye(n) - M)
    weights = z ** alpha * radius * np.exp(1j * angles) / nodes
    return np.tensordot(weights, resolvents, axes=1)


# --- geometric mean ---------------------------------------------------------

def matrix_geomean(A, B, pd_tol=None):
    """A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2} for accretive A, B"""
    A = as_square(A, 'A')
    B = as_square(B, 'B')
    if A.shape != B.shape:
        raise DimensionMismatch(f'shapes differ: {A.shape} vs {B.shape}')
    require_accretive(A, 'A', pd_tol)
    require_accretive(B, 'B', pd_tol)

    root = principal_power_matrix(A, 0.5)
    inv_root = np.linalg.inv(root)
    inner = principal_power_matrix(inv_root @ B @ inv_root, 0.5)
    return root @ inner @ root


def _inverse_mean_integral(A, B, half_width, nodes):
    x, w = leggauss(nodes)
    u = half_width * x
    stack = np.exp(u)[:, None, None] * A + np.exp(-u)[:, None, None] * B
    return (2 / np.pi) * half_width * np.tensordot(w, np.linalg.inv(stack), axes=1)


def matrix_geomean_integral_oracle(A, B, nodes=None, max_nodes=None, rtol=None, tail_tol=None):
    """
    Geometric mean from (A # B)^{-1} = (2/pi) int_0^inf (tA + t^{-1}B)^{-1} dt/t.

    Substitutes t = e^u and integrates over [-U, U] with Gauss-Legendre,
    doubling the node count until two successive results agree.
    """
    A = as_square(A, 'A')
    B = as_square(B, 'B')
    if A.shape != B.shape:
        raise DimensionMismatch(f'shapes differ: {A.shape} vs {B.shape}')
    require_accretive(A, 'A')
    require_accretive(B, 'B')
    nodes = int(resolve(nodes, 'QUADRATURE_NODES'))
    max_nodes = int(resolve(max_nodes, 'QUADRATURE_MAX_NODES'))
    rtol = resolve(rtol, 'QUADRATURE_RTOL')
    tail_tol = resolve(tail_tol, 'QUADRATURE_TAIL_TOL')

    # ||(e^u A + e^-u B)^{-1}|| <= 1 / (e^u a + e^-u b), so each tail is below e^-U / min(a, b)
    a = linalg.eigvalsh(hermitian_part(A))[0]
    b = linalg.eigvalsh(hermitian_part(B))[0]
    half_width = max(1.0, float(np.log(2.0 / (min(a, b) * tail_tol))))

    previous = _inverse_mean_integral(A, B, half_width, nodes)
    while 2 * nodes <= max_nodes:
        nodes *= 2
        current = _inverse_mean_integral(A, B, half_width, nodes)
        change = np.linalg.norm(current - previous) / np.linalg.norm(current)
        if change <= rtol:
            logger.debug('geometric mean quadrature converged with %d nodes', nodes)
            return np.linalg.inv(current)
        previous = current
    raise QuadratureNotConverged(f'quadrature did not settle below {rtol:g} with {max_nodes} nodes')
