"""
Dense complex third-order tensors and the T-product algebra.

Convention: the DFT along the tube mode is taken unnormalized per slice
(``scipy.fft.fft``), so that with the unitary F_p

    bcirc(A) = (F_p^H kron I_m) diag(A_1, ..., A_p) (F_p kron I_n)

holds exactly, bcirc(I) = I, and ||A||_F^2 = (1/p) sum_i ||A_i||_F^2.
Every product, inverse and spectral quantity is computed slice-wise in the
Fourier domain; ``bcirc`` exists for oracles and file-level checks.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.fft import fft, ifft

from .conf import resolve
from .exceptions import DimensionMismatch, InvalidTensor, NotBlockCirculant, SingularTensor
from .kernels import max_rotation_margin, spectral_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ComplexTensor3:
    """m x n x p complex tensor; ``data[:, :, k]`` is frontal slice k"""
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 3:
            raise InvalidTensor(f'expected a third-order array, got ndim={data.ndim}')
        if not np.all(np.isfinite(data)):
            raise InvalidTensor('tensor entries must be finite')
        data.setflags(write=False)
        object.__setattr__(self, 'data', data)

    @classmethod
    def from_slices(cls, slices):
        return cls(np.stack([np.asarray(s, dtype=complex) for s in slices], axis=2))

    @classmethod
    def zeros(cls, m, n, p):
        return cls(np.zeros((m, n, p), dtype=complex))

    @property
    def shape(self):
        return self.data.shape

    @property
    def m(self):
        return self.data.shape[0]

    @property
    def n(self):
        return self.data.shape[1]

    @property
    def p(self):
        return self.data.shape[2]

    @property
    def is_frontal_square(self):
        return self.m == self.n

    @property
    def H(self):
        return conj_transpose(self)

    def frontal_slice(self, k):
        return self.data[:, :, k]

    def fro_norm(self):
        return float(np.linalg.norm(self.data))

    def is_real(self, tol=0.0):
        return bool(np.all(np.abs(self.data.imag) <= tol * max(1.0, np.abs(self.data).max(initial=0.0))))

    def _check_same_shape(self, other):
        if not isinstance(other, ComplexTensor3):
            return NotImplemented
        if other.shape != self.shape:
            raise DimensionMismatch(f'shapes differ: {self.shape} vs {other.shape}')
        return other

    def __add__(self, other):
        other = self._check_same_shape(other)
        if other is NotImplemented:
            return other
        return ComplexTensor3(self.data + other.data)

    def __sub__(self, other):
        other = self._check_same_shape(other)
        if other is NotImplemented:
            return other
        return ComplexTensor3(self.data - other.data)

    def __neg__(self):
        return ComplexTensor3(-self.data)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return ComplexTensor3(scalar * self.data)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return ComplexTensor3(self.data / scalar)

    def __matmul__(self, other):
        return tprod(self, other)

    def __repr__(self):
        return f'ComplexTensor3(m={self.m}, n={self.n}, p={self.p})'


@dataclass(frozen=True, eq=False)
class FourierSlices:
    """The p Fourier-domain slices A_1..A_p, stacked as an array (p, m, n)"""
    matrices: np.ndarray

    def __len__(self):
        return self.matrices.shape[0]

    def __getitem__(self, i):
        return self.matrices[i]

    def to_tensor(self):
        return from_fourier(self.matrices)


def identity(n, p):
    """Identity tensor I_np: identity first slice, zeros elsewhere"""
    data = np.zeros((n, n, p), dtype=complex)
    data[:, :, 0] = np.eye(n)
    return ComplexTensor3(data)


def fourier_slices(A):
    return FourierSlices(np.moveaxis(fft(A.data, axis=2), 2, 0))


def from_fourier(matrices):
    """Tensor whose Fourier slices are ``matrices`` (shape (p, m, n))"""
    return ComplexTensor3(ifft(np.moveaxis(np.asarray(matrices, dtype=complex), 0, 2), axis=2))


def dft_matrix(p):
    """Unitary DFT matrix, F[j, k] = exp(-2 pi i jk / p) / sqrt(p)"""
    j = np.arange(p)
    return np.exp(-2j * np.pi * np.outer(j, j) / p) / np.sqrt(p)


def unfold(A):
    """Stack the frontal slices vertically: (mp x n)"""
    m, n, p = A.shape
    return A.data.transpose(2, 0, 1).reshape(p * m, n)


def fold(M, p):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] % p:
        raise DimensionMismatch(f'cannot fold a {M.shape} matrix into {p} slices')
    m = M.shape[0] // p
    return ComplexTensor3(M.reshape(p, m, M.shape[1]).transpose(1, 2, 0))


def bcirc(A):
    """Block-circulant embedding; block (r, c) is slice (r - c) mod p"""
    m, n, p = A.shape
    out = np.empty((m * p, n * p), dtype=complex)
    for r in range(p):
        for c in range(p):
            out[r * m:(r + 1) * m, c * n:(c + 1) * n] = A.data[:, :, (r - c) % p]
    return out


def bcirc_inv(M, p, tol=None):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] % p or M.shape[1] % p:
        raise DimensionMismatch(f'a {M.shape} matrix has no {p}x{p} block structure')
    tol = resolve(tol, 'BLOCK_CIRCULANT_TOL')
    m, n = M.shape[0] // p, M.shape[1] // p
    A = fold(M[:, :n], p)
    scale = max(np.linalg.norm(M), np.finfo(float).tiny)
    if np.linalg.norm(bcirc(A) - M) > tol * scale:
        raise NotBlockCirculant('matrix is not block-circulant')
    return A


def tprod(A, B):
    """T-product A * B, computed slice-wise in the Fourier domain"""
    if A.n != B.m or A.p != B.p:
        raise DimensionMismatch(f'cannot T-multiply {A.shape} by {B.shape}')
    fa = fft(A.data, axis=2)
    fb = fft(B.data, axis=2)
    return ComplexTensor3(ifft(np.einsum('ijk,jlk->ilk', fa, fb), axis=2))


def conj_transpose(A):
    """A^H: conjugate-transpose every slice and reverse slices 2..p"""
    data = A.data.conj().transpose(1, 0, 2)
    order = [0] + list(range(A.p - 1, 0, -1))
    return ComplexTensor3(data[:, :, order])


def require_frontal_square(A):
    if not A.is_frontal_square:
        raise DimensionMismatch(f'tensor must be frontal-square, got {A.shape}')


def t_inverse(A, tol=None):
    require_frontal_square(A)
    tol = resolve(tol, 'INVERSE_TOL')
    slices = fourier_slices(A).matrices
    with np.errstate(divide='ignore', invalid='ignore'):
        cond = np.linalg.cond(slices)
    bad = np.flatnonzero(~(cond <= 1 / tol))
    if bad.size:
        raise SingularTensor(f'Fourier slice {int(bad[0])} has condition number {cond[bad[0]]:.3g}')
    return from_fourier(np.linalg.inv(slices))


def t_eigenvalues(A):
    """
    Eigenvalues of bcirc(A) as the union over Fourier slices.

    Ordered by slice index, then nonincreasing modulus, then argument.
    """
    require_frontal_square(A)
    parts = []
    for matrix in fourier_slices(A).matrices:
        w = np.linalg.eigvals(matrix)
        parts.append(w[np.lexsort((np.angle(w), -np.abs(w)))])
    return np.concatenate(parts)


def is_t_hermitian(A, tol=None):
    tol = resolve(tol, 'HERMITIAN_TOL')
    if not A.is_frontal_square:
        return False
    return bool(np.linalg.norm(A.data - conj_transpose(A).data) <= tol * A.fro_norm())


@dataclass(frozen=True)
class SectorialityMargin:
    gamma: float
    margin: float
    scale: float
    sectorial: bool


def sectoriality_margin(A, grid_points=None, pd_tol=None):
    """
    Rotation gamma maximizing lambda_min(Re(e^{-i gamma} bcirc(A))).

    Evaluated over the Fourier slices, whose numerical ranges together span
    that of bcirc(A). A is sectorial iff the margin exceeds PD_TOL * ||bcirc(A)||_2.
    """
    require_frontal_square(A)
    slices = fourier_slices(A).matrices
    scale = spectral_norm(slices)
    pd_tol = resolve(pd_tol, 'PD_TOL')
    if scale == 0:
        return SectorialityMargin(gamma=0.0, margin=0.0, scale=0.0, sectorial=False)
    gamma, margin = max_rotation_margin(slices, grid_points=grid_points)
    return SectorialityMargin(gamma=gamma, margin=margin, scale=scale, sectorial=margin > pd_tol * scale)
