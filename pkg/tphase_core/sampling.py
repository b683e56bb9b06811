"""Seeded random generators for tensors and systems used by tests and suites"""

import numpy as np

from .tensor import ComplexTensor3, from_fourier, identity, t_eigenvalues


def complex_gaussian(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_tensor(rng, m, n, p, real=False):
    if real:
        return ComplexTensor3(rng.standard_normal((m, n, p)))
    return ComplexTensor3(complex_gaussian(rng, m, n, p))


def random_frames(rng, n, p, spread=1.0):
    """(p, n, n) well-conditioned nonsingular Fourier-domain factors"""
    return np.eye(n) + spread * complex_gaussian(rng, p, n, n) / np.sqrt(n) / 2


def random_nonsingular(rng, n, p, spread=1.0):
    return from_fourier(random_frames(rng, n, p, spread))


def congruence_slices(frames, phases):
    """T_i^H diag(e^{i phi_i}) T_i for each Fourier slice"""
    frames = np.asarray(frames, dtype=complex)
    return np.conj(np.swapaxes(frames, -1, -2)) @ (np.exp(1j * np.asarray(phases))[..., None] * frames)


def random_sectorial(rng, n, p, lo, hi, frames=None):
    """Tensor with canonical phases drawn uniformly from [lo, hi]"""
    if frames is None:
        frames = random_frames(rng, n, p)
    phases = rng.uniform(lo, hi, size=(p, n))
    return from_fourier(congruence_slices(frames, phases))


def random_accretive(rng, n, p, max_phase=1.3):
    return random_sectorial(rng, n, p, -max_phase, max_phase)


def random_hermitian(rng, n, p):
    """T-Hermitian tensor: Hermitian Fourier slices"""
    G = complex_gaussian(rng, p, n, n)
    return from_fourier((G + np.conj(np.swapaxes(G, -1, -2))) / 2)


def diagonal_phase_tensor(slice_phases):
    """Tensor whose Fourier slices are diag(e^{i phi}) for each row of ``slice_phases``"""
    slice_phases = np.asarray(slice_phases, dtype=float)
    p, n = slice_phases.shape
    diagonals = np.zeros((p, n, n), dtype=complex)
    idx = np.arange(n)
    diagonals[:, idx, idx] = np.exp(1j * slice_phases)
    return from_fourier(diagonals)


def random_stable_state_matrix(rng, m, p, margin=0.5):
    """Real m x m x p tensor whose T-eigenvalues all have real part <= -margin"""
    A = random_tensor(rng, m, m, p, real=True)
    shift = float(np.max(t_eigenvalues(A).real)) + margin
    return A - shift * identity(m, p)
