"""Shared builders and independent oracles for the test suite."""

import numpy as np

from qib.linalg import random_density
from qib.model import CQChannel, CQState
from qib.rng import derive_rng


def random_cq_state(seed, size_x=None, dim_y=None, classical=False, tag="state"):
    """Seeded random source; sizes drawn when not pinned."""
    gen = derive_rng(seed, tag)
    if size_x is None:
        size_x = int(gen.integers(2, 6))
    if dim_y is None:
        dim_y = int(gen.integers(2, 4))
    px = gen.dirichlet(np.ones(size_x))
    rhos = np.stack([random_density(dim_y, gen, classical=classical) for _ in range(size_x)])
    return CQState(px, rhos)


def random_channel_for(state, dim_t, seed, classical=False, tag="chan"):
    gen = derive_rng(seed, tag)
    mats = np.stack(
        [random_density(dim_t, gen, classical=classical) for _ in range(state.size_x)]
    )
    return CQChannel(mats, classical=classical)


def random_hermitian(dim, gen, scale=1.0):
    a = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    return scale * (a + np.conj(a.T)) / 2.0


def charpoly_eigenvalues(h):
    """Eigenvalues via Faddeev-LeVerrier coefficients and polynomial roots.

    Independent of any LAPACK eigensolver: the characteristic polynomial
    is built from traces of matrix powers alone, then handed to np.roots.
    Accurate to ~1e-8 for well separated spectra at small dimension.
    """
    h = np.asarray(h, dtype=np.complex128)
    n = h.shape[0]
    coeffs = np.empty(n + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    m = np.zeros_like(h)
    eye = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 1):
        m = h @ m + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(h @ m) / k
    return np.sort(np.roots(coeffs).real)


def assert_valid_density(mat, tol=1e-9):
    mat = np.asarray(mat)
    assert np.max(np.abs(mat - np.conj(mat.T))) < tol
    assert abs(np.trace(mat).real - 1.0) < tol
    assert np.linalg.eigvalsh(mat).min() > -tol


def shannon(p):
    p = np.asarray(p, dtype=np.float64)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))
