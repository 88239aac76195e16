"""Dense Hermitian matrix calculus: spectral decompositions, supported
logarithms, exponentials, tensor products and partial traces.

All functions accept stacked operands: an array of shape ``(..., d, d)`` is
treated as a batch of ``d x d`` matrices and the result keeps the leading
axes.  Natural logarithms throughout; entropic quantities downstream are in
nats.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import InvariantError, NumericalError

HERMITICITY_TOL = 1e-10
DENSITY_EIG_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-9
LOG_FLOOR = 1e-12
EXP_OVERFLOW = 700.0


class SpectralDecomposition(NamedTuple):
    """Eigendecomposition of a Hermitian matrix (or stack of them).

    ``eigenvalues`` are real and ascending along the last axis;
    ``eigenvectors`` holds orthonormal eigenvectors as columns, so
    ``H = V @ diag(w) @ V.conj().T`` per stack element.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitize(m: np.ndarray) -> np.ndarray:
    """Project onto the Hermitian part, (M + M^H)/2.

    The result is forced into C order: for large stacks numpy may lay the
    sum out with the last two axes swapped, and downstream code that takes
    reshape views of the output would silently operate on copies.
    """
    m = np.asarray(m)
    return np.ascontiguousarray(0.5 * (m + np.conj(np.swapaxes(m, -1, -2))))


def diag_embed(diags: np.ndarray, dtype=np.complex128) -> np.ndarray:
    """Stack of diagonal matrices out[x] = diag(diags[x])."""
    diags = np.asarray(diags)
    n, k = diags.shape
    out = np.zeros((n, k, k), dtype=dtype)
    out.reshape(n, -1)[:, :: k + 1] = diags
    return out


def hermiticity_residual(m: np.ndarray) -> float:
    """Max absolute entry of M - M^H over the whole stack."""
    m = np.asarray(m)
    d = m - np.conj(np.swapaxes(m, -1, -2))
    return float(np.max(np.abs(d))) if d.size else 0.0


def check_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    res = hermiticity_residual(m)
    if res > tol:
        raise InvariantError(
            f"matrix is not Hermitian: residual {res:.3e} exceeds tolerance {tol:.1e}"
        )


def eig_hermitian(h: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix (stacked OK).

    Eigenvalues ascend; eigenvectors are orthonormal columns.  Raises
    NumericalError with the hermiticity residual if LAPACK fails to
    converge, which in practice means the input was far from Hermitian.
    """
    h = np.asarray(h)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolver failed on shape {h.shape}: {exc}; "
            f"hermiticity residual {hermiticity_residual(h):.3e}"
        ) from exc
    return SpectralDecomposition(w, v)


def _apply_spectral(fn, w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Assemble V f(w) V^H for stacked eigensystems."""
    fw = fn(w)
    return np.einsum("...ij,...j,...kj->...ik", v, fw, np.conj(v), optimize=True)


def matrix_log_supported(rho: np.ndarray, floor: float = LOG_FLOOR) -> np.ndarray:
    """Matrix logarithm with eigenvalues clamped below at ``floor``.

    Keeps log well defined on rank-deficient density operators: eigenvalues
    under the floor contribute log(floor) rather than -inf.  The result is
    Hermitian by construction.
    """
    if floor <= 0:
        raise InvariantError(f"log floor must be positive, got {floor}")
    w, v = eig_hermitian(rho)
    return _apply_spectral(lambda x: np.log(np.maximum(x, floor)), w, v)


def matrix_exp(h: np.ndarray) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix via its eigensystem.

    Raises NumericalError if any eigenvalue exceeds 700 (exp would
    overflow float64); callers shift the exponent first when normalizing.
    """
    w, v = eig_hermitian(h)
    wmax = float(np.max(w)) if w.size else 0.0
    if wmax > EXP_OVERFLOW:
        raise NumericalError(
            f"matrix_exp overflow: max eigenvalue {wmax:.6g} exceeds {EXP_OVERFLOW:g}; "
            "shift the exponent before exponentiating"
        )
    return _apply_spectral(np.exp, w, v)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor's system leading."""
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: str = "first") -> np.ndarray:
    """Trace out one tensor factor of an operator on a bipartite space.

    ``dims = (d1, d2)`` with the first factor leading (total dimension
    d1*d2); ``keep`` selects which factor survives.  Stacked inputs keep
    their leading axes.
    """
    m = np.asarray(m)
    d1, d2 = dims
    if d1 <= 0 or d2 <= 0:
        raise InvariantError(f"factor dimensions must be positive, got {dims}")
    if m.shape[-1] != d1 * d2 or m.shape[-2] != d1 * d2:
        raise InvariantError(
            f"operator of shape {m.shape} does not factor as ({d1}*{d2}, {d1}*{d2})"
        )
    r = m.reshape(m.shape[:-2] + (d1, d2, d1, d2))
    if keep == "first":
        return np.einsum("...ijkj->...ik", r)
    if keep == "second":
        return np.einsum("...ijil->...jl", r)
    raise InvariantError(f"keep must be 'first' or 'second', got {keep!r}")


def trace_norm(h: np.ndarray) -> float:
    """Trace norm (sum of absolute eigenvalues) of a Hermitian matrix."""
    w, _ = eig_hermitian(h)
    return float(np.sum(np.abs(w)))


def check_density(
    m: np.ndarray,
    eig_tol: float = DENSITY_EIG_TOL,
    trace_tol: float = DENSITY_TRACE_TOL,
    label: str = "matrix",
) -> None:
    """Validate a density operator: Hermitian, PSD up to -eig_tol, unit trace.

    Raises InvariantError naming the violated property and ``label``.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvariantError(f"{label}: expected a square matrix, got shape {m.shape}")
    res = hermiticity_residual(m)
    if res > HERMITICITY_TOL:
        raise InvariantError(f"{label}: not Hermitian (residual {res:.3e})")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > trace_tol:
        raise InvariantError(f"{label}: trace {tr.real:.12g} deviates from 1 beyond {trace_tol:.1e}")
    w = np.linalg.eigvalsh(hermitize(m))
    wmin = float(w[0])
    if wmin < -eig_tol:
        raise InvariantError(f"{label}: negative eigenvalue {wmin:.3e} below -{eig_tol:.1e}")


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    # Fix the phase ambiguity so the distribution is exactly Haar.
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_density(dim: int, rng: np.random.Generator, classical: bool = False) -> np.ndarray:
    """Random density matrix: flat-Dirichlet spectrum, Haar eigenbasis.

    With ``classical`` the matrix is diagonal in the computational basis.
    """
    p = rng.dirichlet(np.ones(dim))
    if classical:
        return np.diag(p).astype(np.complex128)
    u = random_unitary(dim, rng)
    return (u * p) @ np.conj(u.T)
