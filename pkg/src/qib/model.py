"""Classical-quantum states and channels, and the bottleneck objective.

A source is a classical random variable X correlated with a quantum system Y
through conditional densities rho_{Y|x}; a compression channel assigns each x
a density sigma_{T|x} on the bottleneck system T.  Joint operators over (T, Y)
put the T factor first in the tensor order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import InvariantError

CLASSICAL_OFFDIAG_TOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CQState:
    """Classical-quantum source: P_X and conditional densities rho_{Y|x}.

    ``px`` has shape (sizeX,), ``rho_y_given_x`` shape (sizeX, dimY, dimY)
    stacked along x.  Construction normalizes dtypes and freezes the arrays;
    call ``validate()`` at trust boundaries.
    """

    px: np.ndarray
    rho_y_given_x: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.px, dtype=np.float64)
        rho = np.asarray(self.rho_y_given_x, dtype=np.complex128)
        if px.ndim != 1:
            raise InvariantError(f"px must be a vector, got shape {px.shape}")
        if rho.ndim != 3 or rho.shape[1] != rho.shape[2]:
            raise InvariantError(
                f"rho_y_given_x must be stacked square matrices, got shape {rho.shape}"
            )
        if rho.shape[0] != px.shape[0]:
            raise InvariantError(
                f"px has {px.shape[0]} entries but rho_y_given_x has {rho.shape[0]}"
            )
        object.__setattr__(self, "px", _freeze(px))
        object.__setattr__(self, "rho_y_given_x", _freeze(rho))

    @property
    def size_x(self) -> int:
        return self.px.shape[0]

    @property
    def dim_y(self) -> int:
        return self.rho_y_given_x.shape[1]

    def validate(self) -> None:
        if np.any(self.px < -1e-12):
            raise InvariantError(f"px has a negative entry: min {self.px.min():.3e}")
        s = float(self.px.sum())
        if abs(s - 1.0) > 1e-9:
            raise InvariantError(f"px sums to {s:.12g}, expected 1 within 1e-9")
        for x in range(self.size_x):
            linalg.check_density(self.rho_y_given_x[x], label=f"rho_y_given_x[{x}]")


@dataclass(frozen=True)
class CQChannel:
    """Compression channel x -> sigma_{T|x}, optionally restricted classical.

    ``sigma_t_given_x`` has shape (sizeX, dimT, dimT).  With ``classical``
    set, every conditional must be diagonal in the computational basis
    (off-diagonal magnitude below 1e-12); updates preserve the flag.
    """

    sigma_t_given_x: np.ndarray
    classical: bool = False

    def __post_init__(self):
        sig = np.asarray(self.sigma_t_given_x, dtype=np.complex128)
        if sig.ndim != 3 or sig.shape[1] != sig.shape[2]:
            raise InvariantError(
                f"sigma_t_given_x must be stacked square matrices, got shape {sig.shape}"
            )
        object.__setattr__(self, "sigma_t_given_x", _freeze(sig))

    @property
    def size_x(self) -> int:
        return self.sigma_t_given_x.shape[0]

    @property
    def dim_t(self) -> int:
        return self.sigma_t_given_x.shape[1]

    def validate(self) -> None:
        for x in range(self.size_x):
            linalg.check_density(self.sigma_t_given_x[x], label=f"sigma_t_given_x[{x}]")
        if self.classical:
            off = offdiagonal_magnitude(self.sigma_t_given_x)
            if off > CLASSICAL_OFFDIAG_TOL:
                raise InvariantError(
                    f"classical channel has off-diagonal magnitude {off:.3e} "
                    f"above {CLASSICAL_OFFDIAG_TOL:.1e}"
                )


def offdiagonal_magnitude(mats: np.ndarray) -> float:
    """Largest absolute off-diagonal entry across a stack of matrices."""
    mats = np.asarray(mats)
    d = mats.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    if mats.size == 0:
        return 0.0
    return float(np.max(np.abs(mats[..., mask]))) if d > 1 else 0.0


@dataclass(frozen=True)
class ObjectiveConfig:
    """Solver configuration.

    gamma defaults to alpha (the step-size choice with the unconditional
    descent guarantee); tol is the |f_n - f_{n+1}| stopping threshold.
    """

    alpha: float
    beta: float
    dim_t: int
    gamma: float | None = None
    classical: bool = False
    tol: float = 1e-8
    max_iters: int = 500
    seed: int = 0

    @property
    def effective_gamma(self) -> float:
        return self.alpha if self.gamma is None else self.gamma

    def validate(self) -> None:
        if not (self.alpha >= 0 and np.isfinite(self.alpha)):
            raise InvariantError(f"alpha must be >= 0, got {self.alpha}")
        if not (self.beta >= 0 and np.isfinite(self.beta)):
            raise InvariantError(f"beta must be >= 0, got {self.beta}")
        if self.gamma is not None and not (self.gamma > 0 and np.isfinite(self.gamma)):
            raise InvariantError(f"gamma must be > 0, got {self.gamma}")
        if self.dim_t < 1:
            raise InvariantError(f"dim_t must be >= 1, got {self.dim_t}")
        if not (self.tol > 0):
            raise InvariantError(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise InvariantError(f"max_iters must be >= 1, got {self.max_iters}")


def _check_pair(state: CQState, channel: CQChannel) -> None:
    if state.size_x != channel.size_x:
        raise InvariantError(
            f"state has sizeX {state.size_x} but channel has {channel.size_x}"
        )


def sigma_t(channel: CQChannel, state: CQState) -> np.ndarray:
    """Bottleneck marginal sigma_T = sum_x P(x) sigma_{T|x}."""
    _check_pair(state, channel)
    out = np.einsum("x,xij->ij", state.px, channel.sigma_t_given_x)
    return linalg.hermitize(out)


def rho_y(state: CQState) -> np.ndarray:
    """Source marginal rho_Y = sum_x P(x) rho_{Y|x}."""
    out = np.einsum("x,xij->ij", state.px, state.rho_y_given_x)
    return linalg.hermitize(out)


def sigma_yt(channel: CQChannel, state: CQState) -> np.ndarray:
    """Joint state sum_x P(x) sigma_{T|x} (x) rho_{Y|x}, T factor first.

    The name keeps the conventional YT label for this joint; the tensor
    order is (T, Y) with T leading, matching every joint-operator
    convention in this package.
    """
    _check_pair(state, channel)
    dt, dy = channel.dim_t, state.dim_y
    four = np.einsum(
        "x,xik,xjl->ijkl", state.px, channel.sigma_t_given_x, state.rho_y_given_x,
        optimize=True,
    )
    return linalg.hermitize(four.reshape(dt * dy, dt * dy))


def entropy_from_eigenvalues(w: np.ndarray) -> float:
    """Shannon entropy in nats of an eigenvalue vector, treating 0 log 0 = 0."""
    w = np.clip(np.asarray(w, dtype=np.float64), 0.0, None)
    pos = w[w > 0]
    return float(-np.sum(pos * np.log(pos)))


def von_neumann_entropy(rho_mat: np.ndarray) -> float:
    """Entropy -Tr[rho log rho] in nats; eigenvalues clipped at zero."""
    w, _ = linalg.eig_hermitian(np.asarray(rho_mat))
    return entropy_from_eigenvalues(w)


def relative_entropy(
    rho_mat: np.ndarray, sigma_mat: np.ndarray, floor: float = linalg.LOG_FLOOR
) -> float:
    """Umegaki relative entropy D(rho || sigma) in nats.

    Requires support(rho) within support(sigma) up to the floor: if rho
    puts more than 1e-9 mass on sigma's null space (eigenvalues < floor),
    returns +inf with a warning instead of a finite garbage value.
    """
    rho_mat = np.asarray(rho_mat)
    sigma_mat = np.asarray(sigma_mat)
    if rho_mat.shape != sigma_mat.shape:
        raise InvariantError(
            f"shape mismatch in relative entropy: {rho_mat.shape} vs {sigma_mat.shape}"
        )
    wr, vr = linalg.eig_hermitian(rho_mat)
    ws, vs = linalg.eig_hermitian(sigma_mat)
    null = ws < floor
    if np.any(null):
        overlap = np.einsum(
            "ij,jk,ik->", np.conj(vs[:, null]).T, rho_mat, vs[:, null], optimize=True
        ).real
        if overlap > 1e-9:
            warnings.warn(
                f"relative entropy support violation: {overlap:.3e} mass outside "
                "the second argument's support; returning inf",
                RuntimeWarning,
                stacklevel=2,
            )
            return float("inf")
    log_sigma = linalg._apply_spectral(lambda x: np.log(np.maximum(x, floor)), ws, vs)
    tr_rho_log_rho = -entropy_from_eigenvalues(wr)
    tr_rho_log_sigma = float(np.einsum("ij,ji->", rho_mat, log_sigma).real)
    return tr_rho_log_rho - tr_rho_log_sigma


def cond_entropy_t_given_x(state: CQState, channel: CQChannel) -> float:
    """H(T|X) = sum_x P(x) H(sigma_{T|x})."""
    _check_pair(state, channel)
    w = np.linalg.eigvalsh(channel.sigma_t_given_x)
    w = np.clip(w, 0.0, None)
    ent = -np.sum(np.where(w > 0, w * np.log(np.where(w > 0, w, 1.0)), 0.0), axis=-1)
    return float(np.dot(state.px, ent))


def mutual_info_tx(state: CQState, channel: CQChannel) -> float:
    """I(T:X) = H(sigma_T) - H(T|X)."""
    return von_neumann_entropy(sigma_t(channel, state)) - cond_entropy_t_given_x(
        state, channel
    )


def mutual_info_ty(state: CQState, channel: CQChannel) -> float:
    """I(T:Y) = H(sigma_T) + H(rho_Y) - H(sigma_joint)."""
    return (
        von_neumann_entropy(sigma_t(channel, state))
        + von_neumann_entropy(rho_y(state))
        - von_neumann_entropy(sigma_yt(channel, state))
    )


def objective_f_alpha(
    state: CQState, channel: CQChannel, alpha: float, beta: float
) -> float:
    """Bottleneck objective f = H(T) - alpha H(T|X) - beta I(T:Y)."""
    h_t = von_neumann_entropy(sigma_t(channel, state))
    h_tx = cond_entropy_t_given_x(state, channel)
    i_ty = mutual_info_ty(state, channel)
    return h_t - alpha * h_tx - beta * i_ty


def holevo_information(state: CQState) -> float:
    """I(X:Y) of the source itself: H(rho_Y) - sum_x P(x) H(rho_{Y|x})."""
    avg = von_neumann_entropy(rho_y(state))
    w = np.linalg.eigvalsh(state.rho_y_given_x)
    w = np.clip(w, 0.0, None)
    ent = -np.sum(np.where(w > 0, w * np.log(np.where(w > 0, w, 1.0)), 0.0), axis=-1)
    return avg - float(np.dot(state.px, ent))


def channel_divergence(channel: CQChannel, other: CQChannel, state: CQState) -> float:
    """Average relative entropy sum_x P(x) D(sigma_{T|x} || sigma'_{T|x})."""
    _check_pair(state, channel)
    _check_pair(state, other)
    if channel.dim_t != other.dim_t:
        raise InvariantError(
            f"channels act on different T dimensions: {channel.dim_t} vs {other.dim_t}"
        )
    total = 0.0
    for x in range(state.size_x):
        p = state.px[x]
        if p == 0.0:
            continue
        total += p * relative_entropy(
            channel.sigma_t_given_x[x], other.sigma_t_given_x[x]
        )
    return float(total)


def maximally_mixed_channel(dim_t: int, size_x: int, classical: bool = False) -> CQChannel:
    """Channel sending every x to I/dimT (a fixed point on product sources)."""
    if dim_t < 1 or size_x < 1:
        raise InvariantError(f"dim_t and size_x must be >= 1, got {dim_t}, {size_x}")
    mats = np.broadcast_to(
        np.eye(dim_t, dtype=np.complex128) / dim_t, (size_x, dim_t, dim_t)
    )
    return CQChannel(mats.copy(), classical=classical)
