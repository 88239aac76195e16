"""Deterministic bottleneck: the alpha -> 0 projector limit of the solver.

At alpha = 0 the multiplicative update degenerates to projection onto the
minimal eigenspace of F_0(x), equivalently the maximal eigenspace of the
score operator

    S(x) = (1 - beta) log sigma_T + beta Tr_Y[(I (x) rho_{Y|x})
           (log sigma_joint - I (x) log rho_Y)] = -F_0(x),

and the objective H(T) - beta I(T:Y) decreases at every step with no
side condition.  On classical channels the iterates are exact point
masses, i.e. deterministic cluster assignments.
"""

from __future__ import annotations

import numpy as np

from . import engine, linalg, model, rng
from .engine import IterationTrace, TraceRecord, _Analysis, _StateCtx
from .exceptions import InvariantError, NumericalError
from .model import CQChannel, CQState, ObjectiveConfig

OVERLAP_TOL = 1e-14
PROJECTOR_REL_TOL = 1e-9
SUPPORT_EVAL_TOL = 1e-9


def score_operator(state: CQState, channel: CQChannel, beta: float) -> np.ndarray:
    """Stacked score family S(x) = -F_0(x), shape (sizeX, dimT, dimT)."""
    return -engine.f_operator(state, channel, alpha=0.0, beta=beta)


def min_eigenspace_projector(h: np.ndarray, rel_tol: float = PROJECTOR_REL_TOL) -> np.ndarray:
    """Orthogonal projector onto the minimal eigenspace of a Hermitian matrix.

    Eigenvalues within rel_tol * (spread) of the minimum count as tied and
    are kept, so a multiple of the identity yields the full identity.
    """
    h = np.asarray(h)
    w, v = linalg.eig_hermitian(h)
    window = w[0] + rel_tol * (w[-1] - w[0])
    sel = v[:, w <= window]
    return linalg.hermitize(sel @ np.conj(sel.T))


def qdib_update(state: CQState, channel: CQChannel, beta: float) -> CQChannel:
    """One deterministic update: conditionals are compressed onto the
    minimal eigenspace of F_0 and renormalized.

    Raises NumericalError naming x if an overlap Tr[sigma_{T|x} P(x)]
    vanishes (below 1e-14); the runner has a principled fallback for that
    case, the bare op does not.
    """
    fam = engine.f_operator(state, channel, alpha=0.0, beta=beta)
    mats = channel.sigma_t_given_x
    out = np.empty_like(mats)
    for x in range(state.size_x):
        proj = min_eigenspace_projector(fam[x])
        comp = proj @ mats[x] @ proj
        overlap = float(np.trace(comp).real)
        if overlap <= OVERLAP_TOL:
            raise NumericalError(
                f"deterministic update undefined at x={x}: projector overlap "
                f"{overlap:.3e} vanishes (conditional has no mass on the "
                "minimal eigenspace)"
            )
        out[x] = comp / overlap
    out = linalg.hermitize(out)
    if channel.classical:
        out = _rediagonalize(out)
    return CQChannel(out, channel.classical)


def _rediagonalize(mats: np.ndarray) -> np.ndarray:
    diag = np.clip(np.einsum("xii->xi", mats).real, 0.0, None)
    diag /= diag.sum(axis=1)[:, None]
    return linalg.diag_embed(diag, dtype=mats.dtype)


def _projected_step(
    ctx: _StateCtx, analysis: _Analysis, classical: bool
) -> np.ndarray:
    """Runner step: qdib_update, with vanishing-overlap x reassigned to the
    normalized projector P/rank(P) (the exact alpha -> 0 limit of the
    gamma = alpha update, which is monotone with no overlap condition)."""
    mats = analysis.mats
    out = np.empty_like(mats)
    for x in range(mats.shape[0]):
        proj = min_eigenspace_projector(analysis.f_family[x])
        comp = proj @ mats[x] @ proj
        overlap = float(np.trace(comp).real)
        if overlap <= OVERLAP_TOL:
            out[x] = proj / float(np.trace(proj).real)
        else:
            out[x] = comp / overlap
    out = linalg.hermitize(out)
    if classical:
        out = _rediagonalize(out)
    return out


def run_qdib(
    state: CQState,
    config: ObjectiveConfig,
    initial: CQChannel | None = None,
) -> tuple[CQChannel, IterationTrace]:
    """Deterministic-bottleneck runner; alpha is pinned to 0.

    Same trace semantics as the soft solver, with support_T (count of
    sigma_T eigenvalues above 1e-9) per row and no step-size ratio (gamma
    has no role here, the column is nan).
    """
    config.validate()
    if config.alpha != 0.0:
        raise InvariantError(
            f"deterministic runner requires alpha=0, got alpha={config.alpha}"
        )
    if initial is None:
        initial = engine.random_channel(
            config.dim_t,
            state.size_x,
            classical=config.classical,
            seed=rng.derive_rng(config.seed, "run-qdib", "init"),
        )
    elif initial.size_x != state.size_x:
        raise InvariantError(
            f"initial channel has sizeX {initial.size_x}, state has {state.size_x}"
        )

    beta = config.beta
    ctx = _StateCtx(state)
    cur = _Analysis(ctx, initial.sigma_t_given_x, 0.0, beta)
    trace = IterationTrace()
    converged = False
    for n in range(1, config.max_iters + 1):
        nxt = _Analysis(ctx, _projected_step(ctx, cur, config.classical), 0.0, beta)
        trace.records.append(_record(ctx, n, cur, nxt))
        if nxt.f_alpha > cur.f_alpha + engine.MONOTONICITY_TOL:
            trace.violations.append(n)
        prev_f = cur.f_alpha
        cur = nxt
        if abs(prev_f - cur.f_alpha) <= config.tol:
            converged = True
            break
    tail = _Analysis(ctx, _projected_step(ctx, cur, config.classical), 0.0, beta)
    trace.records.append(_record(ctx, len(trace.records) + 1, cur, tail))
    if trace.violations:
        trace.status = engine.STATUS_MONOTONICITY_VIOLATED
    elif converged:
        trace.status = engine.STATUS_CONVERGED
    else:
        trace.status = engine.STATUS_MAX_ITERS
    return CQChannel(cur.mats, config.classical), trace


def _record(ctx: _StateCtx, n: int, cur: _Analysis, nxt: _Analysis) -> TraceRecord:
    support = int(np.sum(cur.sigma_t_evals > SUPPORT_EVAL_TOL))
    return TraceRecord(
        iteration=n,
        f_alpha=cur.f_alpha,
        h_t=cur.h_t,
        i_tx=cur.i_tx,
        i_ty=cur.i_ty,
        step_divergence=engine._avg_divergence(ctx.px, cur, nxt),
        gamma_ratio=float("nan"),
        fixed_point_residual=engine._residual(ctx.px, cur.mats, nxt.mats),
        support_t=support,
    )
