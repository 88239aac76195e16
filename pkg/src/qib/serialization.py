"""Wire formats and deterministic file output.

Matrices travel as {"dim", "re", "im"} with row-major real/imaginary parts;
a source file wraps {"px", "dimY", "rhoY"} and a channel file {"dimT",
"classical", "sigmaT"}.  CSV floats use %.17g so values round-trip exactly
and repeated runs are byte-identical; writes go through a temp file and
os.replace so readers never observe partial output.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any

import numpy as np

from .engine import IterationTrace
from .exceptions import InvariantError
from .model import CQChannel, CQState

TRACE_COLUMNS = (
    "iter",
    "f_alpha",
    "H_T",
    "I_TX",
    "I_TY",
    "step_divergence",
    "gamma_ratio",
    "fixed_point_residual",
)


def fmt_float(x: float) -> str:
    return "%.17g" % float(x)


def matrix_to_obj(m: np.ndarray) -> dict[str, Any]:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvariantError(f"expected a square matrix, got shape {m.shape}")
    return {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def obj_to_matrix(obj: Any, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise InvariantError(f"{where}: expected an object, got {type(obj).__name__}")
    missing = {"dim", "re", "im"} - obj.keys()
    if missing:
        raise InvariantError(f"{where}: missing keys {sorted(missing)}")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise InvariantError(f"{where}/dim: expected a positive integer, got {dim!r}")
    try:
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvariantError(f"{where}: non-numeric entries ({exc})") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise InvariantError(
            f"{where}: re/im shapes {re.shape}/{im.shape} do not match dim {dim}"
        )
    return re + 1j * im


def state_to_obj(state: CQState) -> dict[str, Any]:
    return {
        "px": state.px.tolist(),
        "dimY": state.dim_y,
        "rhoY": [matrix_to_obj(state.rho_y_given_x[x]) for x in range(state.size_x)],
    }


def obj_to_state(obj: Any, validate: bool = True) -> CQState:
    if not isinstance(obj, dict):
        raise InvariantError(f"state: expected an object, got {type(obj).__name__}")
    missing = {"px", "dimY", "rhoY"} - obj.keys()
    if missing:
        raise InvariantError(f"state: missing keys {sorted(missing)}")
    px = np.asarray(obj["px"], dtype=np.float64)
    dim_y = obj["dimY"]
    mats = obj["rhoY"]
    if not isinstance(mats, list) or len(mats) != px.shape[0]:
        raise InvariantError(
            f"state/rhoY: expected {px.shape[0]} matrices, got "
            f"{len(mats) if isinstance(mats, list) else type(mats).__name__}"
        )
    stack = np.stack(
        [obj_to_matrix(m, where=f"state/rhoY/{x}") for x, m in enumerate(mats)]
    )
    if stack.shape[1] != dim_y:
        raise InvariantError(
            f"state/dimY: declared {dim_y} but matrices have dimension {stack.shape[1]}"
        )
    state = CQState(px, stack)
    if validate:
        state.validate()
    return state


def channel_to_obj(channel: CQChannel) -> dict[str, Any]:
    return {
        "dimT": channel.dim_t,
        "classical": channel.classical,
        "sigmaT": [
            matrix_to_obj(channel.sigma_t_given_x[x]) for x in range(channel.size_x)
        ],
    }


def obj_to_channel(obj: Any, validate: bool = True) -> CQChannel:
    if not isinstance(obj, dict):
        raise InvariantError(f"channel: expected an object, got {type(obj).__name__}")
    missing = {"dimT", "classical", "sigmaT"} - obj.keys()
    if missing:
        raise InvariantError(f"channel: missing keys {sorted(missing)}")
    dim_t = obj["dimT"]
    classical = obj["classical"]
    if not isinstance(classical, bool):
        raise InvariantError(f"channel/classical: expected a boolean, got {classical!r}")
    mats = obj["sigmaT"]
    if not isinstance(mats, list) or not mats:
        raise InvariantError("channel/sigmaT: expected a nonempty list of matrices")
    stack = np.stack(
        [obj_to_matrix(m, where=f"channel/sigmaT/{x}") for x, m in enumerate(mats)]
    )
    if stack.shape[1] != dim_t:
        raise InvariantError(
            f"channel/dimT: declared {dim_t} but matrices have dimension {stack.shape[1]}"
        )
    channel = CQChannel(stack, classical=classical)
    if validate:
        channel.validate()
    return channel


def load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvariantError(f"{path}: invalid JSON ({exc})") from exc


def load_state(path: str, validate: bool = True) -> CQState:
    return obj_to_state(load_json(path), validate=validate)


def load_channel(path: str, validate: bool = True) -> CQChannel:
    return obj_to_channel(load_json(path), validate=validate)


def dump_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_to_csv(trace: IterationTrace, gamma: float | None = None) -> str:
    """Render a trace: header, one row per iterate, status comment last.

    QDIB traces (any record carrying support_t) get the extra support_T
    column.  With ``gamma`` given, a leading gamma column is prepended to
    every row for sweep concatenation.
    """
    with_support = any(r.support_t is not None for r in trace.records)
    cols = list(TRACE_COLUMNS) + (["support_T"] if with_support else [])
    if gamma is not None:
        cols = ["gamma"] + cols
    lines = [",".join(cols)]
    for r in trace.records:
        row = [
            str(r.iteration),
            fmt_float(r.f_alpha),
            fmt_float(r.h_t),
            fmt_float(r.i_tx),
            fmt_float(r.i_ty),
            fmt_float(r.step_divergence),
            fmt_float(r.gamma_ratio),
            fmt_float(r.fixed_point_residual),
        ]
        if with_support:
            row.append(str(r.support_t if r.support_t is not None else ""))
        if gamma is not None:
            row = [fmt_float(gamma)] + row
        lines.append(",".join(row))
    status = f"# status={trace.status}"
    if gamma is not None:
        status += f" gamma={fmt_float(gamma)}"
    if trace.violations:
        status += " violations=" + "|".join(str(v) for v in trace.violations)
    lines.append(status)
    return "\n".join(lines) + "\n"


def trace_to_records(trace: IterationTrace) -> dict[str, Any]:
    """JSON form of a trace: status, violations, row dicts."""
    rows = []
    for r in trace.records:
        row = {
            "iter": r.iteration,
            "f_alpha": r.f_alpha,
            "H_T": r.h_t,
            "I_TX": r.i_tx,
            "I_TY": r.i_ty,
            "step_divergence": r.step_divergence,
            "gamma_ratio": None if np.isnan(r.gamma_ratio) else r.gamma_ratio,
            "fixed_point_residual": r.fixed_point_residual,
        }
        if r.support_t is not None:
            row["support_T"] = r.support_t
        rows.append(row)
    return {
        "status": trace.status,
        "violations": trace.violations,
        "records": rows,
    }
