"""Command-line interface.

Subcommands mirror the library pipelines: run-qib / run-qdib iterate one
source to convergence and emit the iteration trace; gamma-sweep and
beta-sweep fan out runs over parameter lists; advantage prints the analytic
separation table; classify and suffstats run the experiment pipelines;
validate checks a state or channel file.

Exit codes: 0 success, 1 validation failure (bad config, bad file, bad
usage), 2 numerical failure inside an otherwise valid computation.
"""

from __future__ import annotations

import argparse
import sys

from . import benchmarks, config as cfg, engine, qdib, serialization
from .exceptions import InvariantError, NumericalError
from .experiments import beta_sweep, classify_pipeline, gamma_sweep, suffstats_pipeline
from .experiments.ensembles import SuffStatsSpec
from .rng import derive_seed

BETA_SWEEP_COLUMNS = ("beta", "f", "H_T", "I_TX", "I_TY", "kappa_lower_bound")
ADVANTAGE_COLUMNS = ("d", "n", "alpha", "beta", "quantum", "classical", "gap", "achieved_quantum")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        serialization.write_text_atomic(out, text)


def _load_config(args: argparse.Namespace, schema: dict) -> tuple[dict, int]:
    obj = serialization.load_json(args.config)
    cfg.validate_config(obj, schema)
    seed = args.seed if args.seed is not None else obj.get("seed", 0)
    return obj, seed


def _maybe_emit_state(args: argparse.Namespace, state) -> None:
    if getattr(args, "emit_state", None):
        serialization.write_text_atomic(
            args.emit_state, serialization.dump_json(serialization.state_to_obj(state))
        )


def _cmd_run_qib(args: argparse.Namespace) -> int:
    obj, seed = _load_config(args, cfg.RUN_QIB_SCHEMA)
    state = cfg.resolve_state(obj["state"], seed)
    run_cfg = cfg.objective_config(obj, seed)
    initial = cfg.resolve_initial_channel(
        obj.get("initial_channel"), run_cfg.dim_t, state.size_x, run_cfg.classical
    )
    _, trace = engine.run_qib(state, run_cfg, initial=initial)
    _maybe_emit_state(args, state)
    if args.format == "json":
        _emit(serialization.dump_json(serialization.trace_to_records(trace)), args.out)
    else:
        _emit(serialization.trace_to_csv(trace), args.out)
    return 0


def _cmd_run_qdib(args: argparse.Namespace) -> int:
    obj, seed = _load_config(args, cfg.RUN_QDIB_SCHEMA)
    state = cfg.resolve_state(obj["state"], seed)
    run_cfg = cfg.objective_config(obj, seed, alpha_override=0.0)
    initial = cfg.resolve_initial_channel(
        obj.get("initial_channel"), run_cfg.dim_t, state.size_x, run_cfg.classical
    )
    _, trace = qdib.run_qdib(state, run_cfg, initial=initial)
    _maybe_emit_state(args, state)
    if args.format == "json":
        _emit(serialization.dump_json(serialization.trace_to_records(trace)), args.out)
    else:
        _emit(serialization.trace_to_csv(trace), args.out)
    return 0


def _cmd_gamma_sweep(args: argparse.Namespace) -> int:
    obj, seed = _load_config(args, cfg.GAMMA_SWEEP_SCHEMA)
    state = cfg.resolve_state(obj["state"], seed)
    run_cfg = cfg.objective_config(obj, seed)
    results, _ = gamma_sweep(state, run_cfg, obj["gamma_list"], jobs=args.jobs)
    _maybe_emit_state(args, state)
    if args.format == "json":
        payload = {
            "runs": [
                {"gamma": g, **serialization.trace_to_records(t)} for g, t in results
            ]
        }
        _emit(serialization.dump_json(payload), args.out)
    else:
        chunks = []
        for i, (g, trace) in enumerate(results):
            text = serialization.trace_to_csv(trace, gamma=g)
            if i:
                text = text.split("\n", 1)[1]
            chunks.append(text)
        _emit("".join(chunks), args.out)
    return 0


def _cmd_beta_sweep(args: argparse.Namespace) -> int:
    obj, seed = _load_config(args, cfg.BETA_SWEEP_SCHEMA)
    state = cfg.resolve_state(obj["state"], seed)
    run_cfg = cfg.objective_config(obj, seed)
    rows = beta_sweep(
        state,
        run_cfg,
        obj["beta_list"],
        kappa_samples=obj.get("kappa_samples", 200),
        jobs=args.jobs,
    )
    _maybe_emit_state(args, state)
    if args.format == "json":
        _emit(serialization.dump_json(rows), args.out)
    else:
        lines = [",".join(BETA_SWEEP_COLUMNS)]
        for row in rows:
            lines.append(
                ",".join(serialization.fmt_float(row[c]) for c in BETA_SWEEP_COLUMNS)
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InvariantError(f"{flag} expects comma-separated integers, got {text!r}") from exc
    if not values:
        raise InvariantError(f"{flag} produced no values")
    return values


def _cmd_advantage(args: argparse.Namespace) -> int:
    ds = _parse_int_list(args.d, "--d")
    ns = _parse_int_list(args.n, "--n")
    if len(ds) == 1:
        ds = ds * len(ns)
    if len(ns) == 1:
        ns = ns * len(ds)
    if len(ds) != len(ns):
        raise InvariantError(
            f"--d and --n must have matching lengths (or one scalar), got {len(ds)} and {len(ns)}"
        )
    reports = [
        benchmarks.advantage_gap(d, n, args.alpha, args.beta)
        for d, n in zip(ds, ns)
    ]
    if args.format == "json":
        payload = [{c: getattr(r, c) for c in ADVANTAGE_COLUMNS} for r in reports]
        _emit(serialization.dump_json(payload), args.out)
    else:
        lines = [",".join(ADVANTAGE_COLUMNS)]
        for r in reports:
            lines.append(
                ",".join(
                    [
                        str(r.d),
                        str(r.n),
                        serialization.fmt_float(r.alpha),
                        serialization.fmt_float(r.beta),
                        serialization.fmt_float(r.quantum),
                        serialization.fmt_float(r.classical),
                        serialization.fmt_float(r.gap),
                        serialization.fmt_float(r.achieved_quantum),
                    ]
                )
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    obj, seed = _load_config(args, cfg.CLASSIFY_SCHEMA)
    grid_step = args.grid_step if args.regions_out else None
    report = classify_pipeline(
        seed=seed,
        alpha=obj.get("alpha", 1.0),
        beta=obj.get("beta", 15.0),
        gamma=obj.get("gamma"),
        dim_t=obj.get("dimT", 2),
        ridge=obj.get("ridge", 1e-3),
        n_samples=obj.get("n_samples", 400),
        train_fraction=obj.get("train_fraction", 0.5),
        tol=obj.get("tol", 1e-8),
        max_iters=obj.get("max_iters", 500),
        grid_step=grid_step,
    )
    metrics = dict(report.metrics)
    metrics["seed"] = seed
    _emit(serialization.dump_json(metrics), args.out)
    if args.regions_out:
        lines = ["x1,x2,pred_quantum,pred_classical,pred_linear"]
        for x1, x2, pq, pc, pl in report.region_rows:
            lines.append(
                f"{serialization.fmt_float(x1)},{serialization.fmt_float(x2)},{pq},{pc},{pl}"
            )
        serialization.write_text_atomic(args.regions_out, "\n".join(lines) + "\n")
    return 0


def _cmd_suffstats(args: argparse.Namespace) -> int:
    obj, seed = _load_config(args, cfg.SUFFSTATS_SCHEMA)
    if args.out is None:
        raise InvariantError("suffstats writes multiple files; --out DIRECTORY is required")
    spec = SuffStatsSpec(
        size_x1=obj.get("sizeX1", 5),
        size_x2=obj.get("sizeX2", 20),
        nu=obj.get("nu", 20.0),
        permutation_seed=derive_seed(seed, "perm"),
        noise_seed=derive_seed(seed, "noise"),
    )
    report = suffstats_pipeline(
        spec,
        beta=obj.get("beta", 20.0),
        dim_t=obj.get("dimT"),
        seed=seed,
        tol=obj.get("tol", 1e-8),
        max_iters=obj.get("max_iters", 200),
    )
    _maybe_emit_state(args, report.instance.state)
    out = args.out.rstrip("/")
    fdib_lines = ["iter,f_dib_qdib,f_dib_baseline"]
    for it, f_q, f_b in report.fdib_rows:
        fdib_lines.append(
            f"{it},{serialization.fmt_float(f_q)},{serialization.fmt_float(f_b)}"
        )
    serialization.write_text_atomic(f"{out}/fdib.csv", "\n".join(fdib_lines) + "\n")
    ity_lines = ["iter,I_TY,I_X1Y_baseline,I_XY"]
    for it, i_ty, i_x1y, i_xy in report.ity_rows:
        ity_lines.append(
            f"{it},{serialization.fmt_float(i_ty)},"
            f"{serialization.fmt_float(i_x1y)},{serialization.fmt_float(i_xy)}"
        )
    serialization.write_text_atomic(f"{out}/ity.csv", "\n".join(ity_lines) + "\n")
    metrics = dict(report.metrics)
    metrics["seed"] = seed
    metrics["status"] = report.trace.status
    serialization.write_text_atomic(
        f"{out}/metrics.json", serialization.dump_json(metrics)
    )
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    obj = serialization.load_json(args.file)
    if isinstance(obj, dict) and "rhoY" in obj:
        state = serialization.obj_to_state(obj, validate=True)
        sys.stdout.write(
            f"ok: state with sizeX={state.size_x}, dimY={state.dim_y}\n"
        )
        return 0
    if isinstance(obj, dict) and "sigmaT" in obj:
        channel = serialization.obj_to_channel(obj, validate=True)
        kind = "classical" if channel.classical else "quantum"
        sys.stdout.write(
            f"ok: {kind} channel with sizeX={channel.size_x}, dimT={channel.dim_t}\n"
        )
        return 0
    raise InvariantError(
        f"{args.file}: neither a state file (rhoY) nor a channel file (sigmaT)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qib",
        description="Accelerated quantum information bottleneck toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, jobs: bool = False, emit_state: bool = True):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output path (stdout when omitted)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if jobs:
            p.add_argument("--jobs", type=int, default=1, help="concurrent runs")
        if emit_state:
            p.add_argument("--emit-state", default=None, help="also write the resolved state JSON")

    p = sub.add_parser("run-qib", help="iterate the soft bottleneck to convergence")
    add_common(p)
    p.set_defaults(func=_cmd_run_qib)

    p = sub.add_parser("run-qdib", help="iterate the deterministic bottleneck")
    add_common(p)
    p.set_defaults(func=_cmd_run_qdib)

    p = sub.add_parser("gamma-sweep", help="one run per step size from a shared start")
    add_common(p, jobs=True)
    p.set_defaults(func=_cmd_gamma_sweep)

    p = sub.add_parser("beta-sweep", help="converged metrics per trade-off weight")
    add_common(p, jobs=True)
    p.set_defaults(func=_cmd_beta_sweep)

    p = sub.add_parser("advantage", help="analytic quantum vs classical table")
    p.add_argument("--d", required=True, help="source sizes, comma separated")
    p.add_argument("--n", required=True, help="bottleneck dimensions, comma separated")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_advantage)

    p = sub.add_parser("classify", help="kernel classification experiment")
    add_common(p, emit_state=False)
    p.add_argument("--regions-out", default=None, help="decision-region CSV path")
    p.add_argument("--grid-step", type=float, default=0.25)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("suffstats", help="sufficient-statistics recovery experiment")
    add_common(p)
    p.set_defaults(func=_cmd_suffstats)

    p = sub.add_parser("validate", help="check a state or channel file")
    p.add_argument("file", help="JSON file to validate")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; usage errors are validation failures.
        return 0 if not exc.code else 1
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename or exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
