"""Command-line interface: operator application, matrix build/save, L x N
error sweeps, Fisher evolution runs and oracle comparisons.

Exit codes: 0 success, 2 usage error, 3 numeric failure.  Identical flags
produce byte-identical CSV outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import evolve as ev
from .basis import make_grid
from .closedform import CLOSED_FORMS, OperatorKind
from .errors import NumericError
from .operators import apply_reference, sweep_errors, write_nodal_csv
from .opmatrix import build_base_matrix, deserialize, scale_to_operator, serialize
from .oracle import QuadratureConfig, quad_operator

_FUNC_DERIVS = {
    "erf": lambda x: 2.0 / math.sqrt(math.pi) * math.exp(-x * x),
    "arctan": lambda x: 1.0 / (1.0 + x * x),
    "log1psq": lambda x: 2.0 * x / (1.0 + x * x),
}

_FUNC_SUP = {"erf": 1.0, "arctan": math.pi / 2.0, "log1psq": 30.0}


def _kind(op: str) -> OperatorKind:
    return OperatorKind(op)


def _default_jobs() -> int:
    return int(os.environ.get("RF_SPECTRAL_JOBS", "1"))


def _write_manifest(path: Path, command: str, parameters: dict, outputs: list,
                    wall_time: float, **extra) -> None:
    payload = {
        "command": command,
        "parameters": parameters,
        "outputs": [str(p) for p in outputs],
        "wall_time": wall_time,
    }
    payload.update(extra)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _parse_range(text: str) -> list[float]:
    """start:stop:step, inclusive of stop up to roundoff."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise argparse.ArgumentTypeError("step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def cmd_apply(args) -> int:
    t0 = time.monotonic()
    kind = _kind(args.op)
    out = Path(args.out)
    if args.matrix_in:
        base = deserialize(args.matrix_in)
        if not base.is_base:
            raise ValueError("--matrix-in must hold an unscaled base matrix")
        if base.alpha != args.alpha or base.n != args.N:
            raise ValueError("--matrix-in does not match --alpha/--N")
    else:
        base = build_base_matrix(args.alpha, args.N, args.llim)
    report = apply_reference(
        args.func, kind, args.alpha, args.gamma, args.N, args.L, args.llim,
        base=base,
    )
    csv_path = out.with_suffix(".csv")
    write_nodal_csv(csv_path, report.grid.x_nodes, report.approx, report.exact)
    json_path = out.with_suffix(".json")
    _write_manifest(
        json_path,
        "apply",
        {
            "op": args.op,
            "alpha": args.alpha,
            "gamma": args.gamma,
            "func": args.func,
            "N": args.N,
            "L": args.L,
            "llim": args.llim,
        },
        [csv_path, json_path],
        time.monotonic() - t0,
        linf_error=report.linf_error,
    )
    print(f"linf_error {report.linf_error:.6e}  ->  {csv_path}")
    return 0


def cmd_matrix(args) -> int:
    t0 = time.monotonic()
    base = build_base_matrix(args.alpha, args.N, args.llim, jobs=args.jobs)
    if args.op != "fl" or args.L != 1.0:
        matrix = scale_to_operator(base, _kind(args.op), args.gamma, args.L)
    else:
        matrix = base
    serialize(matrix, args.out)
    out = Path(args.out)
    _write_manifest(
        out.with_suffix(out.suffix + ".json"),
        "matrix",
        {
            "op": args.op,
            "alpha": args.alpha,
            "gamma": args.gamma,
            "N": args.N,
            "L": args.L,
            "llim": args.llim,
        },
        [out],
        time.monotonic() - t0,
    )
    print(f"matrix ({matrix.n}x{matrix.n}, kind {matrix.kind.value}) -> {out}")
    return 0


def cmd_sweep(args) -> int:
    t0 = time.monotonic()
    n_list = _parse_int_list(args.N_list)
    l_list = _parse_range(args.L_range)
    errors = sweep_errors(
        args.func, _kind(args.op), args.alpha, args.gamma, n_list, l_list,
        args.llim, jobs=args.jobs,
    )
    out = Path(args.out)
    with open(out, "w") as fh:
        fh.write("L," + ",".join(str(n) for n in n_list) + "\n")
        for row, l_scale in enumerate(l_list):
            cells = ",".join(f"{errors[row, col]:.17g}" for col in range(len(n_list)))
            fh.write(f"{l_scale:.17g},{cells}\n")
    _write_manifest(
        out.with_suffix(out.suffix + ".json"),
        "sweep",
        {
            "op": args.op,
            "alpha": args.alpha,
            "gamma": args.gamma,
            "func": args.func,
            "N_list": n_list,
            "L_range": args.L_range,
            "llim": args.llim,
        },
        [out],
        time.monotonic() - t0,
        min_error=float(np.min(errors)),
    )
    print(f"min error {np.min(errors):.6e} -> {out}")
    return 0


def _run_evolution(args, gamma: float, out_dir: Path) -> dict:
    config = ev.EvolutionConfig(
        alpha=args.alpha,
        gamma=gamma,
        n=args.N,
        l_scale=args.L,
        l_lim=args.llim,
        dt=args.dt,
        t_end=args.t_end,
        snapshot_stride=args.stride,
    )
    result = ev.rk4_evolve(config, wall_budget=args.budget)
    out_dir.mkdir(parents=True, exist_ok=True)
    x_nodes = make_grid(args.N, args.L).x_nodes
    outputs = []
    for i, snap in enumerate(result.snapshots):
        path = out_dir / f"snapshot_{i:04d}.csv"
        with open(path, "w") as fh:
            fh.write("x,u\n")
            for x, u in zip(x_nodes, snap):
                fh.write(f"{x:.17g},{u:.17g}\n")
        outputs.append(path)
    fit = ev.fit_exponential(result.trace, (args.fit_window[0], args.fit_window[1]))
    summary = {
        "alpha": args.alpha,
        "gamma": gamma,
        "N": args.N,
        "L": args.L,
        "dt": args.dt,
        "slope": fit.slope,
        "pearson_rho": fit.pearson_rho,
        "samples": [
            [float(t), float(x)]
            for t, x in zip(result.trace.times, result.trace.x_half)
        ],
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    outputs.append(summary_path)
    return {"summary": summary, "outputs": outputs}


def cmd_evolve(args) -> int:
    t0 = time.monotonic()
    if len(args.fit_window) != 2 or args.fit_window[0] >= args.fit_window[1]:
        raise ValueError("--fit-window expects t0,t1 with t0 < t1")
    gammas = _parse_float_list(args.gamma)
    out_dir = Path(args.out_dir)
    runs = []
    if len(gammas) == 1:
        runs.append(_run_evolution(args, gammas[0], out_dir))
    else:
        targets = [
            (g, out_dir / f"gamma_{g:+.4f}".replace("+", "p").replace("-", "m"))
            for g in gammas
        ]
        if args.jobs > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                runs = list(
                    pool.map(lambda gd: _run_evolution(args, gd[0], gd[1]), targets)
                )
        else:
            runs = [_run_evolution(args, g, d) for g, d in targets]
    outputs = [p for r in runs for p in r["outputs"]]
    _write_manifest(
        out_dir / "manifest.json",
        "evolve",
        {
            "alpha": args.alpha,
            "gamma": gammas,
            "N": args.N,
            "L": args.L,
            "llim": args.llim,
            "dt": args.dt,
            "t_end": args.t_end,
            "stride": args.stride,
            "fit_window": list(args.fit_window),
        },
        outputs,
        time.monotonic() - t0,
    )
    for run in runs:
        s = run["summary"]
        print(
            f"gamma {s['gamma']:+.4f}: slope {s['slope']:.6f} "
            f"(1/alpha = {1.0 / args.alpha:.6f}), 1-rho {1.0 - s['pearson_rho']:.3e}"
        )
    return 0


def cmd_oracle(args) -> int:
    t0 = time.monotonic()
    kind = _kind(args.op)
    func = CLOSED_FORMS[args.func]
    report = apply_reference(
        args.func, kind, args.alpha, args.gamma, args.N, args.L, args.llim
    )
    grid = report.grid
    idx = np.linspace(grid.n * 0.25, grid.n * 0.75, args.num_points).astype(int)
    cfg = QuadratureConfig.for_function(
        args.alpha, u_sup=_FUNC_SUP[args.func], abs_tol=args.quad_tol,
        rel_tol=args.quad_tol,
    )
    du = _FUNC_DERIVS[args.func]
    value = lambda x: float(func.value(x))
    rows = []
    for j in idx:
        x = float(grid.x_nodes[j])
        spectral = float(np.real(report.approx[j]))
        quad_val = float(
            np.real(quad_operator(kind, args.alpha, args.gamma, value, x, cfg, du=du))
        )
        closed = float(report.exact[j])
        rows.append((x, spectral, quad_val, closed))
    out = Path(args.out)
    with open(out, "w") as fh:
        fh.write("x,spectral,quadrature,closed_form\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    max_diff = max(abs(r[1] - r[2]) for r in rows)
    _write_manifest(
        out.with_suffix(out.suffix + ".json"),
        "oracle",
        {
            "op": args.op,
            "alpha": args.alpha,
            "gamma": args.gamma,
            "func": args.func,
            "N": args.N,
            "L": args.L,
            "llim": args.llim,
            "num_points": args.num_points,
        },
        [out],
        time.monotonic() - t0,
        max_spectral_vs_quadrature=max_diff,
    )
    print(f"max |spectral - quadrature| = {max_diff:.6e} -> {out}")
    return 0


def _add_common(p, with_func=True):
    p.add_argument("--op", required=True,
                   choices=[k.value for k in OperatorKind])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)
    if with_func:
        p.add_argument("--func", required=True, choices=sorted(CLOSED_FORMS))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--llim", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfspectral",
        description="Pseudospectral fractional operators on the real line",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", help="apply an operator to a reference function")
    _add_common(p)
    p.add_argument("--out", required=True, help="output prefix (.csv/.json)")
    p.add_argument("--matrix-in", help="reuse a serialized base matrix")
    p.set_defaults(run=cmd_apply)

    p = sub.add_parser("matrix", help="build and serialize an operator matrix")
    p.add_argument("--op", default="fl", choices=[k.value for k in OperatorKind])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--llim", type=int, default=100)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_matrix)

    p = sub.add_parser("sweep", help="L x N error sweep against a closed form")
    p.add_argument("--op", required=True, choices=[k.value for k in OperatorKind])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--func", required=True, choices=sorted(CLOSED_FORMS))
    p.add_argument("--llim", type=int, default=100)
    p.add_argument("--N-list", required=True, dest="N_list",
                   help="comma-separated node counts, e.g. 8,16,32")
    p.add_argument("--L-range", required=True, dest="L_range",
                   help="start:stop:step map scales, e.g. 0.5:5:0.5")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_sweep)

    p = sub.add_parser("evolve", help="run the Fisher front experiment")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", required=True,
                   help="skewness, or comma-separated list for a fan-out")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--llim", type=int, default=100)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--fit-window", type=_parse_float_list, required=True,
                   dest="fit_window", help="t0,t1 for the slope fit")
    p.add_argument("--budget", type=float, default=None,
                   help="wall-time budget in seconds")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.set_defaults(run=cmd_evolve)

    p = sub.add_parser("oracle", help="spectral vs quadrature vs closed form")
    _add_common(p)
    p.add_argument("--num-points", type=int, default=5, dest="num_points")
    p.add_argument("--quad-tol", type=float, default=1e-9, dest="quad_tol")
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
