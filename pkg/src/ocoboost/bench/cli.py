"""Benchmark CLI.

Subcommands:
  run     — streaming regression benchmark on a dataset, normalized table out
  synth   — synthetic acceptance scenarios (oco | bandit | sco)
  kernels — time the numba kernels against their pure-numpy fallbacks
  fetch   — one-time dataset downloads (california, boston)

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from ..errors import ConfigError, DataError, OcoBoostError
from . import synth
from .data import fetch_boston, fetch_california
from .experiment import ExperimentConfig, emit_table, run_experiment


def _int_list(text: str):
    return tuple(int(tok) for tok in text.split(",") if tok)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocoboost-bench",
        description="Benchmarks for boosted online convex optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="streaming regression benchmark")
    p_run.add_argument("--dataset", required=True,
                       help="dataset name (diabetes|california|boston|synthetic) or CSV path")
    p_run.add_argument("--learner", default="stump",
                       help="comma-separated subset of stump,ridge,mlp")
    p_run.add_argument("--n", type=_int_list, default=(2, 3, 4, 5),
                       help="comma-separated ensemble sizes (default 2,3,4,5)")
    p_run.add_argument("--gamma", type=float, default=0.1)
    p_run.add_argument("--step", type=float, default=0.01)
    p_run.add_argument("--runs", type=int, default=20)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", choices=("markdown", "csv", "json"),
                       default="markdown")
    p_run.add_argument("--target-col", default=None)
    p_run.add_argument("--data-dir", default=None)

    p_synth = sub.add_parser("synth", help="synthetic acceptance scenarios")
    p_synth.add_argument("--scenario", required=True,
                         choices=("oco", "bandit", "sco"))
    p_synth.add_argument("--n", type=_int_list, default=None,
                         help="ensemble sizes / stage counts")
    p_synth.add_argument("--horizon", type=int, default=None)
    p_synth.add_argument("--seeds", type=int, default=10,
                         help="number of seeds to average over")
    p_synth.add_argument("--seed", type=int, default=0, help="base seed")
    p_synth.add_argument("--gamma", type=float, default=0.5)
    p_synth.add_argument("--explore-rate", default="auto")
    p_synth.add_argument("--out", choices=("markdown", "csv", "json"),
                         default="markdown")

    p_k = sub.add_parser("kernels", help="numba vs numpy kernel timings")
    p_k.add_argument("--size", type=int, default=100000,
                     help="number of kernel invocations per measurement")
    p_k.add_argument("--dim", type=int, default=8, help="simplex dimension")

    p_fetch = sub.add_parser("fetch", help="one-time dataset downloads")
    p_fetch.add_argument("name", choices=("california", "boston"))
    p_fetch.add_argument("--dest", default=None,
                         help="destination directory (default: data search path)")
    p_fetch.add_argument("--sha256", default=None,
                         help="expected checksum (boston only)")
    return parser


def _cmd_run(args) -> int:
    cfg = ExperimentConfig(
        dataset=args.dataset,
        learners=tuple(args.learner.split(",")),
        n_values=args.n,
        gamma=args.gamma, step=args.step, runs=args.runs, seed=args.seed,
        target_col=args.target_col, data_dir=args.data_dir)
    result = run_experiment(cfg)
    sys.stdout.write(emit_table(result, args.out))
    return 0


def _rows_to_text(headers, rows, fmt: str) -> str:
    if fmt == "json":
        payload = [dict(zip(headers, row)) for row in rows]
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        lines = [",".join(headers)]
        lines += [",".join(str(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows))
              for i, h in enumerate(headers)]
    head = " | ".join(str(h).ljust(w) for h, w in zip(headers, widths))
    rule = "-|-".join("-" * w for w in widths)
    body = [" | ".join(str(v).ljust(w) for v, w in zip(row, widths))
            for row in rows]
    return "\n".join([head, rule] + body) + "\n"


def _cmd_synth(args) -> int:
    if args.scenario == "oco":
        n_values = args.n or (4, 16, 64)
        horizon = args.horizon or 5000
        rows = []
        for n in n_values:
            outs = [synth.oco_scenario(n, horizon=horizon, gamma=args.gamma,
                                       seed=args.seed + s)
                    for s in range(args.seeds)]
            regrets = [o["regret"] for o in outs]
            rows.append([n, f"{np.mean(regrets):.3f}", f"{outs[0]['bound']:.3f}"])
        text = _rows_to_text(["N", "mean_regret", "bound"], rows, args.out)
    elif args.scenario == "bandit":
        horizon = args.horizon or 4000
        rate = args.explore_rate
        if rate != "auto":
            rate = float(rate)
        n = (args.n or (16,))[0]
        regrets = []
        rates = []
        for s in range(args.seeds):
            out = synth.bandit_scenario(horizon, n_learners=n,
                                        gamma=args.gamma, explore_rate=rate,
                                        seed=args.seed + s)
            regrets.append(out["regrets"][horizon])
            rates.append(out["explore_rate"])
        rows = [[horizon, n, f"{rates[0]:.4f}", f"{np.mean(regrets):.3f}"]]
        text = _rows_to_text(["T", "N", "explore_rate", "mean_regret"],
                             rows, args.out)
    else:
        n_values = args.n or (16, 64, 256)
        rows = []
        for n in n_values:
            out = synth.sco_scenario(n, gamma=args.gamma, seed=args.seed)
            rows.append([n, f"{out['gap']:.6f}", f"{out['bound']:.3f}"])
        text = _rows_to_text(["N", "gap", "bound"], rows, args.out)
    sys.stdout.write(text)
    return 0


def _time_calls(fn, args_list) -> float:
    t0 = time.perf_counter()
    for a in args_list:
        fn(*a)
    return time.perf_counter() - t0


def _cmd_kernels(args) -> int:
    from .. import _kernels as k
    rng = np.random.default_rng(0)
    vecs = rng.standard_normal((256, args.dim))
    xs = rng.standard_normal(256)

    # warm the JIT before timing
    k.project_simplex_jit(vecs[0], 1.0)
    k.prox_quad_interval_jit(1.0, 0.0, -1.0, 1.0, 1.0, 0.5, 0.3)

    simplex_args = [(vecs[i % 256], 1.0) for i in range(args.size)]
    prox_args = [(1.0, 0.2, -1.0, 1.0, 1.0, 0.5, float(xs[i % 256]))
                 for i in range(args.size)]
    rows = []
    for name, jit_fn, np_fn, argset in (
            ("project_simplex", k.project_simplex_jit, k.project_simplex_np,
             simplex_args),
            ("prox_quad_interval", k.prox_quad_interval_jit,
             k.prox_quad_interval_np, prox_args)):
        t_jit = _time_calls(jit_fn, argset)
        t_np = _time_calls(np_fn, argset)
        rows.append([name, f"{t_jit:.4f}s", f"{t_np:.4f}s",
                     f"{t_np / max(t_jit, 1e-12):.1f}x"])
    header = ["kernel", "numba", "numpy", "speedup"]
    sys.stdout.write(_rows_to_text(header, rows, "markdown"))
    sys.stdout.write(f"numba enabled at import: {k.NUMBA_ENABLED} "
                     f"(set OCOBOOST_NUMBA=0 to force the numpy path)\n")
    return 0


def _cmd_fetch(args) -> int:
    from .data import _search_dirs
    dest = args.dest or str(_search_dirs()[0])
    if args.name == "california":
        out = fetch_california(dest)
    else:
        out = fetch_boston(dest, sha256=args.sha256)
    sys.stdout.write(f"wrote {out}\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "kernels":
            return _cmd_kernels(args)
        if args.command == "fetch":
            return _cmd_fetch(args)
        raise ConfigError(f"unknown command {args.command}")
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, OcoBoostError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
