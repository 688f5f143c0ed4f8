"""Command-line front end.

    kss2d run   --config FILE [--alpha A --nx N --ny N --dt DT|auto
                               --t-end T --out DIR --seed S] [--echo-every K]
    kss2d mms   [--levels L --base N]
    kss2d bench [--size N --reps R]

Exit codes for `run`: 0 when the verdict is bounded, 2 growing,
3 blown_up, 1 on configuration or solver errors.
"""
from __future__ import annotations

import argparse
import sys

from .config import apply_overrides, load_config
from .diagnostics import Verdict
from .errors import ConfigError
from .runner import StepFailure, run

_EXIT = {Verdict.BOUNDED: 0, Verdict.GROWING: 2, Verdict.BLOWN_UP: 3}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kss2d",
        description="Finite-volume chemotaxis-fluid simulator on a "
                    "staggered grid, with growth diagnostics.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    rp = sub.add_parser("run", help="step a configured simulation")
    rp.add_argument("--config", required=True, help="configuration file")
    rp.add_argument("--alpha", type=float, help="production exponent override")
    rp.add_argument("--nx", type=int, help="cells in x override")
    rp.add_argument("--ny", type=int, help="cells in y override")
    rp.add_argument("--dt", help="time step override (number or 'auto')")
    rp.add_argument("--t-end", dest="t_end", type=float,
                    help="final time override")
    rp.add_argument("--out", help="output directory override")
    rp.add_argument("--seed", type=int, help="rng seed override")
    rp.add_argument("--echo-every", dest="echo_every", type=int, default=0,
                    metavar="K", help="print every K-th sample (0: quiet)")

    mp = sub.add_parser("mms", help="manufactured-solution convergence study")
    mp.add_argument("--levels", type=int, default=3)
    mp.add_argument("--base", type=int, default=32,
                    help="coarsest grid (cells per side)")

    bp = sub.add_parser("bench", help="compare compute backends")
    bp.add_argument("--size", type=int, default=128,
                    help="grid cells per side")
    bp.add_argument("--reps", type=int, default=5,
                    help="repetitions per measurement (best is kept)")
    return ap


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, alpha=args.alpha, nx=args.nx, ny=args.ny,
                              dt=args.dt, t_end=args.t_end, out=args.out,
                              seed=args.seed)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    try:
        result = run(cfg, echo_every=args.echo_every)
    except StepFailure as e:
        print(f"run failed: {e}", file=sys.stderr)
        return 1
    last = result.history[-1]
    print(f"verdict: {result.verdict.value}")
    print(f"  steps {result.steps}, dt {result.dt:.6g}, final t {last.t:.6g}")
    print(f"  mass {last.mass:.9g}, max n {last.linf_n:.6g}, "
          f"max |u| {last.linf_u:.3g}")
    print(f"  outputs in {result.out_dir}/")
    return _EXIT[result.verdict]


def _cmd_mms(args) -> int:
    from .mms import mms_convergence
    try:
        results = mms_convergence(levels=args.levels, base=args.base)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    floors = {"diffusion": 1.8, "transport": 0.8, "stokes": 1.8}
    ok = True
    for r in results:
        passed = r.order >= floors[r.case]
        ok = ok and passed
        print(r.table())
        print(f"  {'PASS' if passed else 'FAIL'} "
              f"(required >= {floors[r.case]})\n")
    return 0 if ok else 1


def _cmd_bench(args) -> int:
    from .bench import format_table, run_benchmark
    rows = run_benchmark(size=args.size, reps=args.reps)
    print(format_table(rows))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.cmd == "run":
        return _cmd_run(args)
    if args.cmd == "mms":
        return _cmd_mms(args)
    return _cmd_bench(args)


if __name__ == "__main__":
    sys.exit(main())
