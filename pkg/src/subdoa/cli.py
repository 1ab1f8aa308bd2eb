"""Command-line entry point: ``subdoa {simulate,sweep,complexity,crlb}``."""

import argparse
import logging
import math
import sys
from dataclasses import replace

from . import bench
from .analytics import CrlbInputs, crlb_psac
from .array_model import ArrayConfig, synthesize
from .errors import DoaError
from .estimators import Method, estimate


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()] if text.strip() else []


def build_parser():
    parser = argparse.ArgumentParser(prog="subdoa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one seeded trial, print the estimate")
    p.add_argument("--n", type=int, default=128, help="antennas N")
    p.add_argument("--k", type=int, default=4, help="subarrays K")
    p.add_argument("--n0", type=int, default=None, help="initial subarray size N0 (default M)")
    p.add_argument("--theta-deg", type=float, required=True)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--l", type=int, default=1, help="snapshots L")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.PSCC.value)
    p.add_argument("--source", choices=["gaussian", "unit-modulus"], default="unit-modulus")
    p.add_argument("--noiseless", action="store_true")

    p = sub.add_parser("sweep", help="Monte-Carlo RMSE sweep from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="summary CSV path ('-' for stdout)")
    p.add_argument("--trials-out", help="per-trial CSV path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, help="override master_seed")
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--timing", action="store_true", help="record wall-clock time per estimate")
    p.add_argument("--paper-scale", action="store_true", help="use N=1024, M=N0=256")

    p = sub.add_parser("complexity", help="analytic FLOP counts over an N grid")
    p.add_argument("--n-grid", type=_int_list, default=[32, 64, 128, 256, 512, 1024])
    p.add_argument("--m", type=int, default=64, help="M = N0")
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--beta", type=int, default=5)
    p.add_argument("--out", default="-")

    p = sub.add_parser("crlb", help="coherent-combiner CRLB")
    p.add_argument("--m", type=int, required=True, help="elements per subarray")
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--theta-deg", type=float, default=0.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--spacing", type=float, default=0.5)
    p.add_argument("--wavelength", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; unused")
    return parser


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _simulate(args):
    cfg = ArrayConfig(args.n, args.k, n_init=args.n0)
    Y = synthesize(cfg, math.radians(args.theta_deg), args.snr_db, args.l, args.seed,
                   noiseless=args.noiseless, source=args.source)
    est = estimate(Y, args.method)
    print(f"method={est.method.value} estimate_deg={est.theta_deg:.10f} "
          f"error_deg={est.theta_deg - args.theta_deg:.3e}"
          + (f" iterations_pi={est.iterations_pi} iterations_sca={est.iterations_sca}"
             if est.iterations_sca is not None else ""))


def _sweep(args):
    spec = bench.load_spec(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.noiseless:
        overrides["noiseless"] = True
    if args.timing:
        overrides["record_timing"] = True
    if overrides:
        spec = replace(spec, **overrides)
    if args.paper_scale:
        spec = bench.paper_scale(spec)
    records, summary = bench.run_sweep(spec, workers=args.workers)
    _write(args.out, bench.summary_csv(summary))
    if args.trials_out:
        _write(args.trials_out, bench.trials_csv(records))


def _complexity(args):
    _write(args.out, bench.complexity_csv(bench.run_complexity(args.n_grid, args.m, args.l,
                                                               args.beta)))


def _crlb(args):
    var = crlb_psac(CrlbInputs(args.m, args.l, 10 ** (args.snr_db / 10),
                               math.radians(args.theta_deg), args.spacing, args.wavelength,
                               args.k))
    print(f"variance_rad2={var:.6e} std_rad={math.sqrt(var):.6e} "
          f"std_deg={math.degrees(math.sqrt(var)):.6f}")


COMMANDS = {"simulate": _simulate, "sweep": _sweep, "complexity": _complexity, "crlb": _crlb}


def cli_main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (DoaError, ValueError, OSError, ArithmeticError) as err:
        print(f"subdoa {args.command}: error: {err}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
