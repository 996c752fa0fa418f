"""Command-line interface.

Subcommands: simulate, density, zone, gumbel, scatter, betasweep, verify.
Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, exactk3, experiments, zones
from .dist import parse_dist_spec
from .errors import IrvsimError
from .experiments import ExperimentConfig, RunManifest, write_csv
from .tabulate import Rule

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAIL = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="irvsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="winner-position histograms per rule and k")
    _add_common(p)
    p.add_argument("--rule", choices=("plurality", "irv", "both"), default="both")
    p.add_argument("--k", type=int, nargs="+", default=[3])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--dist", default="uniform")

    p = sub.add_parser("density", help="exact k=3 winner densities on a grid")
    _add_common(p)
    p.add_argument("--rule", choices=("plurality", "irv"), default="irv")
    p.add_argument("--points", type=int, default=1001)

    p = sub.add_parser("zone", help="exclusion zone for a voter distribution")
    _add_common(p)
    p.add_argument("--dist", default="uniform")
    p.add_argument(
        "--numeric", action="store_true", help="numeric search instead of closed form"
    )

    p = sub.add_parser("gumbel", help="asymptotic-law experiments")
    _add_common(p)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--mode", choices=("share", "maxgap", "circle"), default="share")

    p = sub.add_parser("scatter", help="plurality vs IRV winners on shared draws")
    _add_common(p)
    p.add_argument("--k", type=int, nargs="+", default=[3])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--dist", default="uniform")

    p = sub.add_parser("betasweep", help="Beta(alpha, alpha) sweep with zone bounds")
    _add_common(p)
    p.add_argument("--alpha", type=float, nargs="+", required=True)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--trials", type=int, default=100_000)

    p = sub.add_parser("verify", help="run the full verification suite")
    _add_common(p)

    return parser


def _rules(name: str):
    if name == "both":
        return (Rule.PLURALITY, Rule.IRV)
    return (Rule(name),)


def _emit(payload: dict, fmt: str):
    print(json.dumps(payload, indent=2, default=str))


def _cmd_simulate(args) -> int:
    cfg = ExperimentConfig(
        rules=_rules(args.rule),
        dist_spec=args.dist,
        ks=tuple(args.k),
        trials=args.trials,
        master_seed=args.seed,
        out_dir=args.out,
        fmt=args.format,
        threads=args.threads,
    )
    result = experiments.run_winner_histograms(cfg)
    _emit(result["summaries"], args.format)
    return EXIT_OK


def _cmd_density(args) -> int:
    dens = (
        exactk3.plurality_density_k3()
        if args.rule == "plurality"
        else exactk3.irv_density_k3()
    )
    grid = np.linspace(0.0, 1.0, args.points)
    values = dens(grid)
    if args.out is not None:
        path = Path(args.out) / f"exact_density_{args.rule}_k3.csv"
        write_csv(path, ["x", "density"], zip(grid, values))
        RunManifest({"rule": args.rule, "points": args.points}).write(path)
        print(str(path))
    else:
        _emit({"x": grid.tolist(), "density": values.tolist()}, args.format)
    return EXIT_OK


def _cmd_zone(args) -> int:
    d = parse_dist_spec(args.dist)
    zone = zones.min_zone_numeric(d) if args.numeric else zones.zone_closed_form(d)
    _emit(zone.to_json(), args.format)
    return EXIT_OK


def _cmd_gumbel(args) -> int:
    rng = experiments.chunk_rng(args.seed, f"cli/gumbel/{args.mode}", 0)
    if args.mode == "circle":
        rate = asymptotics.circle_coupling_experiment(args.k, args.trials, rng)
        _emit({"k": args.k, "trials": args.trials, "disagreement_rate": rate}, args.format)
        return EXIT_OK
    if args.mode == "share":
        res = asymptotics.winning_share_experiment(args.k, args.trials, rng)
    else:
        res = asymptotics.max_gap_experiment(args.k, args.trials, rng)
    if args.out is not None:
        path = Path(args.out) / f"gumbel_{args.mode}_k{args.k}.csv"
        write_csv(path, ["trial", "statistic"], enumerate(res.statistics))
        RunManifest({"mode": args.mode, "k": args.k, "seed": args.seed},
                    summaries=res.summary()).write(path)
    _emit(res.summary(), args.format)
    return EXIT_OK


def _cmd_scatter(args) -> int:
    cfg = ExperimentConfig(
        dist_spec=args.dist,
        ks=tuple(args.k),
        trials=args.trials,
        master_seed=args.seed,
        out_dir=args.out,
        fmt=args.format,
        threads=args.threads,
    )
    result = experiments.run_scatter(cfg)
    _emit(result["summaries"], args.format)
    return EXIT_OK


def _cmd_betasweep(args) -> int:
    cfg = ExperimentConfig(
        alphas=tuple(args.alpha),
        ks=(args.k,),
        trials=args.trials,
        master_seed=args.seed,
        out_dir=args.out,
        fmt=args.format,
        threads=args.threads,
    )
    result = experiments.run_beta_sweep(cfg)
    _emit(result["summaries"], args.format)
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = ExperimentConfig(
        master_seed=args.seed,
        out_dir=args.out,
        fmt=args.format,
        threads=args.threads,
    )
    report = experiments.run_verify(cfg)
    _emit(report, args.format)
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAIL


_COMMANDS = {
    "simulate": _cmd_simulate,
    "density": _cmd_density,
    "zone": _cmd_zone,
    "gumbel": _cmd_gumbel,
    "scatter": _cmd_scatter,
    "betasweep": _cmd_betasweep,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](args)
    except IrvsimError as exc:
        print(f"irvsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
