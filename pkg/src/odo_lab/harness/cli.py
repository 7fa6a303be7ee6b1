"""``odo-lab <subcommand> [--config PATH] [--set key=value ...]``.

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..game import ContractError, NonConvergenceError
from ..games import MatrixFormatError
from .config import EXPERIMENTS, ConfigError, load_config
from .experiments import RUNNERS, run_gen, summarise_ksweep

log = logging.getLogger("odo_lab")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="odo-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "run the configured algorithms on one game per seed",
        "ksweep": "effective-set size of OSO vs MWU across matrix shapes",
        "race": "self-play exploitability race (ODO, MWU, FP, ...)",
        "exploit": "OSO vs a column-restricted MWU opponent, against a fixed NE baseline",
        "gen": "write a game matrix to CSV (+ .meta sidecar)",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", "-c", help="key = value config file")
        p.add_argument("--set", "-s", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
    return parser


def _report(command: str, result) -> None:
    print(f"metrics: {result.metrics_path}")
    print(f"summary: {result.summary_path}")
    if command == "ksweep":
        for (m, n), k in summarise_ksweep(result.summary).items():
            print(f"m={m:<5d} n={n:<6d} mean k={k:.2f}")
    elif command == "exploit":
        wins = sum(r["oso_wins"] for r in result.summary)
        print(f"OSO beats the fixed NE strategy on {wins}/{len(result.summary)} seeds")
    elif command == "race":
        for r in result.summary:
            print(f"seed={r['seed']:<4d} {r['algorithm']:<14s} steps_to_target={r['steps_to_target'] or '-':<8} "
                  f"final={r['final_exploitability']:.3e}")
    else:
        for r in result.summary:
            print(f"seed={r['seed']:<4d} {r['algorithm']:<14s} t={r['t']:<8d} "
                  f"exploitability={r['exploitability']:.3e} value={r['value']:.6f}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.set, experiment=args.command)
        if args.command == "gen":
            print(run_gen(cfg))
            return EXIT_OK
        result = RUNNERS[args.command](cfg)
    except (ConfigError, MatrixFormatError, ContractError) as exc:
        print(f"odo-lab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"odo-lab: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _report(args.command, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
