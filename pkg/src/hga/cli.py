"""Command-line front end for the experiment harness.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import ConfigError, load_history_csv, parse_config, run_experiment
from .plotting import Series, emit_plot

SUBCOMMANDS = {
    "soft-tsp": "soft_tsp",
    "adaptive-tsp": "adaptive_tsp",
    "switch": "constraint_switch",
    "regress": "regression",
    "regress-weighted": "weighted_regression",
    "oracle": "oracle",
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the harness reserves 2 for
    runtime failures, so remap usage problems to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hga", description="hierarchical GA experiment harness")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for command, experiment in SUBCOMMANDS.items():
        sp = subs.add_parser(command, help=f"run the {experiment} experiment")
        sp.add_argument("--config", metavar="PATH", help="JSON config file")
        group = sp.add_mutually_exclusive_group()
        group.add_argument("--seed", type=int, metavar="N", help="single solver seed")
        group.add_argument("--seeds", metavar="N,N,...", help="comma-separated solver seeds")
        sp.add_argument("--out", metavar="DIR", help="output directory")
        sp.add_argument(
            "--generations", type=int, metavar="N", help="sub-solver generations per meta generation"
        )
        sp.add_argument("--meta-generations", type=int, metavar="N")
        sp.add_argument(
            "--set",
            action="append",
            default=[],
            dest="sets",
            metavar="KEY=VALUE",
            help="override any config key (dotted paths reach GA fields, "
            "e.g. meta.mutation_rate=0.9); repeatable",
        )

    sp = subs.add_parser("plot", help="plot run CSVs as an SVG learning curve")
    sp.add_argument("csv", nargs="+", help="run CSV files")
    sp.add_argument("--out", required=True, metavar="FILE", help="output SVG path")
    sp.add_argument("--baseline", type=float, metavar="COST", help="dashed horizontal rule")
    sp.add_argument("--title", default="", metavar="TEXT")
    return parser


def _parse_seed_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"seeds: expected comma-separated integers, got {text!r}") from exc


def _parse_set(item: str) -> tuple[str, object]:
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings like percentile kinds
    return key, value


def _cmd_plot(args) -> int:
    series = []
    for path in args.csv:
        history = load_history_csv(path)
        series.append(
            Series(Path(path).stem, history.column("generation"), history.column("best_cost"))
        )
    out = emit_plot(series, args.out, baseline=args.baseline, title=args.title)
    print(out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "plot":
        try:
            return _cmd_plot(args)
        except Exception as exc:  # malformed CSV, unwritable path, ...
            print(f"hga: error: {exc}", file=sys.stderr)
            return 2

    try:
        overrides: list[tuple[str, object]] = []
        if args.out is not None:
            overrides.append(("output_dir", args.out))
        if args.seed is not None:
            overrides.append(("seeds", (args.seed,)))
        if args.seeds is not None:
            overrides.append(("seeds", _parse_seed_list(args.seeds)))
        if args.generations is not None:
            overrides.append(("k_subgens", args.generations))
        if args.meta_generations is not None:
            overrides.append(("meta_generations", args.meta_generations))
        for item in args.sets:
            overrides.append(_parse_set(item))
        cfg = parse_config(SUBCOMMANDS[args.command], args.config, overrides)
    except ConfigError as exc:
        print(f"hga: config error: {exc}", file=sys.stderr)
        return 1

    try:
        files = run_experiment(cfg)
    except Exception as exc:
        print(f"hga: error: {exc}", file=sys.stderr)
        return 2
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
