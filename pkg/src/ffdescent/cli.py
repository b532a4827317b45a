"""Command-line entry point: ``ffdescent run|verify|demo``.

Exit status is 0 only when every case verdict matches its expectation, 1
when some verdict does not, and 2 for unreadable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ffdescent import __version__
from ffdescent.experiments import DEFAULTS, ConfigError, demo_config, load_config_file, run
from ffdescent.serialize import FormatError, verify_witness_file


def _emit(report, output: dict, csv_path: str | None) -> None:
    csv_path = csv_path or output.get("csv")
    if csv_path:
        text = report.to_csv() + f"# wall-clock {report.seconds:.3f} s\n"
        Path(csv_path).write_text(text)
    table_path = output.get("table")
    if table_path:
        Path(table_path).write_text(report.to_table() + "\n")
    print(report.to_table())


def cmd_run(args) -> int:
    try:
        cfg = load_config_file(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run(cfg)
    _emit(report, cfg["_output"], args.csv)
    return 0 if report.all_match else 1


def cmd_demo(args) -> int:
    report = run(demo_config(args.experiment))
    _emit(report, {}, args.csv)
    return 0 if report.all_match else 1


def cmd_verify(args) -> int:
    try:
        check = verify_witness_file(args.witness)
    except (FormatError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if check.ok:
        print(f"{args.witness}: ok")
        return 0
    for problem in check.problems:
        print(f"{args.witness}: {problem}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffdescent")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the experiment described by a YAML scenario")
    p.add_argument("config")
    p.add_argument("--csv", help="write the CSV report here (overrides output.csv)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="re-check a serialized splitting witness")
    p.add_argument("witness")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="run one standard experiment with default parameters")
    p.add_argument("experiment", choices=sorted(DEFAULTS))
    p.add_argument("--csv")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
