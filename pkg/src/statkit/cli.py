"""``statkit`` command line: run a configured pipeline, describe a CSV, print the version."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, descriptive
from .config import load_config
from .dataset import BinSpec, Kind, binned_frequency_table, frequency_table, load_csv
from .errors import ConfigError, DataError, NumericError
from .report import fmt, md_table, run

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _describe(path: str, column: str | None) -> list[str]:
    data = load_csv(path)
    lines = [f"# {Path(path).name}", "", f"{data.n} rows", ""]
    lines += md_table(
        ("column", "kind", "present", "missing"),
        [(c.name, c.kind.value, data.n - sum(c.missing), sum(c.missing)) for c in data.columns],
    )
    if column is None:
        return lines
    if column not in data:
        raise DataError(f"no column named {column!r}; columns are {', '.join(data.names)}")
    col = data[column]
    lines += ["", f"## {column}", ""]
    if col.kind is Kind.CONTINUOUS:
        table = binned_frequency_table(col, BinSpec.default_for(col.numeric()))
    else:
        table = frequency_table(col)
    lines += md_table(("value", "n", "N", "f", "F"), [(str(r.key), r.n, r.cum_n, r.f, r.cum_f) for r in table])
    if col.kind.numeric and col.numeric().size >= 2:
        s = descriptive.summarize(col)
        lines += [""] + md_table(
            ("statistic", "value"),
            [("mean", s.mean), ("median", s.median), ("mode", ", ".join(fmt(m) for m in s.modes) or "none"),
             ("sd (sample)", s.sd_sample), ("min", s.min), ("Q1", s.q1), ("Q3", s.q3), ("max", s.max)],
        )
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="statkit", description="Statistical analysis of CSV data with Markdown reports.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the analyses of a config file")
    p_run.add_argument("--config", required=True, help="INI pipeline config")
    p_run.add_argument("--out", help="output directory (overrides [analysis] out)")
    p_desc = sub.add_parser("describe", help="profile a CSV file")
    p_desc.add_argument("csv")
    p_desc.add_argument("--column", help="also tabulate and summarize this column")
    sub.add_parser("version", help="print the version")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "version":
            print(__version__)
        elif args.command == "describe":
            print("\n".join(_describe(args.csv, args.column)))
        else:
            cfg = load_config(args.config)
            if args.out:
                cfg = replace(cfg, out=Path(args.out))
            print(run(cfg))
    except ConfigError as exc:
        print(f"statkit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"statkit: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DataError as exc:
        print(f"statkit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
