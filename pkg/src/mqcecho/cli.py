"""Command-line front end for the named experiment jobs.

Usage:
    mqc-echo <job> [--config FILE] [--set key=value ...]
                   [--out DIR] [--seed U64] [--workers N]
    mqc-echo list

<job> is either a job kind (ground-spectrum, fotoc-curve, echo,
pseudo-echo, laa-ramp, derivative-scan, scaling-fit, disorder-sweep) or a
named catalog recipe from `mqc-echo list`.  Precedence, lowest to highest:
built-in defaults, catalog preset, --config file, --set overrides, then
the dedicated --out/--seed/--workers flags.

Exit status: 0 on success, 2 on a configuration error (the message names
the offending field path), 3 when the memory budget refuses the run.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import ResourceLimitError
from .jobs import (
    JobKind,
    UsageError,
    apply_assignment,
    catalog_entry,
    config_from_dict,
    list_jobs,
    merge_overrides,
    run_job,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mqc-echo",
        description="Run coherence-spectrum and echo jobs with file outputs.",
    )
    parser.add_argument("job", help="job kind, catalog name, or 'list'")
    parser.add_argument("--config", metavar="FILE",
                        help="JSON job configuration file")
    parser.add_argument("--set", metavar="KEY=VALUE", action="append",
                        default=[], dest="assignments",
                        help="override one config field (dotted path)")
    parser.add_argument("--out", metavar="DIR",
                        help="output directory (overrides output.directory)")
    parser.add_argument("--seed", type=int, metavar="U64",
                        help="base RNG seed")
    parser.add_argument("--workers", type=int, metavar="N",
                        help="worker threads (0 picks the core count)")
    return parser


def _print_catalog(stream) -> None:
    entries = list_jobs()
    width = max(len(e.name) for e in entries)
    for entry in entries:
        print(f"{entry.name:<{width}}  [{entry.job}, {entry.runtime}]",
              file=stream)
        print(f"{'':<{width}}  {entry.description}", file=stream)


def _resolve_raw_config(args) -> dict:
    entry = catalog_entry(args.job)
    if entry is not None:
        raw = merge_overrides({"job": entry.job}, entry.overrides)
    else:
        try:
            JobKind(args.job)
        except ValueError:
            names = [k.value for k in JobKind] + [e.name for e in list_jobs()]
            raise UsageError(
                f"job: unknown job {args.job!r} (choose from "
                f"{', '.join(names)}, or 'list')"
            )
        raw = {"job": args.job}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise UsageError(f"config: cannot read {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"config: {args.config} is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise UsageError(f"config: {args.config} must hold a JSON object")
        raw = merge_overrides(raw, loaded)
    for expression in args.assignments:
        raw = apply_assignment(raw, expression)
    if args.out is not None:
        raw = merge_overrides(raw, {"output": {"directory": args.out}})
    if args.seed is not None:
        raw = merge_overrides(raw, {"seed": args.seed})
    if args.workers is not None:
        raw = merge_overrides(raw, {"workers": args.workers})
    return raw


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.job == "list":
        _print_catalog(sys.stdout)
        return 0
    try:
        config = config_from_dict(_resolve_raw_config(args))
        result = run_job(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    for path in result.paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
