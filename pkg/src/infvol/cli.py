"""Command-line driver: ``infvol [--config PATH] [--check NAME ...]``.

Exit status is 0 when every asserting check passes, 1 when any fails and 2
on configuration or usage errors.  Report-only checks never fail a run.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from .checks import CHECK_NAMES, FAIL, PASS, REPORT_ONLY, CheckReport, exit_code, run_suite
from .config import FORMATS, RunConfig, parse_config
from .errors import ConfigError

REPORT_SCHEMA = "infvol-report/1"
SUMMARY_TERMS = 3

_TERM_BOUNDARY = re.compile(r" (?=[+-] )")


def summarize_residual(residual: str, max_terms: int = SUMMARY_TERMS) -> str:
    """Leading ``max_terms`` terms of a rendered residual."""
    if residual == "0":
        return residual
    first = residual.split("; ")[0]
    terms = _TERM_BOUNDARY.split(first)
    text = " ".join(terms[:max_terms])
    if len(terms) > max_terms or first != residual:
        text += " ... (full residual in structured report)"
    return text


def _ordered(reports: Iterable[CheckReport]) -> list[CheckReport]:
    return sorted(reports, key=lambda r: (r.check_name, r.instance.sort_key()))


def render_report(reports: Sequence[CheckReport], fmt: str = "text", timing: bool = True) -> str:
    reports = _ordered(reports)
    if fmt == "structured":
        payload = {
            "schema": REPORT_SCHEMA,
            "reports": [r.to_record(timing=timing) for r in reports],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    header = ("CHECK", "INSTANCE", "STATUS", "RESIDUAL")
    rows = [
        (r.check_name, r.instance.label(), r.status, summarize_residual(r.residual))
        for r in reports
    ]
    widths = [max(len(row[c]) for row in [header, *rows]) for c in range(3)]
    lines = []
    for row in [header, *rows]:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) + "  " + row[3])
    if reports:
        counts = {s: sum(r.status == s for r in reports) for s in (PASS, FAIL, REPORT_ONLY)}
        lines.append("")
        lines.append(
            f"{len(reports)} reports: {counts[PASS]} pass, {counts[FAIL]} fail, "
            f"{counts[REPORT_ONLY]} report-only"
        )
    return "\n".join(line.rstrip() for line in lines) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="infvol",
        description="Verify square-volume identities on infinitesimal simplices.",
    )
    p.add_argument("--config", metavar="PATH", help="YAML run configuration")
    p.add_argument(
        "--check", metavar="NAME", action="append",
        help="run only this check (repeatable; overrides the config)",
    )
    p.add_argument("--seed", type=int, help="use this single seed instead of the configured ones")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=FORMATS, help="report format (default: text)")
    p.add_argument("--list-checks", action="store_true", help="print the check names and exit")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.list_checks:
        print("\n".join(CHECK_NAMES))
        return 0

    try:
        if args.config:
            config = parse_config(Path(args.config).read_text(encoding="utf-8"))
        else:
            config = RunConfig()
        if args.check:
            unknown = [c for c in args.check if c not in CHECK_NAMES]
            if unknown:
                raise ConfigError(
                    f"unknown check {unknown[0]!r}; valid checks: {', '.join(CHECK_NAMES)}"
                )
            config = config.with_overrides(checks=tuple(args.check))
        if args.seed is not None:
            config = config.with_overrides(seeds=(args.seed,))
        if args.out:
            config = config.with_overrides(output_path=args.out)
        if args.format:
            config = config.with_overrides(output_format=args.format)
    except (ConfigError, OSError) as exc:
        print(f"infvol: error: {exc}", file=sys.stderr)
        return 2

    reports = run_suite(config)
    text = render_report(reports, config.output_format)
    if config.output_path:
        write_atomic(config.output_path, text)
    else:
        sys.stdout.write(text)
    failed = [r for r in reports if r.status == FAIL]
    if failed:
        print(f"infvol: {len(failed)} check(s) failed", file=sys.stderr)
    return exit_code(reports)


if __name__ == "__main__":
    raise SystemExit(main())
