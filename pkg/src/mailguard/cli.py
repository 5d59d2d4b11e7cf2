"""Command-line front end: batch scanning plus the inbox service launcher.

``mailguard scan`` walks files or directories of .eml messages and emits
one report per message (human text or JSON Lines), with exit codes meant
for pipelines: 0 all safe, 2 something was flagged, 1 any error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .engine import ScanConfig, ScanReport, VerdictLabel, scan
from .ingest import EmptyInput, RawMessage
from .urls import DEFAULT_LONG_HYPERLINK_LIMIT
from .visibility import DEFAULT_THRESHOLD, VisibilityPolicy, parse_color

EXIT_ALL_SAFE = 0
EXIT_ERROR = 1
EXIT_PHISHING_FOUND = 2

THRESHOLD_ENV_VAR = "MAILGUARD_THRESHOLD"


@dataclass
class CliInvocation:
    """One scan run as requested on the command line."""

    paths: list[str]
    format: str = "text"
    threshold: int = DEFAULT_THRESHOLD
    long_limit: int = DEFAULT_LONG_HYPERLINK_LIMIT
    recursive: bool = False
    figures_dir: str | None = None
    default_foreground: str = "#000000"
    default_background: str = "#FFFFFF"
    out: object = field(default=None, repr=False)  # stdout/stderr overrides for tests
    err: object = field(default=None, repr=False)


def _env_threshold_default() -> int:
    value = os.environ.get(THRESHOLD_ENV_VAR)
    if value is None:
        return DEFAULT_THRESHOLD
    try:
        return int(value)
    except ValueError:
        print(
            f"mailguard: ignoring non-numeric {THRESHOLD_ENV_VAR}={value!r}",
            file=sys.stderr,
        )
        return DEFAULT_THRESHOLD


def _collect_files(paths: list[str], recursive: bool) -> tuple[list[Path], list[str]]:
    files: set[Path] = set()
    errors: list[str] = []
    for raw_path in paths:
        path = Path(raw_path)
        if path.is_file():
            files.add(path)
        elif path.is_dir():
            pattern = "**/*.eml" if recursive else "*.eml"
            files.update(p for p in path.glob(pattern) if p.is_file())
        else:
            errors.append(f"path does not exist: {raw_path}")
    return sorted(files, key=str), errors


def _print_text_report(report: ScanReport, path: Path, out) -> None:
    f = report.features
    verdict = report.verdict.label.value.upper()
    print(
        f"{verdict:<20}{path}  "
        f"(V={f.visible_links} I={f.invisible_links} U={f.unmatching_urls})",
        file=out,
    )
    for finding in report.findings:
        print(f"    [{finding.kind.value}] {finding.href}: {finding.detail}", file=out)


def run_scan_command(invocation: CliInvocation) -> int:
    """Scan every requested message in lexicographic path order."""
    out = invocation.out or sys.stdout
    err = invocation.err or sys.stderr
    if not 0 <= invocation.threshold <= 765:
        print(f"mailguard: threshold {invocation.threshold} outside [0, 765]", file=err)
        return EXIT_ERROR
    if invocation.long_limit <= 0:
        print("mailguard: long-limit must be positive", file=err)
        return EXIT_ERROR
    foreground = parse_color(invocation.default_foreground)
    background = parse_color(invocation.default_background)
    if foreground is None or background is None:
        bad = invocation.default_foreground if foreground is None else invocation.default_background
        print(f"mailguard: unparseable default color {bad!r}", file=err)
        return EXIT_ERROR

    config = ScanConfig(
        policy=VisibilityPolicy(
            threshold=invocation.threshold,
            default_foreground=foreground,
            default_background=background,
        ),
        long_hyperlink_limit=invocation.long_limit,
    )
    files, errors = _collect_files(invocation.paths, invocation.recursive)
    for message in errors:
        print(f"mailguard: {message}", file=err)

    reports: list[ScanReport] = []
    for path in files:
        try:
            raw = RawMessage(path.read_bytes(), str(path))
            report = scan(raw, config)
        except (OSError, EmptyInput) as exc:
            errors.append(str(path))
            print(f"mailguard: {path}: {exc}", file=err)
            continue
        reports.append(report)
        if invocation.format == "json":
            print(report.to_json(), file=out)
        else:
            _print_text_report(report, path, out)

    if invocation.figures_dir is not None:
        from .figures import render_scan_figures  # matplotlib import is slow

        for figure in render_scan_figures(reports, Path(invocation.figures_dir)):
            print(f"mailguard: wrote {figure}", file=err)

    if errors:
        return EXIT_ERROR
    if any(r.verdict.label is VerdictLabel.PHISHING_SUSPECTED for r in reports):
        return EXIT_PHISHING_FOUND
    return EXIT_ALL_SAFE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mailguard",
        description="Scan email messages for invisible and unmatching hyperlinks.",
    )
    parser.add_argument("--version", action="version", version=f"mailguard {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    scan_parser = subparsers.add_parser("scan", help="scan .eml files or directories")
    scan_parser.add_argument("paths", nargs="+", help=".eml files or directories to scan")
    scan_parser.add_argument("--format", choices=("text", "json"), default="text",
                             help="report format (json = one JSON object per line)")
    scan_parser.add_argument("--threshold", type=int, default=_env_threshold_default(),
                             help="color-difference visibility threshold (default 500; "
                                  f"env {THRESHOLD_ENV_VAR} overrides)")
    scan_parser.add_argument("--long-limit", type=int, default=DEFAULT_LONG_HYPERLINK_LIMIT,
                             help="flag hrefs longer than this many characters (default 250)")
    scan_parser.add_argument("--recursive", action="store_true",
                             help="descend into subdirectories")
    scan_parser.add_argument("--figures-dir", metavar="DIR", default=None,
                             help="also render summary charts (PNG) into DIR")
    scan_parser.add_argument("--default-foreground", metavar="COLOR", default="#000000",
                             help="text color assumed when none is declared (default #000000)")
    scan_parser.add_argument("--default-background", metavar="COLOR", default="#FFFFFF",
                             help="background assumed when none is declared (default #FFFFFF)")

    serve_parser = subparsers.add_parser("serve", help="run the inbox HTTP service")
    serve_parser.add_argument("--config", metavar="FILE", default=None,
                              help="JSON config file")
    serve_parser.add_argument("--inbox", metavar="DIR", default=None,
                              help="directory watched for incoming .eml files")
    serve_parser.add_argument("--store", metavar="DIR", default=None,
                              help="directory for persisted messages and reports")
    serve_parser.add_argument("--host", default=None)
    serve_parser.add_argument("--port", type=int, default=None)
    serve_parser.add_argument("--poll-interval", type=float, default=None,
                              help="inbox sweep interval in seconds (default 2)")
    serve_parser.add_argument("--threshold", type=int, default=None)
    serve_parser.add_argument("--long-limit", type=int, default=None)
    serve_parser.add_argument("--static-dir", metavar="DIR", default=None,
                              help="directory with the built viewer UI")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "scan":
        invocation = CliInvocation(
            paths=args.paths,
            format=args.format,
            threshold=args.threshold,
            long_limit=args.long_limit,
            recursive=args.recursive,
            figures_dir=args.figures_dir,
            default_foreground=args.default_foreground,
            default_background=args.default_background,
        )
        return run_scan_command(invocation)
    if args.command == "serve":
        from .service.app import ServiceConfig, run_service

        overrides = {
            "inbox_dir": args.inbox,
            "store_dir": args.store,
            "host": args.host,
            "port": args.port,
            "poll_interval": args.poll_interval,
            "threshold": args.threshold,
            "long_hyperlink_limit": args.long_limit,
            "static_dir": args.static_dir,
        }
        config = ServiceConfig.load(config_file=args.config, overrides=overrides)
        run_service(config)
        return 0
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
