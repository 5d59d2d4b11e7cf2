"""Batch-scan summary figures rendered to files next to the report stream."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .engine import ScanReport, VerdictLabel
from .urls import FindingKind

# Above this corpus size the per-message chart stops being readable.
_PER_MESSAGE_LIMIT = 40


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _verdict_figure(reports: list[ScanReport], outdir: Path) -> Path:
    safe = sum(1 for r in reports if r.verdict.label is VerdictLabel.SAFE)
    phishing = len(reports) - safe
    fig, ax = plt.subplots(figsize=(4, 3))
    ax.bar(["safe", "phishing\nsuspected"], [safe, phishing], color=["#2e7d32", "#c62828"])
    ax.set_ylabel("messages")
    ax.set_title(f"Verdicts ({len(reports)} messages)")
    ax.yaxis.get_major_locator().set_params(integer=True)
    return _save(fig, outdir / "verdicts.png")


def _finding_kinds_figure(reports: list[ScanReport], outdir: Path) -> Path:
    counts = {kind: 0 for kind in FindingKind}
    for report in reports:
        for finding in report.findings:
            counts[finding.kind] += 1
    labels = [kind.value.replace("_", "\n") for kind in counts]
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.bar(labels, list(counts.values()), color="#455a64")
    ax.set_ylabel("findings")
    ax.set_title("Findings by kind")
    ax.yaxis.get_major_locator().set_params(integer=True)
    return _save(fig, outdir / "finding_kinds.png")


def _per_message_figure(reports: list[ScanReport], outdir: Path) -> Path:
    labels = [Path(r.message_label).name or f"message {i}" for i, r in enumerate(reports)]
    positions = range(len(reports))
    width = 0.28
    fig, ax = plt.subplots(figsize=(max(5, 0.5 * len(reports) + 2), 3.4))
    ax.bar([p - width for p in positions], [r.features.visible_links for r in reports],
           width=width, label="visible_links", color="#546e7a")
    ax.bar(list(positions), [r.features.invisible_links for r in reports],
           width=width, label="invisible_links", color="#ef6c00")
    ax.bar([p + width for p in positions], [r.features.unmatching_urls for r in reports],
           width=width, label="unmatching_urls", color="#c62828")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("count")
    ax.set_title("Link features per message")
    ax.legend(fontsize=7)
    ax.yaxis.get_major_locator().set_params(integer=True)
    return _save(fig, outdir / "message_features.png")


def render_scan_figures(reports: list[ScanReport], outdir: Path) -> list[Path]:
    """Write summary charts for a batch of reports; returns the files written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [
        _verdict_figure(reports, outdir),
        _finding_kinds_figure(reports, outdir),
    ]
    if 0 < len(reports) <= _PER_MESSAGE_LIMIT:
        written.append(_per_message_figure(reports, outdir))
    return written
