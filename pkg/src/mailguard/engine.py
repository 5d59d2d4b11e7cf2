"""Feature assembly over all body parts and the phishing verdict rule.

A message is suspect exactly when it contains at least one invisible
link or one unmatching URL; the total link count is reported but never
influences the verdict. Features from every MIME part of a message are
summed, so a payload hidden in a second alternative part still counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

from . import __version__
from .htmlmodel import node_at_path, parse_html
from .htmlmodel import extract_links as _extract_links
from .ingest import ParsedEmail, RawMessage, parse_message
from .urls import (
    DEFAULT_LONG_HYPERLINK_LIMIT,
    FindingKind,
    LinkFinding,
    is_long_hyperlink,
    is_unmatching,
    looks_like_ipv6_literal,
    parse_url,
)
from .visibility import (
    StyleResolver,
    VisibilityPolicy,
    color_difference,
    css_hidden_reason,
    is_invisible,
)

ENGINE_VERSION = __version__


class VerdictLabel(str, Enum):
    PHISHING_SUSPECTED = "phishing_suspected"
    SAFE = "safe"


class Advisory(str, Enum):
    DELETE = "delete"
    NONE = "none"


@dataclass(frozen=True)
class LinkFeatures:
    """The feature triple: total, invisible, and unmatching link counts."""

    visible_links: int
    invisible_links: int
    unmatching_urls: int

    def __post_init__(self) -> None:
        if min(self.visible_links, self.invisible_links, self.unmatching_urls) < 0:
            raise ValueError("link counts must be non-negative")
        if self.invisible_links > self.visible_links:
            raise ValueError("invisible_links cannot exceed visible_links")
        if self.unmatching_urls > self.visible_links:
            raise ValueError("unmatching_urls cannot exceed visible_links")


@dataclass(frozen=True)
class Verdict:
    label: VerdictLabel
    advisory: Advisory

    def __post_init__(self) -> None:
        expects_delete = self.label is VerdictLabel.PHISHING_SUSPECTED
        if expects_delete != (self.advisory is Advisory.DELETE):
            raise ValueError("advisory 'delete' goes with (only) a phishing verdict")


@dataclass(frozen=True)
class ScanConfig:
    """Everything a scan depends on besides the message itself."""

    policy: VisibilityPolicy = VisibilityPolicy()
    long_hyperlink_limit: int = DEFAULT_LONG_HYPERLINK_LIMIT
    engine_version: str = ENGINE_VERSION


@dataclass(frozen=True)
class ScanReport:
    """The scan outcome for one message."""

    message_label: str
    features: LinkFeatures
    verdict: Verdict
    findings: tuple[LinkFinding, ...]
    warnings: tuple[str, ...]
    engine_version: str
    scanned_at: datetime

    def __post_init__(self) -> None:
        invisible = sum(1 for f in self.findings if f.kind is FindingKind.INVISIBLE_LINK)
        unmatching = sum(1 for f in self.findings if f.kind is FindingKind.UNMATCHING_URL)
        if invisible != self.features.invisible_links or unmatching != self.features.unmatching_urls:
            raise ValueError("feature counts out of step with findings")
        suspicious = self.features.invisible_links + self.features.unmatching_urls > 0
        if suspicious != (self.verdict.label is VerdictLabel.PHISHING_SUSPECTED):
            raise ValueError("verdict out of step with features")

    def to_dict(self) -> dict:
        return {
            "message_label": self.message_label,
            "verdict": self.verdict.label.value,
            "advisory": self.verdict.advisory.value,
            "features": {
                "visible_links": self.features.visible_links,
                "invisible_links": self.features.invisible_links,
                "unmatching_urls": self.features.unmatching_urls,
            },
            "findings": [
                {
                    "kind": f.kind.value,
                    "href": f.href,
                    "anchor_text": f.anchor_text,
                    "detail": f.detail,
                    "node_path": list(f.node_path),
                    "part_index": f.part_index,
                    "affects_verdict": f.affects_verdict,
                }
                for f in self.findings
            ],
            "warnings": list(self.warnings),
            "engine_version": self.engine_version,
            "scanned_at": self.scanned_at.isoformat(timespec="microseconds").replace("+00:00", "Z"),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ScanReport":
        findings = tuple(
            LinkFinding(
                kind=FindingKind(f["kind"]),
                href=f["href"],
                anchor_text=f["anchor_text"],
                detail=f["detail"],
                node_path=tuple(f["node_path"]),
                part_index=f.get("part_index", 0),
            )
            for f in data["findings"]
        )
        return cls(
            message_label=data["message_label"],
            features=LinkFeatures(**data["features"]),
            verdict=Verdict(VerdictLabel(data["verdict"]), Advisory(data["advisory"])),
            findings=findings,
            warnings=tuple(data["warnings"]),
            engine_version=data["engine_version"],
            scanned_at=datetime.fromisoformat(data["scanned_at"].replace("Z", "+00:00")),
        )


def extract_features(
    message: ParsedEmail,
    policy: VisibilityPolicy | None = None,
    long_hyperlink_limit: int = DEFAULT_LONG_HYPERLINK_LIMIT,
    warnings: list[str] | None = None,
) -> tuple[LinkFeatures, list[LinkFinding]]:
    """Evaluate every link in every HTML part of one message.

    Returns the summed feature triple plus one finding per observation;
    plain-text parts contribute nothing. Oddities that produce no finding
    (IPv6 bracket hosts, which are not modeled) are appended to
    ``warnings`` when a list is supplied.
    """
    policy = policy or VisibilityPolicy()
    resolver = StyleResolver(policy)
    visible = 0
    findings: list[LinkFinding] = []
    for part_index, document in enumerate(message.html_parts):
        root = parse_html(document)
        links = _extract_links(root, resolver, part_index)
        visible += len(links)
        for link in links:
            common = {
                "href": link.href,
                "anchor_text": link.anchor_text,
                "node_path": link.node_path,
                "part_index": part_index,
            }
            if is_invisible(link, policy):
                difference = color_difference(link.foreground, link.background)
                findings.append(LinkFinding(
                    kind=FindingKind.INVISIBLE_LINK,
                    detail=(
                        f"color difference {difference} is below {policy.threshold} "
                        f"(text {link.foreground.css()} on {link.background.css()})"
                    ),
                    **common,
                ))
            if is_unmatching(link):
                shown = parse_url(link.anchor_text)
                actual = parse_url(link.href)
                assert shown is not None and actual is not None
                findings.append(LinkFinding(
                    kind=FindingKind.UNMATCHING_URL,
                    detail=f"anchor text shows {shown.unparse()} but the link goes to {actual.unparse()}",
                    **common,
                ))
            target = parse_url(link.href)
            if target is None and warnings is not None and looks_like_ipv6_literal(link.href):
                warnings.append(
                    f"part {part_index}: href with IPv6 literal host not analyzed: {link.href[:80]}"
                )
            if target is not None and target.is_ip_literal:
                findings.append(LinkFinding(
                    kind=FindingKind.IP_LITERAL_HOST,
                    detail=f"link host is the raw IP address {target.host}",
                    **common,
                ))
            if is_long_hyperlink(link.href, long_hyperlink_limit):
                findings.append(LinkFinding(
                    kind=FindingKind.LONG_HYPERLINK,
                    detail=f"href is {len(link.href)} characters (limit {long_hyperlink_limit})",
                    **common,
                ))
            anchor = node_at_path(root, link.node_path)
            hidden = css_hidden_reason(anchor) if anchor is not None else None
            if hidden is not None:
                findings.append(LinkFinding(
                    kind=FindingKind.HIDDEN_BY_CSS,
                    detail=f"anchor is hidden by {hidden}",
                    **common,
                ))
    invisible = sum(1 for f in findings if f.kind is FindingKind.INVISIBLE_LINK)
    unmatching = sum(1 for f in findings if f.kind is FindingKind.UNMATCHING_URL)
    return LinkFeatures(visible, invisible, unmatching), findings


def classify(features: LinkFeatures) -> Verdict:
    """Suspect phishing (and advise deletion) iff any invisible or unmatching link."""
    if features.invisible_links > 0 or features.unmatching_urls > 0:
        return Verdict(VerdictLabel.PHISHING_SUSPECTED, Advisory.DELETE)
    return Verdict(VerdictLabel.SAFE, Advisory.NONE)


def scan(raw: RawMessage, config: ScanConfig | None = None) -> ScanReport:
    """Run the whole pipeline on one raw message.

    Deterministic apart from the timestamp: identical bytes and config
    always produce the same report.
    """
    config = config or ScanConfig()
    message = parse_message(raw)
    warnings = list(message.parse_warnings)
    features, findings = extract_features(
        message, config.policy, config.long_hyperlink_limit, warnings
    )
    return ScanReport(
        message_label=raw.source_name,
        features=features,
        verdict=classify(features),
        findings=tuple(findings),
        warnings=tuple(warnings),
        engine_version=config.engine_version,
        scanned_at=datetime.now(timezone.utc),
    )
