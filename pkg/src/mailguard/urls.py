"""URL parsing/normalization and the per-link findings it supports.

The mismatch decision compares where a link *says* it goes (anchor text
that is itself a URL) with where it *actually* goes (the href), by
normalized host and port. Anything that is not a URL on both sides can
never mismatch.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from urllib.parse import urlsplit

from .htmlmodel import LinkRecord

SCHEME_DEFAULT_PORTS = {"http": 80, "https": 443}

DEFAULT_LONG_HYPERLINK_LIMIT = 250

_SCHEME_PREFIX = re.compile(r"([A-Za-z][A-Za-z0-9+.\-]*)://")
_SCHEME_ONLY = re.compile(r"([A-Za-z][A-Za-z0-9+.\-]*):")
_HOST_LABEL = r"[a-z0-9](?:[a-z0-9\-]*[a-z0-9])?"
_HOST_SHAPE = re.compile(rf"{_HOST_LABEL}(?:\.{_HOST_LABEL})+\Z")
_DOTTED_QUAD = re.compile(r"(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})\Z")


class FindingKind(str, Enum):
    UNMATCHING_URL = "unmatching_url"
    INVISIBLE_LINK = "invisible_link"
    IP_LITERAL_HOST = "ip_literal_host"
    LONG_HYPERLINK = "long_hyperlink"
    HIDDEN_BY_CSS = "hidden_by_css"


# Only these two drive the verdict; the rest are informational flags.
VERDICT_KINDS = frozenset({FindingKind.UNMATCHING_URL, FindingKind.INVISIBLE_LINK})


@dataclass(frozen=True)
class LinkFinding:
    """One observation about one hyperlink in one body part."""

    kind: FindingKind
    href: str
    anchor_text: str
    detail: str
    node_path: tuple[int, ...]
    part_index: int
    affects_verdict: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "affects_verdict", self.kind in VERDICT_KINDS)


@dataclass(frozen=True)
class ParsedUrl:
    """A normalized http(s) URL: lowercase scheme/host, trailing dot stripped."""

    scheme: str
    host: str
    port: int | None
    path: str
    query: str | None
    is_ip_literal: bool

    def unparse(self) -> str:
        out = f"{self.scheme}://{self.host}"
        if self.port is not None:
            out += f":{self.port}"
        out += self.path
        if self.query is not None:
            out += f"?{self.query}"
        return out


def _is_dotted_quad(host: str) -> bool:
    m = _DOTTED_QUAD.fullmatch(host)
    return bool(m) and all(int(octet) <= 255 for octet in m.groups())


def _plausible_host(host: str) -> bool:
    if _is_dotted_quad(host):
        return True
    if not _HOST_SHAPE.fullmatch(host):
        return False
    # Require a TLD-shaped final label so prose like "e.g." stays prose.
    last_label = host.rsplit(".", 1)[1]
    return len(last_label) >= 2 and not last_label.isdigit()


def parse_url(raw: str) -> ParsedUrl | None:
    """Parse an absolute http(s) URL, or None for anything else.

    A scheme-less string that starts with a plausible hostname is read as
    if prefixed with ``http://`` (so anchor text like
    ``www.bank.example/login`` counts as a URL). Percent-encoding is kept
    intact; the host is lowercased and a single trailing dot removed.
    """
    s = raw.strip()
    if not s or any(ch.isspace() for ch in s):
        return None

    m = _SCHEME_PREFIX.match(s)
    implied = False
    if m:
        scheme = m.group(1).lower()
        if scheme not in SCHEME_DEFAULT_PORTS:
            return None
        rest = s[m.end():]
    else:
        m = _SCHEME_ONLY.match(s)
        if m and "." not in m.group(1):
            # mailto:, javascript:, tel:, ... -- a scheme, but not a link
            # target we compare. (A dot means host:port, e.g. "a.com:8080".)
            return None
        scheme = "http"
        rest = s
        implied = True

    try:
        parts = urlsplit(f"{scheme}://{rest}")
        host = parts.hostname
        port = parts.port
    except ValueError:
        return None
    if not host:
        return None
    if ":" in host:
        # IPv6 bracket literal; only dotted-quad IP hosts are modeled.
        return None
    if host.endswith("."):
        host = host[:-1]
        if not host:
            return None
    if implied:
        if "@" in parts.netloc:
            return None
        if not _plausible_host(host):
            return None
    return ParsedUrl(
        scheme=scheme,
        host=host,
        port=port,
        path=parts.path,
        query=parts.query or None,
        is_ip_literal=_is_dotted_quad(host),
    )


def looks_like_ipv6_literal(raw: str) -> bool:
    """True for bracket-literal hosts, which parse_url deliberately rejects."""
    s = raw.strip()
    m = _SCHEME_PREFIX.match(s)
    if m:
        s = s[m.end():]
    return s.startswith("[")


def _ports_match(a: ParsedUrl, b: ParsedUrl) -> bool:
    # Two default ports always agree, even across schemes; an explicit
    # port must equal the other side's effective port.
    if a.port is None and b.port is None:
        return True
    port_a = a.port if a.port is not None else SCHEME_DEFAULT_PORTS[a.scheme]
    port_b = b.port if b.port is not None else SCHEME_DEFAULT_PORTS[b.scheme]
    return port_a == port_b


def is_unmatching(link: LinkRecord) -> bool:
    """True iff the anchor text is a URL whose destination differs from the href.

    Plain-word anchor text never mismatches; equality is judged on host
    (case-insensitive) plus port, never on scheme or path.
    """
    visible = parse_url(link.anchor_text)
    if visible is None:
        return False
    actual = parse_url(link.href)
    if actual is None:
        return False
    if visible.host != actual.host:
        return True
    return not _ports_match(visible, actual)


def is_ip_literal_host(url: ParsedUrl) -> bool:
    """True iff the host is a dotted-quad IPv4 literal."""
    return url.is_ip_literal


def is_long_hyperlink(href: str, limit: int = DEFAULT_LONG_HYPERLINK_LIMIT) -> bool:
    """True iff the href is longer than ``limit`` characters."""
    if limit <= 0:
        raise ValueError("limit must be positive")
    return len(href) > limit
