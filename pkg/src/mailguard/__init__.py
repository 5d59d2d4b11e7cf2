"""MailGuard: link-based phishing detection for email messages.

Scans .eml files for hyperlinks that are invisible to the reader
(foreground/background color difference below the W3C visibility
threshold) or whose displayed URL does not match their real target,
and flags such messages as suspected phishing.
"""

__version__ = "0.1.0"

from .engine import ScanConfig, ScanReport, classify, extract_features, scan
from .ingest import EmptyInput, ParsedEmail, RawMessage, parse_message
from .urls import FindingKind, LinkFinding, parse_url
from .visibility import RgbColor, VisibilityPolicy, color_difference, parse_color

__all__ = [
    "EmptyInput",
    "FindingKind",
    "LinkFinding",
    "ParsedEmail",
    "RawMessage",
    "RgbColor",
    "ScanConfig",
    "ScanReport",
    "VisibilityPolicy",
    "classify",
    "color_difference",
    "extract_features",
    "parse_color",
    "parse_message",
    "parse_url",
    "scan",
    "__version__",
]
