from pathlib import Path

import pytest

from mailguard.htmlmodel import iter_elements, parse_html

FIXTURES = Path(__file__).parent / "fixtures"

PHISHING_FIXTURES = sorted(FIXTURES.glob("phish_*.eml"))
BENIGN_FIXTURES = sorted(FIXTURES.glob("benign_*.eml"))

# Attributes that would trigger a network fetch if they carried a remote URL.
_LOADING_ATTRS = ("src", "srcset", "lowsrc", "background", "poster", "data", "action", "formaction")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def load_fixture(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def sanitizer_ban_violations(html_text: str) -> list[str]:
    """Re-parse sanitizer output and list violations of the four bans.

    Bans: script elements; event-handler attributes; javascript: hrefs;
    remote resource loads (img/src, link/href, and any other fetching
    attribute or style url()).
    """
    violations: list[str] = []
    root = parse_html(html_text)
    for node in iter_elements(root):
        if node.tag == "script":
            violations.append("script element present")
        if node.tag == "link" and node.attributes.get("href"):
            violations.append("link element with href")
        for name, value in node.attributes.items():
            compact = "".join(value.split()).lower()
            if name.startswith("on"):
                violations.append(f"event handler attribute {name!r} on <{node.tag}>")
            if name == "href" and compact.startswith("javascript:"):
                violations.append(f"javascript: href on <{node.tag}>")
            if name in _LOADING_ATTRS and compact.startswith(("http:", "https:", "//")):
                violations.append(f"remote load via <{node.tag} {name}>")
            if name == "style" and "url(" in compact:
                violations.append(f"style url() on <{node.tag}>")
    return violations
