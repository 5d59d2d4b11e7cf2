"""Lenient HTML parsing into an element tree, plus hyperlink extraction.

Email bodies are routinely malformed, so the parser never fails: unclosed
tags are closed when their parent ends, unknown tags become generic
elements, and broken attribute syntax is dropped. Script and style bodies
are kept as opaque text and never interpreted as markup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from .visibility import RgbColor

# Elements that never take content (so they are never pushed on the open stack).
VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

ROOT_TAG = "#document"

# Guard against absurdly nested input; deeper start tags become siblings.
_MAX_TREE_DEPTH = 400


@dataclass(eq=False)
class ElementNode:
    """One element in the parsed tree.

    ``children`` mixes ``ElementNode`` and plain-``str`` text runs.
    Attribute names are lowercase and unique (first occurrence wins).
    """

    tag: str
    attributes: dict[str, str] = field(default_factory=dict)
    children: list["ElementNode | str"] = field(default_factory=list)
    parent: "ElementNode | None" = field(default=None, repr=False)
    index_in_parent: int = field(default=-1, repr=False)

    def append(self, child: "ElementNode | str") -> None:
        if isinstance(child, ElementNode):
            child.parent = self
            child.index_in_parent = len(self.children)
        self.children.append(child)

    def node_path(self) -> list[int]:
        """Child indices from the root down to this element."""
        path: list[int] = []
        node = self
        while node.parent is not None:
            path.append(node.index_in_parent)
            node = node.parent
        path.reverse()
        return path

    def ancestors_and_self(self) -> Iterator["ElementNode"]:
        node: ElementNode | None = self
        while node is not None:
            yield node
            node = node.parent


@dataclass(frozen=True)
class LinkRecord:
    """A hyperlink with the context needed for visibility and URL checks."""

    href: str
    anchor_text: str
    foreground: "RgbColor"
    background: "RgbColor"
    source_part_index: int
    node_path: tuple[int, ...]


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = ElementNode(tag=ROOT_TAG)
        self._stack: list[ElementNode] = [self.root]

    def _make_element(self, tag: str, attrs: list[tuple[str, str | None]]) -> ElementNode:
        attributes: dict[str, str] = {}
        for name, value in attrs:
            if not name:
                continue
            attributes.setdefault(name.lower(), value if value is not None else "")
        node = ElementNode(tag=tag.lower(), attributes=attributes)
        self._stack[-1].append(node)
        return node

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        node = self._make_element(tag, attrs)
        if tag.lower() not in VOID_TAGS and len(self._stack) < _MAX_TREE_DEPTH:
            self._stack.append(node)

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self._make_element(tag, attrs)

    def handle_endtag(self, tag: str) -> None:
        tag = tag.lower()
        # Close up to the matching open element; a stray end tag is ignored.
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return

    def handle_data(self, data: str) -> None:
        if data:
            self._stack[-1].append(data)


def parse_html(document: str) -> ElementNode:
    """Parse ``document`` leniently into an element tree. Never raises."""
    builder = _TreeBuilder()
    try:
        builder.feed(document)
        builder.close()
    except Exception:
        # html.parser is tolerant by design; if it still trips on hostile
        # input we keep whatever partial tree was built.
        pass
    return builder.root


def iter_elements(root: ElementNode) -> Iterator[ElementNode]:
    """All elements below ``root`` in document (preorder) order."""
    stack: list[ElementNode] = [root]
    while stack:
        node = stack.pop()
        if node is not root:
            yield node
        stack.extend(
            child for child in reversed(node.children) if isinstance(child, ElementNode)
        )


def node_at_path(root: ElementNode, path: tuple[int, ...] | list[int]) -> ElementNode | None:
    """Resolve a node_path back to its element; None if the path is stale."""
    node: ElementNode | str = root
    for index in path:
        if not isinstance(node, ElementNode) or not 0 <= index < len(node.children):
            return None
        node = node.children[index]
    return node if isinstance(node, ElementNode) else None


def anchor_text(anchor: ElementNode) -> str:
    """Whitespace-collapsed text a reader sees inside an anchor.

    Descendant text runs are concatenated in document order; images
    contribute their ``alt`` text at their position.
    """
    parts: list[str] = []
    stack: list[ElementNode | str] = list(reversed(anchor.children))
    while stack:
        child = stack.pop()
        if isinstance(child, str):
            parts.append(child)
            continue
        if child.tag == "img":
            parts.append(child.attributes.get("alt", ""))
        stack.extend(reversed(child.children))
    return " ".join("".join(parts).split())


def extract_links(root: ElementNode, resolver, part_index: int) -> list[LinkRecord]:
    """One LinkRecord per ``a``/``area`` element with a non-empty href.

    Records come back in document order; ``resolver`` (see
    :mod:`mailguard.visibility`) supplies the effective colors at each
    anchor. Named anchors without an href are not links.
    """
    records: list[LinkRecord] = []
    for node in iter_elements(root):
        if node.tag not in ("a", "area"):
            continue
        href = node.attributes.get("href", "")
        if href == "":
            continue
        foreground, background = resolver.resolve(node)
        records.append(
            LinkRecord(
                href=href,
                anchor_text=anchor_text(node),
                foreground=foreground,
                background=background,
                source_part_index=part_index,
                node_path=tuple(node.node_path()),
            )
        )
    return records
