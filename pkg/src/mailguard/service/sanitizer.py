"""Rewriting hostile email HTML so a browser can display it safely.

The output carries four guarantees: no script elements, no event-handler
attributes, no javascript: hrefs, and no loads from remote origins.
Anchors never navigate on their own (the href moves to a data attribute)
and every verdict-affecting finding gets a visible warning marker wrapped
around its anchor.
"""

from __future__ import annotations

import html as html_escape
from dataclasses import dataclass, field

from ..htmlmodel import ElementNode, parse_html
from ..urls import LinkFinding

# Elements whose entire subtree is dangerous or meaningless in a message view.
DROP_WITH_CONTENT = frozenset({
    "script", "style", "iframe", "frame", "frameset", "noframes", "object",
    "embed", "applet", "param", "meta", "link", "base", "basefont", "title",
    "head", "noscript", "template", "svg", "math", "canvas", "audio", "video",
    "source", "track", "input", "button", "select", "option", "optgroup",
    "textarea", "datalist",
})

# Elements kept as-is (with filtered attributes); anything not listed here
# or above is unwrapped: its tag disappears but its content stays visible.
KEEP = frozenset({
    "a", "abbr", "acronym", "address", "area", "article", "aside", "b", "bdi",
    "bdo", "big", "blockquote", "br", "caption", "center", "cite", "code",
    "col", "colgroup", "dd", "del", "dfn", "div", "dl", "dt", "em",
    "figcaption", "figure", "font", "footer", "h1", "h2", "h3", "h4", "h5",
    "h6", "header", "hr", "i", "ins", "kbd", "li", "main", "mark", "nav",
    "ol", "p", "pre", "q", "s", "samp", "section", "small", "span", "strike",
    "strong", "sub", "summary", "sup", "table", "tbody", "td", "tfoot", "th",
    "thead", "tr", "tt", "u", "ul", "var", "wbr",
})

VOID = frozenset({"area", "br", "col", "hr", "wbr"})

# Presentational attributes safe to pass through unchanged.
ALLOWED_ATTRS = frozenset({
    "abbr", "align", "alt", "bgcolor", "border", "cellpadding", "cellspacing",
    "char", "color", "colspan", "dir", "face", "headers", "height", "lang",
    "nowrap", "rowspan", "size", "start", "summary", "title", "valign",
    "width",
})

_DANGEROUS_STYLE_TOKENS = ("url(", "expression(", "@import")
_DROPPED_POSITIONS = ("fixed", "absolute", "sticky")


@dataclass
class SanitizedRendering:
    """Display-safe HTML plus the finding annotations embedded in it."""

    html: str
    annotations: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"html": self.html, "annotations": self.annotations}


def _escape_text(text: str) -> str:
    return html_escape.escape(text, quote=False)


def _escape_attr(value: str) -> str:
    return html_escape.escape(value, quote=True)


def _scrub_style(value: str) -> str:
    kept: list[str] = []
    for declaration in value.split(";"):
        name, sep, prop_value = declaration.partition(":")
        if not sep:
            continue
        name = name.strip().lower()
        prop_value = prop_value.strip()
        lowered = prop_value.lower()
        if not name or not prop_value:
            continue
        if any(token in lowered for token in _DANGEROUS_STYLE_TOKENS):
            continue
        if name == "position" and lowered in _DROPPED_POSITIONS:
            continue
        kept.append(f"{name}: {prop_value}")
    return "; ".join(kept)


def _attr_markup(attrs: list[tuple[str, str]]) -> str:
    return "".join(f' {name}="{_escape_attr(value)}"' for name, value in attrs)


def _clean_attrs(node: ElementNode) -> list[tuple[str, str]]:
    cleaned: list[tuple[str, str]] = []
    for name, value in node.attributes.items():
        if name.startswith("on"):
            continue
        if name == "style":
            scrubbed = _scrub_style(value)
            if scrubbed:
                cleaned.append(("style", scrubbed))
        elif name in ALLOWED_ATTRS:
            cleaned.append((name, value))
        # href/src/class/id and anything else is dropped here; anchors get
        # their href back as an inert data attribute below.
    return cleaned


def _image_placeholder(node: ElementNode) -> str:
    alt = node.attributes.get("alt", "")
    label = f"[image: {_escape_text(alt)}]" if alt else "[image]"
    return f'<span class="mg-blocked-image" title="remote image blocked">{label}</span>'


def _anchor_markup(
    node: ElementNode,
    path: tuple[int, ...],
    kinds: list[str],
) -> tuple[str, str]:
    attrs = _clean_attrs(node)
    attrs.append(("class", "mg-link"))
    attrs.append(("data-mg-href", node.attributes.get("href", "")))
    attrs.append(("data-mg-path", ".".join(map(str, path))))
    if kinds:
        attrs.append(("data-mg-findings", " ".join(kinds)))
    open_markup = f"<{node.tag}{_attr_markup(attrs)}>"
    close_markup = "" if node.tag in VOID else f"</{node.tag}>"
    return open_markup, close_markup


def sanitize(html_part: str, findings: list[LinkFinding] | tuple[LinkFinding, ...] = ()) -> SanitizedRendering:
    """Rewrite one HTML body so it renders inert, with findings marked.

    Total: any text goes in, display-safe HTML comes out. ``findings``
    must belong to this part (match by node_path against the same parse).
    """
    root = parse_html(html_part)
    kinds_by_path: dict[tuple[int, ...], list[str]] = {}
    warn_paths: set[tuple[int, ...]] = set()
    for finding in findings:
        path = tuple(finding.node_path)
        kinds_by_path.setdefault(path, []).append(finding.kind.value)
        if finding.affects_verdict:
            warn_paths.add(path)

    out: list[str] = []
    # Work stack of ("emit", markup) and ("node", child, path) items; a
    # close tag is pushed before the children so it pops after them.
    work: list[tuple] = [
        ("node", child, (i,)) for i, child in reversed(list(enumerate(root.children)))
    ]
    while work:
        action, payload, path = work.pop()
        if action == "emit":
            out.append(payload)
            continue
        if isinstance(payload, str):
            out.append(_escape_text(payload))
            continue
        node: ElementNode = payload
        if node.tag in DROP_WITH_CONTENT:
            continue
        if node.tag == "img":
            out.append(_image_placeholder(node))
            continue
        child_items = [
            ("node", child, path + (i,)) for i, child in enumerate(node.children)
        ]
        if node.tag in KEEP:
            if node.tag in ("a", "area"):
                kinds = kinds_by_path.get(path, [])
                open_markup, close_markup = _anchor_markup(node, path, kinds)
                if path in warn_paths:
                    open_markup = (
                        f'<span class="mg-warning" data-mg-warning="{_escape_attr(" ".join(kinds))}">'
                        + open_markup
                    )
                    close_markup += "</span>"
            else:
                open_markup = f"<{node.tag}{_attr_markup(_clean_attrs(node))}>"
                close_markup = "" if node.tag in VOID else f"</{node.tag}>"
            out.append(open_markup)
            if close_markup:
                work.append(("emit", close_markup, ()))
        work.extend(reversed(child_items))

    annotations = [
        {
            "node_path": list(finding.node_path),
            "kind": finding.kind.value,
            "part_index": finding.part_index,
        }
        for finding in findings
    ]
    return SanitizedRendering(html="".join(out), annotations=annotations)
