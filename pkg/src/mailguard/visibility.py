"""Color parsing, the W3C color-difference rule, and link visibility.

A link whose foreground/background color difference falls below the
good-visibility threshold (500 on a 0..765 scale) is treated as invisible
to the reader. Colors are resolved from inline styles and legacy
presentational attributes only; stylesheet cascading is out of scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .htmlmodel import ElementNode, LinkRecord

DEFAULT_THRESHOLD = 500

# The HTML4 basic palette plus orange; anything else fails to parse and
# falls back to inheritance.
NAMED_COLORS: dict[str, tuple[int, int, int]] = {
    "black": (0, 0, 0),
    "silver": (192, 192, 192),
    "gray": (128, 128, 128),
    "white": (255, 255, 255),
    "maroon": (128, 0, 0),
    "red": (255, 0, 0),
    "purple": (128, 0, 128),
    "fuchsia": (255, 0, 255),
    "green": (0, 128, 0),
    "lime": (0, 255, 0),
    "olive": (128, 128, 0),
    "yellow": (255, 255, 0),
    "navy": (0, 0, 128),
    "blue": (0, 0, 255),
    "teal": (0, 128, 128),
    "aqua": (0, 255, 255),
    "orange": (255, 165, 0),
}

_HEX6 = re.compile(r"#([0-9a-fA-F]{6})\Z")
_HEX3 = re.compile(r"#([0-9a-fA-F]{3})\Z")
_RGB_FN = re.compile(r"rgb\(\s*(\d{1,4})\s*,\s*(\d{1,4})\s*,\s*(\d{1,4})\s*\)\Z", re.IGNORECASE)
_IMPORTANT = re.compile(r"!\s*important\s*\Z", re.IGNORECASE)
_URL_CONSTRUCT = re.compile(r"url\s*\([^)]*\)", re.IGNORECASE)
_COLOR_TOKEN = re.compile(r"#[0-9a-fA-F]+|rgb\s*\([^)]*\)|[a-zA-Z]+")
_NUMBER_PREFIX = re.compile(r"([0-9]*\.?[0-9]+)")


@dataclass(frozen=True)
class RgbColor:
    """An opaque sRGB color with 8-bit channels."""

    r: int
    g: int
    b: int

    def __post_init__(self) -> None:
        for channel in (self.r, self.g, self.b):
            if not 0 <= channel <= 255:
                raise ValueError(f"color channel {channel} outside [0, 255]")

    def css(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"


BLACK = RgbColor(0, 0, 0)
WHITE = RgbColor(255, 255, 255)


@dataclass(frozen=True)
class VisibilityPolicy:
    """Threshold and fallback colors for the invisibility decision.

    The defaults are the universal email-client rendering defaults:
    black text on a white background.
    """

    threshold: int = DEFAULT_THRESHOLD
    default_foreground: RgbColor = BLACK
    default_background: RgbColor = WHITE

    def __post_init__(self) -> None:
        if not 0 <= self.threshold <= 765:
            raise ValueError(f"threshold {self.threshold} outside [0, 765]")


def parse_color(value: str) -> RgbColor | None:
    """Parse ``#RGB``, ``#RRGGBB``, ``rgb(r,g,b)`` or a supported color name.

    Case-insensitive, surrounding whitespace ignored. Returns None for
    anything else (including any alpha syntax), so callers fall back to
    the inherited or default color.
    """
    if not value:
        return None
    v = value.strip()
    m = _HEX6.fullmatch(v)
    if m:
        digits = m.group(1)
        return RgbColor(int(digits[0:2], 16), int(digits[2:4], 16), int(digits[4:6], 16))
    m = _HEX3.fullmatch(v)
    if m:
        digits = m.group(1)
        return RgbColor(*(int(d * 2, 16) for d in digits))
    m = _RGB_FN.fullmatch(v)
    if m:
        # Out-of-range components clamp to 255, as renderers do.
        return RgbColor(*(min(int(c), 255) for c in m.groups()))
    named = NAMED_COLORS.get(v.lower())
    if named:
        return RgbColor(*named)
    return None


def color_difference(a: RgbColor, b: RgbColor) -> int:
    """Sum of per-channel absolute differences, in [0, 765]."""
    return abs(a.r - b.r) + abs(a.g - b.g) + abs(a.b - b.b)


def style_properties(style_value: str) -> dict[str, str]:
    """Inline-style declarations as a name->value map (last wins)."""
    props: dict[str, str] = {}
    for declaration in style_value.split(";"):
        name, sep, value = declaration.partition(":")
        if not sep:
            continue
        name = name.strip().lower()
        value = _IMPORTANT.sub("", value).strip()
        if name and value:
            props[name] = value
    return props


def _own_foreground(node: ElementNode) -> RgbColor | None:
    props = style_properties(node.attributes.get("style", ""))
    color = parse_color(props.get("color", ""))
    if color is not None:
        return color
    # Legacy presentational markup: <font color=...> and friends.
    return parse_color(node.attributes.get("color", ""))


def _color_from_shorthand(value: str) -> RgbColor | None:
    color = parse_color(value)
    if color is not None:
        return color
    # The background shorthand mixes a color with images and positions;
    # scan its tokens after discarding url(...) constructs.
    for token in _COLOR_TOKEN.findall(_URL_CONSTRUCT.sub(" ", value)):
        color = parse_color(token)
        if color is not None:
            return color
    return None


def _own_background(node: ElementNode) -> RgbColor | None:
    props = style_properties(node.attributes.get("style", ""))
    color = parse_color(props.get("background-color", ""))
    if color is not None:
        return color
    if "background" in props:
        color = _color_from_shorthand(props["background"])
        if color is not None:
            return color
    return parse_color(node.attributes.get("bgcolor", ""))


def resolve_colors(anchor: ElementNode, policy: VisibilityPolicy) -> tuple[RgbColor, RgbColor]:
    """Effective foreground/background at ``anchor``.

    Each is the nearest explicit value on the anchor or an ancestor
    (inline style first, then legacy attributes at the same element);
    the policy defaults guarantee a total answer.
    """
    foreground = None
    background = None
    for node in anchor.ancestors_and_self():
        if foreground is None:
            foreground = _own_foreground(node)
        if background is None:
            background = _own_background(node)
        if foreground is not None and background is not None:
            break
    return (
        foreground if foreground is not None else policy.default_foreground,
        background if background is not None else policy.default_background,
    )


def is_invisible(link: LinkRecord, policy: VisibilityPolicy) -> bool:
    """True iff the link's color difference is strictly below the threshold."""
    return color_difference(link.foreground, link.background) < policy.threshold


def css_hidden_reason(anchor: ElementNode) -> str | None:
    """A CSS mechanism hiding the anchor outside the color rule, if any.

    Detects display:none, visibility:hidden, and zero font size on the
    anchor or an ancestor. Informational only: these findings never
    affect the verdict.
    """
    for node in anchor.ancestors_and_self():
        props = style_properties(node.attributes.get("style", ""))
        if props.get("display", "").lower() == "none":
            return "display:none"
        if props.get("visibility", "").lower() == "hidden":
            return "visibility:hidden"
        font_size = props.get("font-size", "")
        m = _NUMBER_PREFIX.match(font_size)
        if m and float(m.group(1)) == 0.0:
            return f"font-size:{font_size}"
    return None


@dataclass(frozen=True)
class StyleResolver:
    """Deterministic color resolution for link extraction."""

    policy: VisibilityPolicy

    def resolve(self, anchor: ElementNode) -> tuple[RgbColor, RgbColor]:
        return resolve_colors(anchor, self.policy)
