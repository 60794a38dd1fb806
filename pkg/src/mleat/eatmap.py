"""Four-quadrant EAT-Map rendering.

Columns are targets (X left, Y right), rows are attributes (A top, B
bottom). A cell is shaded when its target is significantly associated
with its attribute at Level 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

from .patterns import EatPattern, Level2Verdict, Toward, classify

SHADED = "#d62728"
UNSHADED = "#cccccc"
CELL = 100
MARGIN_LEFT = 80
MARGIN_TOP = 50
FONT = "Helvetica, Arial, sans-serif"


@dataclass(frozen=True)
class EatMapShading:
    XA: bool = False
    XB: bool = False
    YA: bool = False
    YB: bool = False
    label_x: str = "X"
    label_y: str = "Y"
    label_a: str = "A"
    label_b: str = "B"

    def __post_init__(self):
        if self.XA and self.XB:
            raise ValueError("target X cannot be shaded toward both A and B")
        if self.YA and self.YB:
            raise ValueError("target Y cannot be shaded toward both A and B")

    @property
    def pattern(self) -> EatPattern:
        def toward(a, b):
            return Toward.A if a else Toward.B if b else Toward.NONE
        return classify(toward(self.XA, self.XB), toward(self.YA, self.YB))

    def shaded(self, cell: str) -> bool:
        return getattr(self, cell)


def _toward(v) -> Toward:
    return v.toward if isinstance(v, Level2Verdict) else Toward(v)


def shading_from_verdicts(vx, vy, labels: tuple[str, str, str, str] = ("X", "Y", "A", "B")) -> EatMapShading:
    tx, ty = _toward(vx), _toward(vy)
    return EatMapShading(tx is Toward.A, tx is Toward.B, ty is Toward.A, ty is Toward.B, *labels)


def shading_for_pattern(pattern: EatPattern | str, labels: tuple[str, str, str, str] = ("X", "Y", "A", "B")) -> EatMapShading:
    return shading_from_verdicts(*EatPattern(pattern).verdicts, labels=labels)


def _svg(s: EatMapShading) -> str:
    width = MARGIN_LEFT + 2 * CELL + 20
    height = MARGIN_TOP + 2 * CELL + 20
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"  <title>{escape(s.pattern.value)}</title>",
        f'  <rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for ci, (tcode, tlabel) in enumerate((("X", s.label_x), ("Y", s.label_y))):
        for ri, (acode, alabel) in enumerate((("A", s.label_a), ("B", s.label_b))):
            cell = tcode + acode
            fill = SHADED if s.shaded(cell) else UNSHADED
            x, y = MARGIN_LEFT + ci * CELL, MARGIN_TOP + ri * CELL
            out.append(f'  <rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" '
                       f'stroke="#ffffff" stroke-width="2" data-target="{tcode}" data-attribute="{acode}"/>')
    for ci, label in enumerate((s.label_x, s.label_y)):
        x = MARGIN_LEFT + ci * CELL + CELL // 2
        out.append(f'  <text x="{x}" y="{MARGIN_TOP - 15}" text-anchor="middle" font-family={quoteattr(FONT)} '
                   f'font-size="14">{escape(label)}</text>')
    for ri, label in enumerate((s.label_a, s.label_b)):
        y = MARGIN_TOP + ri * CELL + CELL // 2 + 5
        out.append(f'  <text x="{MARGIN_LEFT - 10}" y="{y}" text-anchor="end" font-family={quoteattr(FONT)} '
                   f'font-size="14">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ascii(s: EatMapShading) -> str:
    def box(cell):
        return "[##]" if s.shaded(cell) else "[  ]"
    w = max(len(s.label_a), len(s.label_b))
    cx, cy = s.label_x[:6], s.label_y[:6]
    lines = [
        s.pattern.value,
        f"{'':{w}}  {cx:^6} {cy:^6}".rstrip(),
        f"{s.label_a:<{w}}   {box('XA')}   {box('YA')}",
        f"{s.label_b:<{w}}   {box('XB')}   {box('YB')}",
    ]
    return "\n".join(lines) + "\n"


def render(shading: EatMapShading, format: str = "svg") -> str:
    """Render ``shading`` as an SVG 1.1 document or an LF-terminated ASCII grid."""
    if format == "svg":
        return _svg(shading)
    if format == "ascii":
        return _ascii(shading)
    raise ValueError(f"unknown EAT-Map format {format!r}")
