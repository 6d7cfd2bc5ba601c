"""Static SVG drawings of merge trees (height upward) and barcodes."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .barcode import Barcode
from .tree import MergeTree, canonical_key

__all__ = ["render_svg", "render_tree", "render_barcode"]

WIDTH, HEIGHT, MARGIN = 480, 360, 40

_ARROW = (
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="5" refY="5" '
    'markerWidth="6" markerHeight="6" orient="auto-start-reverse">'
    '<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>'
)


def _f(x: float) -> str:
    return f"{x:.2f}"


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(title)}</title>",
        _ARROW,
    ]


def render_tree(t: MergeTree) -> str:
    lo, hi = t.min_height, t.root_height
    span = hi - lo if hi > lo else 1.0
    top = hi + 0.15 * span  # room for the root ray

    def y(h: float) -> float:
        return MARGIN + (top - h) / (top - lo) * (HEIGHT - 2 * MARGIN)

    # leaves left to right in canonical order so isomorphic trees look alike
    order: list[int] = []

    def visit(v: int) -> None:
        kids = sorted(t.children[v], key=lambda c: canonical_key(t, c))
        if not kids:
            order.append(v)
        for c in kids:
            visit(c)

    visit(t.root)
    x: dict[int, float] = {}
    gap = (WIDTH - 2 * MARGIN) / max(len(order) - 1, 1)
    for i, leaf in enumerate(order):
        x[leaf] = MARGIN + i * gap if len(order) > 1 else WIDTH / 2
    for v in reversed(t._topdown):
        if t.children[v]:
            x[v] = sum(x[c] for c in t.children[v]) / len(t.children[v])

    out = _header(f"merge tree with {t.n_leaves} leaves")
    out.append('<g stroke="black" stroke-width="2" fill="none">')
    for v in t._topdown:
        p = t.parents[v]
        if p is not None:
            out.append(
                f'<line x1="{_f(x[v])}" y1="{_f(y(t.heights[v]))}" '
                f'x2="{_f(x[v])}" y2="{_f(y(t.heights[p]))}"/>'
            )
        kids = t.children[v]
        if kids:
            xs = [x[c] for c in kids]
            out.append(
                f'<line x1="{_f(min(xs))}" y1="{_f(y(t.heights[v]))}" '
                f'x2="{_f(max(xs))}" y2="{_f(y(t.heights[v]))}"/>'
            )
    r = t.root
    out.append(
        f'<line class="ray" x1="{_f(x[r])}" y1="{_f(y(t.heights[r]))}" '
        f'x2="{_f(x[r])}" y2="{_f(MARGIN / 2)}" marker-end="url(#arrow)"/>'
    )
    out.append("</g>")
    for v in t._topdown:
        kind = "leaf" if t.is_leaf(v) else "branch"
        out.append(
            f'<circle class="{kind}" cx="{_f(x[v])}" cy="{_f(y(t.heights[v]))}" r="4" '
            f'data-height="{t.heights[v]!r}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_barcode(b: Barcode) -> str:
    finite = [e for iv in b for e in (iv.birth, iv.death) if math.isfinite(e)]
    lo = min(finite, default=0.0)
    hi = max(finite, default=1.0)
    span = hi - lo if hi > lo else 1.0
    right = hi + 0.15 * span

    def x(v: float) -> float:
        return MARGIN + (v - lo) / (right - lo) * (WIDTH - 2 * MARGIN)

    out = _header(f"barcode with {len(b)} intervals")
    row = (HEIGHT - 2 * MARGIN) / max(len(b), 1)
    out.append('<g stroke="black" stroke-width="3">')
    for i, iv in enumerate(b):
        yy = _f(MARGIN + (i + 0.5) * row)
        if math.isinf(iv.death):
            out.append(
                f'<line class="infinite" x1="{_f(x(iv.birth))}" y1="{yy}" '
                f'x2="{_f(WIDTH - MARGIN / 2)}" y2="{yy}" marker-end="url(#arrow)"/>'
            )
        else:
            out.append(
                f'<line class="finite" x1="{_f(x(iv.birth))}" y1="{yy}" '
                f'x2="{_f(x(iv.death))}" y2="{yy}"/>'
            )
    out.append("</g>")
    base = _f(HEIGHT - MARGIN / 2)
    out.append(
        f'<line class="axis" x1="{MARGIN}" y1="{base}" x2="{WIDTH - MARGIN}" '
        f'y2="{base}" stroke="gray"/>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(obj: MergeTree | Barcode) -> str:
    if isinstance(obj, MergeTree):
        return render_tree(obj)
    if isinstance(obj, Barcode):
        return render_barcode(obj)
    raise TypeError(f"cannot render {type(obj).__name__}")
