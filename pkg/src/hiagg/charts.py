"""Deterministic SVG rendering of comparison reports.

Renders straight from the report document dict (the same structure the JSON
emitter writes), so charting an in-memory report and charting a report read
back from disk produce byte-identical SVG. No plotting library, no
timestamps, fixed-precision coordinates only.

Per substation: a grouped bar chart (one bar per bay per method, y axis 0-10)
and a donut showing the asset color-band distribution. Indeterminate or
errored cells render as a hatched full-height placeholder. Bar geometry
encodes the score at PX_PER_UNIT pixels per HI unit; bars for raw scores
above 10 are clipped to the axis and marked with class "clipped".
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

PX_PER_UNIT = 16.0
AXIS_H = 10 * PX_PER_UNIT
BAR_W = 18.0
BAR_GAP = 4.0
CLUSTER_GAP = 26.0
MARGIN_L = 58.0
MARGIN_TOP = 46.0
LABEL_H = 40.0
DONUT_GAP = 40.0
DONUT_R = 70.0
DONUT_R_INNER = 40.0
LEGEND_W = 190.0

METHOD_COLORS = ("#4878d0", "#ee854a", "#6acc64", "#d65f5f", "#956cb4", "#8c613c")

BAND_COLORS = {
    "green": "#2e8b57",
    "orange": "#e69500",
    "red": "#c0392b",
    "violet": "#7d3c98",
    "white": "#bdbdbd",
}
BAND_ORDER = ("green", "orange", "red", "violet", "white")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _polar(cx: float, cy: float, r: float, deg: float) -> tuple[float, float]:
    rad = math.radians(deg)
    return cx + r * math.cos(rad), cy + r * math.sin(rad)


def _annular_path(cx: float, cy: float, r_out: float, r_in: float,
                  a0: float, a1: float) -> str:
    # split sweeps over 180 degrees so each SVG arc stays unambiguous
    sweep = a1 - a0
    mids = [a0 + sweep / 2, a1] if sweep > 180 else [a1]
    x, y = _polar(cx, cy, r_out, a0)
    parts = [f"M {_fmt(x)} {_fmt(y)}"]
    for a in mids:
        x, y = _polar(cx, cy, r_out, a)
        parts.append(f"A {_fmt(r_out)} {_fmt(r_out)} 0 0 1 {_fmt(x)} {_fmt(y)}")
    x, y = _polar(cx, cy, r_in, a1)
    parts.append(f"L {_fmt(x)} {_fmt(y)}")
    for a in reversed([a0] + mids[:-1]):
        x, y = _polar(cx, cy, r_in, a)
        parts.append(f"A {_fmt(r_in)} {_fmt(r_in)} 0 0 0 {_fmt(x)} {_fmt(y)}")
    parts.append("Z")
    return " ".join(parts)


def _donut(cx: float, cy: float, distribution: dict[str, str]) -> list[str]:
    out = []
    angle = -90.0
    for band in BAND_ORDER:
        frac = float(distribution.get(band, "0"))
        if frac <= 0:
            continue
        sweep = min(frac * 360.0, 359.999)
        path = _annular_path(cx, cy, DONUT_R, DONUT_R_INNER, angle, angle + sweep)
        out.append(f'<path d="{path}" fill="{BAND_COLORS[band]}" '
                   f'stroke="#ffffff" stroke-width="1"/>')
        angle += frac * 360.0
    ly = cy - DONUT_R
    for i, band in enumerate(BAND_ORDER):
        frac = float(distribution.get(band, "0"))
        y = ly + i * 18.0
        x = cx + DONUT_R + 18.0
        out.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="12" height="12" '
                   f'fill="{BAND_COLORS[band]}"/>')
        pct = f"{frac * 100:.1f}%"
        out.append(f'<text x="{_fmt(x + 18)}" y="{_fmt(y + 10)}" '
                   f'font-size="11">{band} {pct}</text>')
    return out


def _bars(sub: dict, methods: list[str], y0: float) -> tuple[list[str], float]:
    out = []
    colors = {m: METHOD_COLORS[i % len(METHOD_COLORS)]
              for i, m in enumerate(methods)}
    cluster_w = len(methods) * (BAR_W + BAR_GAP) - BAR_GAP
    base = y0 + AXIS_H
    right = MARGIN_L + 10.0 + len(sub["bays"]) * (cluster_w + CLUSTER_GAP)

    for unit in range(0, 11, 2):
        gy = base - unit * PX_PER_UNIT
        out.append(f'<line x1="{_fmt(MARGIN_L)}" y1="{_fmt(gy)}" '
                   f'x2="{_fmt(right)}" y2="{_fmt(gy)}" stroke="#dddddd" '
                   f'stroke-width="1"/>')
        out.append(f'<text x="{_fmt(MARGIN_L - 8)}" y="{_fmt(gy + 4)}" '
                   f'font-size="11" text-anchor="end">{unit}</text>')

    x = MARGIN_L + 10.0
    for bay in sub["bays"]:
        for i, token in enumerate(methods):
            cell = bay["scores"][token]
            bx = x + i * (BAR_W + BAR_GAP)
            score = cell.get("score") if "error" not in cell else None
            if score is None:
                # hatched placeholder for indeterminate or errored cells
                out.append(
                    f'<rect x="{_fmt(bx)}" y="{_fmt(y0)}" width="{_fmt(BAR_W)}" '
                    f'height="{_fmt(AXIS_H)}" fill="url(#na-hatch)" '
                    f'stroke="#999999" stroke-width="0.5" class="placeholder" '
                    f'data-bay={quoteattr(bay["bay_id"])} '
                    f'data-method={quoteattr(token)}/>')
                label = "err" if "error" in cell else "n/a"
                out.append(f'<text x="{_fmt(bx + BAR_W / 2)}" '
                           f'y="{_fmt(y0 + AXIS_H / 2)}" font-size="9" '
                           f'text-anchor="middle">{label}</text>')
                continue
            value = float(score)
            clipped = value > 10.0
            h = min(value, 10.0) * PX_PER_UNIT
            cls = "bar clipped" if clipped else "bar"
            out.append(
                f'<rect x="{_fmt(bx)}" y="{_fmt(base - h)}" '
                f'width="{_fmt(BAR_W)}" height="{h:.6f}" '
                f'fill="{colors[token]}" class="{cls}" '
                f'data-bay={quoteattr(bay["bay_id"])} '
                f'data-method={quoteattr(token)} '
                f'data-score={quoteattr(score)}/>')
            if clipped:
                out.append(f'<text x="{_fmt(bx + BAR_W / 2)}" '
                           f'y="{_fmt(y0 - 4)}" font-size="9" '
                           f'text-anchor="middle">{escape(score)}</text>')
        out.append(f'<text x="{_fmt(x + cluster_w / 2)}" '
                   f'y="{_fmt(base + 14)}" font-size="10" '
                   f'text-anchor="middle">{escape(bay["bay_id"])}</text>')
        x += cluster_w + CLUSTER_GAP

    out.append(f'<line x1="{_fmt(MARGIN_L)}" y1="{_fmt(base)}" '
               f'x2="{_fmt(x)}" y2="{_fmt(base)}" stroke="#333333" '
               f'stroke-width="1"/>')
    for i, token in enumerate(methods):
        lx = MARGIN_L + 10.0 + i * 170.0
        ly = base + 28.0
        out.append(f'<rect x="{_fmt(lx)}" y="{_fmt(ly)}" width="12" '
                   f'height="12" fill="{colors[token]}"/>')
        out.append(f'<text x="{_fmt(lx + 18)}" y="{_fmt(ly + 10)}" '
                   f'font-size="11">{escape(token)}</text>')
    return out, x


def render_chart(doc: dict) -> str:
    """SVG text for a report document (one bar chart + donut per substation)."""
    methods = list(doc["methods"])
    blocks: list[str] = []
    block_h = MARGIN_TOP + AXIS_H + LABEL_H + 24.0
    width = 640.0
    y = 10.0
    for sub in doc["substations"]:
        blocks.append(f'<text x="{_fmt(MARGIN_L)}" y="{_fmt(y + 20)}" '
                      f'font-size="14" font-weight="bold">'
                      f'{escape(sub["substation_id"])}</text>')
        bars, bar_right = _bars(sub, methods, y + MARGIN_TOP)
        blocks.extend(bars)
        donut_cx = bar_right + DONUT_GAP + DONUT_R
        donut_cy = y + MARGIN_TOP + AXIS_H / 2
        blocks.extend(_donut(donut_cx, donut_cy, sub["band_distribution"]))
        width = max(width, donut_cx + DONUT_R + LEGEND_W)
        y += block_h
    height = y + 10.0

    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
        f'font-family="sans-serif">'
        '<defs><pattern id="na-hatch" width="6" height="6" '
        'patternUnits="userSpaceOnUse" patternTransform="rotate(45)">'
        '<rect width="6" height="6" fill="#f2f2f2"/>'
        '<line x1="0" y1="0" x2="0" y2="6" stroke="#bbbbbb" stroke-width="2"/>'
        '</pattern></defs>'
        f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>'
    )
    return head + "\n" + "\n".join(blocks) + "\n</svg>\n"
