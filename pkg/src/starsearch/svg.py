"""Minimal standalone SVG line charts for trace files."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def line_chart(x, series: dict, *, title: str = "", xlabel: str = "k", ylabel: str = "P",
               width: int = 640, height: int = 400) -> str:
    """Render one or more y-series against a shared x axis."""
    xs = [float(v) for v in x]
    pad_l, pad_r, pad_t, pad_b = 56, 16, 32, 44
    ys_all = [float(v) for ys in series.values() for v in ys]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = 0.0, max(1e-12, max(ys_all) if ys_all else 1.0)
    if x1 == x0:
        x1 = x0 + 1
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b

    def px(v):
        return pad_l + (v - x0) / (x1 - x0) * pw

    def py(v):
        return pad_t + ph - (v - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad_l}" y1="{pad_t + ph}" x2="{pad_l + pw}" y2="{pad_t + ph}" stroke="black"/>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{pad_t + ph}" stroke="black"/>',
    ]
    for i in range(5):
        yv = y0 + (y1 - y0) * i / 4
        parts.append(f'<text x="{pad_l - 6}" y="{py(yv) + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
        xv = x0 + (x1 - x0) * i / 4
        parts.append(f'<text x="{px(xv):.1f}" y="{pad_t + ph + 16}" text-anchor="middle">{xv:.4g}</text>')
    for i, (name, ys) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(float(b)):.2f}" for a, b in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(
            f'<text x="{pad_l + pw - 4}" y="{pad_t + 14 * (i + 1)}" text-anchor="end" fill="{color}">{escape(name)}</text>'
        )
    parts.append(f'<text x="{width / 2}" y="18" text-anchor="middle">{escape(title)}</text>')
    parts.append(f'<text x="{pad_l + pw / 2}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(
        f'<text x="14" y="{pad_t + ph / 2}" text-anchor="middle" transform="rotate(-90 14 {pad_t + ph / 2})">{escape(ylabel)}</text>'
    )
    parts.append("</svg>\n")
    return "\n".join(parts)


def write_line_chart(path, x, series: dict, **kwargs) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(line_chart(x, series, **kwargs), encoding="utf-8")
    return path
