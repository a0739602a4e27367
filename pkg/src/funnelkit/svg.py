"""Dependency-free SVG heatmaps and line plots with linear or log axes."""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

# Viridis anchor colours, interpolated linearly.
_VIRIDIS = np.array(
    [
        [68, 1, 84], [72, 40, 120], [62, 74, 137], [49, 104, 142], [38, 130, 142],
        [31, 158, 137], [53, 183, 121], [109, 205, 89], [180, 222, 44], [253, 231, 37],
    ],
    dtype=float,
)
_LINE_COLOURS = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#17202a")

W, H = 640, 460
LEFT, RIGHT, TOP, BOTTOM = 80, 120, 40, 60


def colour(t: float) -> str:
    if not math.isfinite(t):
        return "#bbbbbb"
    t = min(max(t, 0.0), 1.0) * (len(_VIRIDIS) - 1)
    i = min(int(t), len(_VIRIDIS) - 2)
    c = _VIRIDIS[i] + (t - i) * (_VIRIDIS[i + 1] - _VIRIDIS[i])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


class _Scale:
    def __init__(self, lo, hi, log, a, b):
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        self.lo, self.hi, self.log, self.a, self.b = lo, hi, log, a, b

    def __call__(self, v):
        v = math.log10(v) if self.log else v
        return self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)

    def ticks(self):
        if self.log:
            return [10.0**k for k in range(math.ceil(self.lo - 1e-9), math.floor(self.hi + 1e-9) + 1)]
        span = self.hi - self.lo
        step = 10 ** math.floor(math.log10(span / 5))
        for m in (1, 2, 5, 10):
            if span / (m * step) <= 6:
                step *= m
                break
        first = math.ceil(self.lo / step) * step
        return [first + k * step for k in range(int((self.hi - first) / step + 1e-9) + 1)]


def _label(v, log):
    if log:
        return f"1e{int(round(math.log10(v)))}"
    return f"{v:g}"


def _text(x, y, s, size=12, anchor="middle", rotate=None):
    rot = f' transform="rotate({rotate} {x:.1f} {y:.1f})"' if rotate else ""
    return f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" text-anchor="{anchor}" font-family="sans-serif"{rot}>{escape(s)}</text>'


def _axes(xs: _Scale, ys: _Scale, xlabel, ylabel, title):
    out = [f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" height="{H - TOP - BOTTOM}" fill="none" stroke="black"/>']
    for v in xs.ticks():
        x = xs(v)
        out.append(f'<line x1="{x:.1f}" y1="{H - BOTTOM}" x2="{x:.1f}" y2="{H - BOTTOM + 5}" stroke="black"/>')
        out.append(_text(x, H - BOTTOM + 18, _label(v, xs.log), 11))
    for v in ys.ticks():
        y = ys(v)
        out.append(f'<line x1="{LEFT - 5}" y1="{y:.1f}" x2="{LEFT}" y2="{y:.1f}" stroke="black"/>')
        out.append(_text(LEFT - 8, y + 4, _label(v, ys.log), 11, "end"))
    out.append(_text((LEFT + W - RIGHT) / 2, H - 15, xlabel, 13))
    out.append(_text(20, (TOP + H - BOTTOM) / 2, ylabel, 13, rotate=-90))
    out.append(_text((LEFT + W - RIGHT) / 2, 24, title, 14))
    return out


def _document(parts) -> str:
    body = "\n".join(parts)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">\n'
        f'<rect width="{W}" height="{H}" fill="white"/>\n{body}\n</svg>\n'
    )


def _edges(centres, log):
    c = np.log10(centres) if log else np.asarray(centres, dtype=float)
    if len(c) == 1:
        e = np.array([c[0] - 0.5, c[0] + 0.5])
    else:
        mid = 0.5 * (c[1:] + c[:-1])
        e = np.concatenate([[2 * c[0] - mid[0]], mid, [2 * c[-1] - mid[-1]]])
    return 10**e if log else e


def heatmap(x, y, z, *, x_log=True, y_log=True, title="", xlabel="", ylabel="", zlabel="", zlim=None) -> str:
    """Cells z[j, i] at (x[i], y[j]) with a labelled colour bar."""
    x, y, z = np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    xe, ye = _edges(x, x_log), _edges(y, y_log)
    xs = _Scale(xe[0], xe[-1], x_log, LEFT, W - RIGHT)
    ys = _Scale(ye[0], ye[-1], y_log, H - BOTTOM, TOP)
    finite = z[np.isfinite(z)]
    lo, hi = zlim if zlim else ((finite.min(), finite.max()) if finite.size else (0.0, 1.0))
    if hi == lo:
        hi = lo + 1.0
    parts = []
    for j in range(len(y)):
        for i in range(len(x)):
            x0, x1 = xs(xe[i]), xs(xe[i + 1])
            y0, y1 = ys(ye[j + 1]), ys(ye[j])
            parts.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0 + 0.3:.2f}" height="{y1 - y0 + 0.3:.2f}" '
                f'fill="{colour((z[j, i] - lo) / (hi - lo))}"/>'
            )
    parts += _axes(xs, ys, xlabel, ylabel, title)
    # colour bar
    bx, bw, top, bottom = W - RIGHT + 25, 18, TOP, H - BOTTOM
    steps = 64
    for k in range(steps):
        y0 = bottom - (k + 1) * (bottom - top) / steps
        parts.append(f'<rect x="{bx}" y="{y0:.2f}" width="{bw}" height="{(bottom - top) / steps + 0.3:.2f}" fill="{colour((k + 0.5) / steps)}"/>')
    parts.append(f'<rect x="{bx}" y="{top}" width="{bw}" height="{bottom - top}" fill="none" stroke="black"/>')
    for k in range(5):
        v = lo + k * (hi - lo) / 4
        yy = bottom - k * (bottom - top) / 4
        parts.append(_text(bx + bw + 4, yy + 4, f"{v:.3g}", 10, "start"))
    parts.append(_text(bx + bw / 2, top - 8, zlabel, 11))
    return _document(parts)


def line_plot(x, series, *, x_log=True, y_log=False, title="", xlabel="", ylabel="") -> str:
    """``series`` is a sequence of ``(label, y_values, dashed)`` tuples."""
    x = np.asarray(x, float)
    ys_all = np.concatenate([np.asarray(s[1], float) for s in series]) if series else np.array([0.0, 1.0])
    ok = np.isfinite(ys_all) & ((ys_all > 0) if y_log else True)
    lo, hi = (ys_all[ok].min(), ys_all[ok].max()) if ok.any() else (0.1, 1.0)
    if not y_log:
        pad = 0.05 * (hi - lo or 1.0)
        lo, hi = lo - pad, hi + pad
    xs = _Scale(x.min(), x.max(), x_log, LEFT, W - RIGHT)
    ys = _Scale(lo, hi, y_log, H - BOTTOM, TOP)
    parts = _axes(xs, ys, xlabel, ylabel, title)
    for k, (label, yv, dashed) in enumerate(series):
        c = _LINE_COLOURS[k % len(_LINE_COLOURS)]
        pts = [
            f"{xs(a):.2f},{ys(b):.2f}"
            for a, b in zip(x, np.asarray(yv, float))
            if math.isfinite(b) and (b > 0 or not y_log)
        ]
        dash = ' stroke-dasharray="5,4"' if dashed else ""
        if pts:
            parts.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{c}" stroke-width="2"{dash}/>')
        ly = TOP + 16 + 18 * k
        lx = W - RIGHT + 8
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{c}" stroke-width="2"{dash}/>')
        parts.append(_text(lx + 24, ly + 4, label, 10, "start"))
    return _document(parts)


_LABELS = {
    "dephasing": "2γ* / Γ₁", "g0": "g₀ / Γ₁", "g1": "g₁ / Γ₁", "g2": "g₂ / Γ₁",
    "kappa1": "κ₁ / Γ₁", "kappa2": "κ₂ / Γ₁",
}


def render_sweep(result, stem) -> list:
    """Write the plots for a sweep next to ``stem``; returns the paths written."""
    from .sweep import kappa_ratio_curve

    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    spec = result.spec
    written = []

    def save(suffix, text):
        path = stem.with_name(f"{stem.name}_{suffix}.svg")
        path.write_text(text, encoding="utf-8")
        written.append(path)

    title = spec.preset or "sweep"
    if spec.methods == "analytic" and spec.preset == "fig3a":
        outer, inner = spec.axes
        x = inner.points()
        ratio = kappa_ratio_curve(result).reshape(spec.shape)
        series = [(f"{outer.name} = {v:g}", ratio[i], False) for i, v in enumerate(outer.points())]
        series.append(("κ₂/Γ₁ (bare)", x, True))
        save("kappa_ratio", line_plot(x, series, x_log=inner.is_log, y_log=True, title=f"{title}: κ'/Γ'₁",
                                      xlabel=_LABELS[inner.name], ylabel="κ' / Γ'₁"))
        return written

    numeric = spec.methods in ("numeric", "both")
    analytic = spec.methods in ("analytic", "both") and spec.mode == "cavity"
    if len(spec.axes) == 1:
        ax = spec.axes[0]
        x = ax.points()
        for metric, analytic_name, ylabel, ylog in (("I", "I_analytic", "I", True), ("F_dB", "F_analytic_dB", "F (dB)", False)):
            series = []
            if numeric:
                series.append(("numeric", result.column(metric), False))
            if analytic:
                series.append(("analytic", result.column(analytic_name), True))
            save(metric, line_plot(x, series, x_log=ax.is_log, y_log=ylog, title=f"{title}: {ylabel}",
                                   xlabel=_LABELS[ax.name], ylabel=ylabel))
        return written

    outer, inner = spec.axes
    if outer.scale == "values" or inner.scale == "values":
        if inner.scale == "values":
            outer, inner = inner, outer
            transpose = True
        else:
            transpose = False
        x = inner.points()
        for metric, ylabel, ylog in (("I", "I", False), ("F_dB", "F (dB)", False), ("beta", "β", True)):
            grid = result.as_grid(metric)
            if transpose:
                grid = grid.T
            series = [(f"{outer.name} = {v:g}", grid[i], False) for i, v in enumerate(outer.points())]
            save(metric, line_plot(x, series, x_log=inner.is_log, y_log=ylog, title=f"{title}: {ylabel}",
                                   xlabel=_LABELS[inner.name], ylabel=ylabel))
        return written

    # heatmap: rows of the grid are the first axis (plotted vertically)
    for metric, zlabel, zlim in (("I", "I", (0.0, 1.0)), ("F_dB", "F (dB)", None)):
        grid = result.as_grid(metric)
        save(metric, heatmap(inner.points(), outer.points(), grid, x_log=inner.is_log, y_log=outer.is_log,
                             title=f"{title}: {zlabel}", xlabel=_LABELS[inner.name], ylabel=_LABELS[outer.name],
                             zlabel=zlabel, zlim=zlim))
    return written
