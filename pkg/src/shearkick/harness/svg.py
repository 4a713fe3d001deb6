"""Minimal deterministic SVG figures.

``emit_figure(kind, data, style)`` returns a self-contained SVG document.  The
same input always gives the same bytes: coordinates are printed with a fixed
number of decimals and nothing depends on time or environment.

Data layouts by kind:

* ``lyapunov-vs-tau``: ``{"series": [{"label", "x", "values", "flags"}], "title"}``;
  ``values[i]`` lists the estimates kept at ``x[i]``; flagged points are drawn
  as open squares.
* ``cycle-image``: ``{"panels": [{"label", "theta", "y"}], "h", "title"}``;
  theta may be lifted; it is reduced mod 1 and the polyline broken at wraps.
* ``attractor``: ``{"theta", "y", "h", "title"}``; dashed lines mark y = +-h.
* ``staircase``: ``{"a", "rho", "title"}``.
"""
import math
from xml.sax.saxutils import escape

import numpy as np

from ..errors import EmptyData

KINDS = ("cycle-image", "staircase", "attractor", "lyapunov-vs-tau")
DEFAULT_STYLE = {"width": 640, "height": 420, "margin": 56, "color": "#1f4e99",
                 "accent": "#b03a2e", "point_radius": 1.6, "font_size": 12}


def _n(x):
    return f"{x:.2f}"


def _tick(x):
    return f"{x:.4g}"


class _Panel:
    """Affine map from data coordinates onto a pixel rectangle, plus axes."""

    def __init__(self, x0, y0, w, h, xlim, ylim, style):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim
        self.style = style
        self.parts = []

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + (x - lo) / (hi - lo) * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (y - lo) / (hi - lo) * self.h

    def axes(self, xlabel, ylabel, title=None):
        fs = self.style["font_size"]
        p = self.parts
        p.append(f'<rect x="{_n(self.x0)}" y="{_n(self.y0)}" width="{_n(self.w)}" height="{_n(self.h)}" '
                 'fill="none" stroke="#000" stroke-width="1"/>')
        for x in np.linspace(*self.xlim, 5):
            X = self.px(x)
            p.append(f'<line x1="{_n(X)}" y1="{_n(self.y0 + self.h)}" x2="{_n(X)}" '
                     f'y2="{_n(self.y0 + self.h + 4)}" stroke="#000"/>')
            p.append(f'<text x="{_n(X)}" y="{_n(self.y0 + self.h + 6 + fs)}" font-size="{fs}" '
                     f'text-anchor="middle">{_tick(x)}</text>')
        for y in np.linspace(*self.ylim, 5):
            Y = self.py(y)
            p.append(f'<line x1="{_n(self.x0 - 4)}" y1="{_n(Y)}" x2="{_n(self.x0)}" y2="{_n(Y)}" stroke="#000"/>')
            p.append(f'<text x="{_n(self.x0 - 6)}" y="{_n(Y + fs / 3)}" font-size="{fs}" '
                     f'text-anchor="end">{_tick(y)}</text>')
        p.append(f'<text x="{_n(self.x0 + self.w / 2)}" y="{_n(self.y0 + self.h + 2 * fs + 10)}" '
                 f'font-size="{fs}" text-anchor="middle">{escape(xlabel)}</text>')
        p.append(f'<text x="{_n(self.x0 - 40)}" y="{_n(self.y0 + self.h / 2)}" font-size="{fs}" '
                 f'text-anchor="middle" transform="rotate(-90 {_n(self.x0 - 40)} {_n(self.y0 + self.h / 2)})">'
                 f'{escape(ylabel)}</text>')
        if title:
            p.append(f'<text x="{_n(self.x0 + self.w / 2)}" y="{_n(self.y0 - 8)}" font-size="{fs}" '
                     f'text-anchor="middle">{escape(title)}</text>')

    def hline(self, y, dash=False, color="#888", cls=None):
        extra = ' stroke-dasharray="4 3"' if dash else ""
        extra += f' class="{cls}"' if cls else ""
        self.parts.append(f'<line x1="{_n(self.x0)}" y1="{_n(self.py(y))}" x2="{_n(self.x0 + self.w)}" '
                          f'y2="{_n(self.py(y))}" stroke="{color}"{extra}/>')

    def polyline(self, xs, ys, color):
        pts = " ".join(f"{_n(self.px(x))},{_n(self.py(y))}" for x, y in zip(xs, ys))
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1"/>')

    def points(self, xs, ys, color, r):
        for x, y in zip(xs, ys):
            self.parts.append(f'<circle cx="{_n(self.px(x))}" cy="{_n(self.py(y))}" r="{r}" fill="{color}"/>')

    def squares(self, xs, ys, color, r):
        for x, y in zip(xs, ys):
            X, Y = self.px(x), self.py(y)
            self.parts.append(f'<rect x="{_n(X - r)}" y="{_n(Y - r)}" width="{_n(2 * r)}" height="{_n(2 * r)}" '
                              f'fill="none" stroke="{color}"/>')


def _padded(lo, hi, frac=0.05):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise EmptyData("data contain no finite values")
    if hi == lo:
        d = abs(lo) * 0.1 or 1.0
        return lo - d, hi + d
    d = (hi - lo) * frac
    return lo - d, hi + d


def _document(width, height, parts):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="#fff"/>', *parts, "</svg>"]) + "\n"


def _lyapunov_vs_tau(data, st):
    series = data.get("series") or []
    xs = [x for s in series for x in s["x"]]
    vals = [v for s in series for row in s["values"] for v in row]
    if not xs or not vals:
        raise EmptyData("lyapunov-vs-tau needs at least one point")
    ylo, yhi = _padded(min(min(vals), 0.0), max(max(vals), 0.0))
    m = st["margin"]
    pn = _Panel(m + 10, m / 2 + 10, st["width"] - 2 * m - 10, st["height"] - 1.5 * m - 20,
                _padded(min(xs), max(xs), 0.02), (ylo, yhi), st)
    pn.hline(0.0, cls="zero-line")
    colors = [st["color"], st["accent"], "#2e7d32", "#6a1b9a"]
    for k, s in enumerate(series):
        c = colors[k % len(colors)]
        flags = s.get("flags") or [False] * len(s["x"])
        for x, row, flag in zip(s["x"], s["values"], flags):
            if flag:
                pn.squares([x] * len(row), row, c, st["point_radius"] + 1.2)
            else:
                pn.points([x] * len(row), row, c, st["point_radius"])
    pn.axes(data.get("xlabel", "tau"), data.get("ylabel", "Lyapunov exponent per kick"), data.get("title"))
    return _document(st["width"], st["height"], pn.parts)


def _cycle_image(data, st):
    panels = data.get("panels") or []
    if not panels or any(len(p["theta"]) == 0 for p in panels):
        raise EmptyData("cycle-image needs at least one non-empty curve")
    n = len(panels)
    cols = min(n, 2)
    rows = math.ceil(n / cols)
    m = st["margin"]
    pw, ph = st["width"], st["height"]
    W, H = cols * pw, rows * ph
    ymax = max(float(np.max(np.abs(p["y"]))) for p in panels)
    h = data.get("h")
    yl = max(ymax, h or 0.0) * 1.05 or 1.0
    parts = []
    for i, p in enumerate(panels):
        r, c = divmod(i, cols)
        pn = _Panel(c * pw + m + 10, r * ph + m / 2 + 10, pw - 2 * m - 10, ph - 1.5 * m - 20,
                    (0.0, 1.0), (-yl, yl), st)
        pn.hline(0.0, cls="zero-line")
        if h:
            pn.hline(h, dash=True)
            pn.hline(-h, dash=True)
        th = np.mod(np.asarray(p["theta"], dtype=float), 1.0)
        y = np.asarray(p["y"], dtype=float)
        cuts = np.nonzero(np.abs(np.diff(th)) > 0.5)[0] + 1
        for a, b in zip(np.r_[0, cuts], np.r_[cuts, th.size]):
            if b - a >= 2:
                pn.polyline(th[a:b], y[a:b], st["color"])
        pn.axes("theta", "y", p.get("label"))
        parts += pn.parts
    if data.get("title"):
        parts.append(f'<text x="{_n(W / 2)}" y="14" font-size="{st["font_size"]}" text-anchor="middle">'
                     f'{escape(data["title"])}</text>')
    return _document(W, H, parts)


def _attractor(data, st):
    th = np.mod(np.asarray(data.get("theta", []), dtype=float).ravel(), 1.0)
    y = np.asarray(data.get("y", []), dtype=float).ravel()
    if th.size == 0:
        raise EmptyData("attractor needs at least one point")
    h = data.get("h")
    yl = max(float(np.max(np.abs(y))), h or 0.0) * 1.05 or 1.0
    m = st["margin"]
    pn = _Panel(m + 10, m / 2 + 10, st["width"] - 2 * m - 10, st["height"] - 1.5 * m - 20,
                (0.0, 1.0), (-yl, yl), st)
    if h:
        pn.hline(h, dash=True)
        pn.hline(-h, dash=True)
    pn.points(th, y, st["color"], st["point_radius"] * 0.6)
    pn.axes("theta", "y", data.get("title"))
    return _document(st["width"], st["height"], pn.parts)


def _staircase(data, st):
    a = np.asarray(data.get("a", []), dtype=float)
    rho = np.asarray(data.get("rho", []), dtype=float)
    if a.size == 0:
        raise EmptyData("staircase needs at least one point")
    m = st["margin"]
    pn = _Panel(m + 10, m / 2 + 10, st["width"] - 2 * m - 10, st["height"] - 1.5 * m - 20,
                _padded(float(a.min()), float(a.max()), 0.0), _padded(float(rho.min()), float(rho.max())), st)
    pn.polyline(a, rho, st["color"])
    pn.axes("a", "rotation number", data.get("title"))
    return _document(st["width"], st["height"], pn.parts)


_BUILDERS = {"lyapunov-vs-tau": _lyapunov_vs_tau, "cycle-image": _cycle_image,
             "attractor": _attractor, "staircase": _staircase}


def emit_figure(kind, data, style=None):
    if kind not in _BUILDERS:
        raise ValueError(f"unknown figure kind {kind!r} (choose from {KINDS})")
    if not data:
        raise EmptyData("no data to plot")
    st = dict(DEFAULT_STYLE)
    st.update(style or {})
    return _BUILDERS[kind](data, st)
