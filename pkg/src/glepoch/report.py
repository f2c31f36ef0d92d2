"""Analysis artifacts: degree histograms, persistent-cohort scatter data,
rank-size curves, cohort tables, display orderings and SVG renderings."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import csgraph

from .graph_core import CollabGraph
from .temporal import PERSISTENT


@dataclass(frozen=True)
class HistogramSpec:
    bin_width: int = 4
    tail_cutoff: int = 800
    log_counts: bool = True

    def __post_init__(self):
        if self.bin_width < 1:
            raise ValueError("bin_width must be >= 1")
        if self.tail_cutoff < self.bin_width or self.tail_cutoff % self.bin_width:
            raise ValueError("tail_cutoff must be a positive multiple of bin_width")


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray   # lower edge of each bin; the last bin is open-ended
    counts: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        w = self.edges[1] - self.edges[0] if self.edges.size > 1 else 1
        c = self.edges + (w - 1) / 2.0
        return c


def degree_histogram(degrees, spec: HistogramSpec | None = None) -> Histogram:
    """Fixed-width degree bins with one tail bin for degrees >= ``tail_cutoff``.

    ``degrees`` may be a graphlet field (column 1 is used) or a 1-d array.
    """
    spec = spec or HistogramSpec()
    d = np.asarray(degrees)
    if d.ndim == 2:
        d = d[:, 1]
    n_bins = spec.tail_cutoff // spec.bin_width
    idx = np.minimum(d // spec.bin_width, n_bins)
    counts = np.bincount(idx.astype(np.int64), minlength=n_bins + 1)
    edges = np.arange(n_bins + 1, dtype=np.int64) * spec.bin_width
    return Histogram(edges, counts.astype(np.int64))


def powerlaw_slope(hist: Histogram, lo: int, hi: int) -> float:
    """Least-squares slope of log(count) on log(bin center) for non-empty
    regular bins with lower edge in ``[lo, hi)``."""
    sel = (hist.edges >= lo) & (hist.edges < hi) & (hist.counts > 0)
    sel[-1] = False
    if sel.sum() < 2:
        raise ValueError("fewer than two non-empty bins in the fit range")
    x = np.log10(hist.centers[sel])
    y = np.log10(hist.counts[sel])
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class RankSizeCurve:
    vertices: np.ndarray
    d1_values: np.ndarray
    d2_values: np.ndarray

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.vertices.size + 1)


def rank_size_curves(field: np.ndarray, vertex_ids=None) -> RankSizeCurve:
    """Vertices by descending degree (ties: ascending id) with their d2."""
    n = field.shape[0]
    ids = np.arange(n) if vertex_ids is None else np.asarray(vertex_ids)
    order = np.lexsort((ids, -field[:, 1]))
    return RankSizeCurve(ids[order], field[order, 1], field[order, 2])


@dataclass(frozen=True)
class ScatterSet:
    label: str
    keys: np.ndarray    # global author ids in the persistent cohort
    d2: np.ndarray
    d4: np.ndarray
    d1: np.ndarray


def persistent_scatter(networks, fields):
    """(d2, d4) over cohort 4 of each network, and the authors common to all
    non-empty persistent cohorts.

    Returns ``(sets, common)``; networks without a persistent cohort are
    skipped.
    """
    sets = []
    for net, f in zip(networks, fields):
        sel = np.flatnonzero(net.cohort == PERSISTENT)
        if sel.size == 0:
            continue
        keys = net.graph.vertex_key[sel]
        o = np.argsort(keys, kind="stable")
        sel, keys = sel[o], keys[o]
        sets.append(ScatterSet(net.label, keys, f[sel, 2], f[sel, 4], f[sel, 1]))
    if not sets:
        return sets, np.zeros(0, dtype=np.int64)
    common = sets[0].keys
    for s in sets[1:]:
        common = np.intersect1d(common, s.keys)
    return sets, common


def largest_component_size(g: CollabGraph) -> int:
    if g.n_vertices == 0:
        return 0
    _, labels = csgraph.connected_components(g.to_scipy(), directed=False)
    return int(np.bincount(labels).max())


def cohort_table(networks) -> dict:
    """Column per network: cohort sizes 1..7, ``|V|`` and LCC size."""
    out = {}
    for net in networks:
        sizes = np.bincount(net.cohort, minlength=8)[1:8] if net.cohort.size else np.zeros(7, np.int64)
        out[net.label] = {"cohorts": [int(x) for x in sizes],
                          "V": int(net.graph.n_vertices),
                          "LCC": largest_component_size(net.graph)}
    return out


def write_cohort_table_csv(table: dict, path) -> None:
    labels = list(table)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + labels)
        for i in range(7):
            w.writerow([i + 1] + [table[k]["cohorts"][i] for k in labels])
        w.writerow(["|V|"] + [table[k]["V"] for k in labels])
        w.writerow(["LCC"] + [table[k]["LCC"] for k in labels])


def display_order(graph: CollabGraph, cohort) -> np.ndarray:
    """Cohorts contiguous in label order; reverse Cuthill-McKee inside each."""
    cohort = np.asarray(cohort)
    A = graph.to_scipy()
    parts = []
    for label in np.unique(cohort):
        members = np.flatnonzero(cohort == label)
        if members.size > 1:
            sub = A[members][:, members].tocsr()
            perm = csgraph.reverse_cuthill_mckee(sub, symmetric_mode=True)
            members = members[np.asarray(perm, dtype=np.int64)]
        parts.append(members)
    return np.concatenate(parts).astype(np.int64) if parts else np.zeros(0, np.int64)


def adjacency_blocks(graph: CollabGraph, order=None, max_pixels: int = 1024):
    """Link counts per pixel block of the reordered adjacency matrix.

    Block side is ``ceil(n / max_pixels)`` vertices. Returns
    ``(counts, block_size)``.
    """
    n = graph.n_vertices
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64), 1
    order = np.arange(n) if order is None else np.asarray(order)
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    b = max(1, math.ceil(n / max_pixels))
    nb = math.ceil(n / b)
    src = np.repeat(np.arange(n), graph.degree())
    cell = (pos[src] // b) * nb + pos[graph.indices] // b
    counts = np.bincount(cell, minlength=nb * nb).reshape(nb, nb)
    return counts, b


# -- SVG ---------------------------------------------------------------------

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 60
PLOT_W = WIDTH - MARGIN_L - MARGIN_R
PLOT_H = HEIGHT - MARGIN_T - MARGIN_B

# coarse viridis-like ramp for heatmaps
_RAMP = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]])


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0) * (len(_RAMP) - 1)
    i = min(int(t), len(_RAMP) - 2)
    c = _RAMP[i] + (_RAMP[i + 1] - _RAMP[i]) * (t - i)
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


@dataclass(frozen=True)
class LogAxis:
    """Decade-aligned log10 axis: ``[10**lo, 10**hi]`` with ``hi > lo``."""

    lo: int
    hi: int

    @classmethod
    def fit(cls, values) -> "LogAxis":
        v = np.asarray(values, dtype=float)
        v = v[v > 0]
        if v.size == 0:
            return cls(0, 1)
        lo = math.floor(math.log10(v.min()))
        hi = math.ceil(math.log10(v.max()))
        return cls(lo, hi if hi > lo else lo + 1)

    def frac(self, v) -> np.ndarray:
        return (np.log10(np.asarray(v, dtype=float)) - self.lo) / (self.hi - self.lo)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Svg:
    def __init__(self, title: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
            f'<text x="{WIDTH // 2}" y="18" text-anchor="middle" font-size="14">{_esc(title)}</text>',
        ]

    def add(self, s: str):
        self.parts.append(s)

    def axes(self, xlabel: str, ylabel: str, xaxis=None, yaxis=None):
        x0, y0 = MARGIN_L, MARGIN_T + PLOT_H
        self.add(f'<line x1="{x0}" y1="{y0}" x2="{x0 + PLOT_W}" y2="{y0}" stroke="#000"/>')
        self.add(f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="#000"/>')
        self.add(f'<text x="{x0 + PLOT_W // 2}" y="{HEIGHT - 15}" text-anchor="middle" '
                 f'font-size="12">{_esc(xlabel)}</text>')
        self.add(f'<text x="15" y="{MARGIN_T + PLOT_H // 2}" text-anchor="middle" font-size="12" '
                 f'transform="rotate(-90 15 {MARGIN_T + PLOT_H // 2})">{_esc(ylabel)}</text>')
        if xaxis is not None:
            for e in range(xaxis.lo, xaxis.hi + 1):
                x = x0 + (e - xaxis.lo) / (xaxis.hi - xaxis.lo) * PLOT_W
                self.add(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 5}" stroke="#000"/>')
                self.add(f'<text x="{_fmt(x)}" y="{y0 + 18}" text-anchor="middle" '
                         f'font-size="10">1e{e}</text>')
        if yaxis is not None:
            for e in range(yaxis.lo, yaxis.hi + 1):
                y = y0 - (e - yaxis.lo) / (yaxis.hi - yaxis.lo) * PLOT_H
                self.add(f'<line x1="{x0 - 5}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="#000"/>')
                self.add(f'<text x="{x0 - 8}" y="{_fmt(y + 3)}" text-anchor="end" '
                         f'font-size="10">1e{e}</text>')

    def write(self, path, dropped: int = 0) -> int:
        self.parts.insert(3, f"<desc>dropped {dropped} non-positive values from log axes</desc>")
        self.parts.append("</svg>")
        Path(path).write_text("\n".join(self.parts) + "\n", encoding="utf-8")
        return dropped


def _esc(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def log_point(x, y, xaxis: LogAxis, yaxis: LogAxis):
    """Canvas coordinates of a data point on log-log axes."""
    px = MARGIN_L + xaxis.frac(x) * PLOT_W
    py = MARGIN_T + PLOT_H - yaxis.frac(y) * PLOT_H
    return px, py


def _distinct_points(px, py):
    """Indices of the first mark landing on each whole canvas pixel."""
    if len(px) == 0:
        return np.zeros(0, dtype=np.int64)
    q = np.floor(np.column_stack([px, py])).astype(np.int64)
    _, first = np.unique(q, axis=0, return_index=True)
    return np.sort(first)


def render_histogram_svg(hist: Histogram, path, title: str = "degree histogram") -> int:
    svg = _Svg(title)
    keep = hist.counts > 0
    x, y = hist.centers[keep], hist.counts[keep]
    xaxis = LogAxis.fit(x[x > 0])
    yaxis = LogAxis.fit(y)
    svg.axes("degree (sigma1)", "count", xaxis, yaxis)
    dropped = int(np.count_nonzero(keep & (hist.centers <= 0)))
    for cx, cy in zip(x.tolist(), y.tolist()):
        if cx <= 0:
            continue
        px, py = log_point(cx, cy, xaxis, yaxis)
        svg.add(f'<rect x="{_fmt(px - 2)}" y="{_fmt(py)}" width="4" '
                f'height="{_fmt(MARGIN_T + PLOT_H - py)}" fill="#1f77b4"/>')
    return svg.write(path, dropped)


def render_scatter_svg(points, path, title: str = "sigma2 vs sigma4", highlight=None) -> int:
    """Log-log scatter of ``(x, y)`` pairs with x = d4, y = d2.

    ``points`` is an ``(m, 2)`` array; ``highlight`` an optional boolean mask
    drawn in red. Points with a non-positive coordinate are dropped.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    ok = (pts > 0).all(axis=1)
    svg = _Svg(title)
    xaxis = LogAxis.fit(pts[ok, 0])
    yaxis = LogAxis.fit(pts[ok, 1])
    svg.axes("sigma4 frequency", "sigma2 frequency", xaxis, yaxis)
    hl = np.zeros(len(pts), bool) if highlight is None else np.asarray(highlight, bool)
    # highlighted points last so they sit on top; coincident markers drawn once
    for group, color in ((ok & ~hl, "#888888"), (ok & hl, "#d62728")):
        px, py = log_point(pts[group, 0], pts[group, 1], xaxis, yaxis)
        for k in _distinct_points(px, py).tolist():
            svg.add(f'<circle cx="{_fmt(px[k])}" cy="{_fmt(py[k])}" r="2.5" fill="{color}"/>')
    return svg.write(path, int(np.count_nonzero(~ok)))


def render_rank_size_svg(curve: RankSizeCurve, path, title: str = "rank-size") -> int:
    svg = _Svg(title)
    ranks = curve.ranks
    vals = np.concatenate([curve.d1_values, curve.d2_values])
    xaxis = LogAxis.fit(ranks)
    yaxis = LogAxis.fit(vals)
    svg.axes("rank by degree", "frequency", xaxis, yaxis)
    dropped = 0
    for values, color in ((curve.d2_values, "#1f77b4"), (curve.d1_values, "#d62728")):
        ok = values > 0
        dropped += int(np.count_nonzero(~ok))
        px, py = log_point(ranks[ok], values[ok], xaxis, yaxis)
        for k in _distinct_points(px, py).tolist():
            svg.add(f'<rect x="{_fmt(px[k] - 1)}" y="{_fmt(py[k] - 1)}" width="2" height="2" fill="{color}"/>')
    return svg.write(path, dropped)


N_LEVELS = 32
_PALETTE = [_color(k / (N_LEVELS - 1)) for k in range(N_LEVELS)]


def _heat_cells(svg, matrix, boundaries_px, log=True):
    """Nonzero cells in ``N_LEVELS`` colors; horizontal runs of one level share
    a subpath, one ``<path>`` per level, in cell units under a scale transform."""
    m = np.asarray(matrix, dtype=float)
    rows, cols = m.shape
    if m.size == 0:
        return
    v = np.log1p(m) if log else m
    top = v.max()
    cw, ch = PLOT_W / cols, PLOT_H / rows
    i, j = np.nonzero(m > 0)
    if i.size:
        t = v[i, j] / top if top > 0 else np.zeros(i.size)
        lev = np.minimum((t * N_LEVELS).astype(np.int64), N_LEVELS - 1)
        # a run continues while row, level and column adjacency all hold
        cont = np.zeros(i.size, bool)
        cont[1:] = (i[1:] == i[:-1]) & (j[1:] == j[:-1] + 1) & (lev[1:] == lev[:-1])
        starts = np.flatnonzero(~cont)
        lengths = np.diff(np.append(starts, i.size))
        ri, rj, rl, rv = i[starts], j[starts], lengths, lev[starts]
        svg.add(f'<g transform="translate({MARGIN_L} {MARGIN_T}) scale({_fmt6(cw)} {_fmt6(ch)})" '
                f'shape-rendering="crispEdges">')
        for k in np.unique(rv).tolist():
            sel = rv == k
            d = "".join(f"M{a} {b}h{c}v1h-{c}z" for a, b, c in zip(
                rj[sel].tolist(), ri[sel].tolist(), rl[sel].tolist()))
            svg.add(f'<path fill="{_PALETTE[k]}" d="{d}"/>')
        svg.add("</g>")
    for b in boundaries_px:
        x = MARGIN_L + b * cw
        svg.add(f'<line x1="{_fmt(x)}" y1="{MARGIN_T}" x2="{_fmt(x)}" y2="{MARGIN_T + PLOT_H}" '
                f'stroke="#ff0000" stroke-width="0.5"/>')


def _fmt6(x: float) -> str:
    return f"{x:.6f}"


def render_spectrogram_svg(spec, path, title: str = "graphlet spectrogram",
                           max_columns: int = 1024) -> int:
    """Rows d1..d4; columns pooled (max) into at most ``max_columns`` pixels."""
    svg = _Svg(title)
    svg.axes("vertices (display order)", "graphlet sigma1..sigma4")
    m = spec.matrix
    n = m.shape[1]
    if n:
        b = max(1, math.ceil(n / max_columns))
        nb = math.ceil(n / b)
        pad = np.zeros((m.shape[0], nb * b), dtype=m.dtype)
        pad[:, :n] = m
        pooled = pad.reshape(m.shape[0], nb, b).max(axis=2)
        bounds = [int(x) / b for x in spec.cohort_boundaries[1:-1]] if spec.cohort_boundaries.size else []
        _heat_cells(svg, pooled, bounds)
    return svg.write(path)


def render_heatmap_svg(counts, path, boundaries=(), block_size: int = 1,
                       title: str = "adjacency") -> int:
    svg = _Svg(title)
    svg.axes("author (display order)", "author (display order)")
    counts = np.asarray(counts)
    if counts.size:
        _heat_cells(svg, counts, [b / block_size for b in list(boundaries)[1:-1]])
    return svg.write(path)
