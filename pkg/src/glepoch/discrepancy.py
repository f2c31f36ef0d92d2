"""Topological discrepancy between two collaboration networks.

Per vertex, graphlet vectors in a network and in the intersection of the
two networks are compared by relative difference and collapsed with a
weighted power (Hölder) mean. Vertex values are averaged per cohort, cohort
values are combined with size-proportional weights, and the two sides are
averaged into a symmetric scalar ``eta``; ``1 - eta`` is the agreement.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import logsumexp

from .graph_core import CollabGraph, graph_intersection
from .graphlet import N_GRAPHLETS, transform

N_COHORTS = 7


@dataclass(frozen=True)
class DiscrepancyConfig:
    """``holder_p`` may be any real or +-inf; ``p = 0`` is the geometric mean.

    Weights are renormalized over the included graphlets.
    """

    holder_p: float = 1.0
    graphlet_weights: tuple = (1.0,) * N_GRAPHLETS
    include_sigma0: bool = True

    def __post_init__(self):
        w = np.asarray(self.graphlet_weights, dtype=float)
        if w.shape != (N_GRAPHLETS,) or (w < 0).any() or not np.isfinite(w).all():
            raise ValueError("graphlet_weights must be 5 finite non-negative numbers")
        if math.isnan(self.holder_p):
            raise ValueError("holder_p is NaN")
        if self.weights().sum() == 0:
            raise ValueError("all included graphlets have zero weight")

    def weights(self) -> np.ndarray:
        w = np.asarray(self.graphlet_weights, dtype=float).copy()
        if not self.include_sigma0:
            w[0] = 0.0
        s = w.sum()
        return w / s if s > 0 else w


def rdiff(a, b) -> np.ndarray:
    """Elementwise ``|a - b| / (a + b)``; slots where both are zero give 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    den = a + b
    out = np.zeros(np.broadcast(a, b).shape)
    np.divide(np.abs(a - b), den, out=out, where=den > 0)
    return out


def holder_mean(x, weights, p: float) -> np.ndarray:
    """Weighted power mean of ``|x|`` along the last axis."""
    x = np.abs(np.asarray(x, dtype=float))
    w = np.asarray(weights, dtype=float)
    active = w > 0
    xs, ws = x[..., active], w[active]
    if p == math.inf:
        return xs.max(axis=-1)
    if p == -math.inf:
        return xs.min(axis=-1)
    if p == 0:
        with np.errstate(divide="ignore"):
            logs = np.where(xs > 0, np.log(np.where(xs > 0, xs, 1.0)), -np.inf)
        return np.exp((logs * ws).sum(axis=-1))
    if xs.shape[-1] == 0:
        return np.zeros(xs.shape[:-1])
    if p == 1:
        return (xs * ws).sum(axis=-1)
    lo, hi = xs.min(axis=-1), xs.max(axis=-1)
    # log domain: subnormal or tiny entries cannot overflow x**p
    with np.errstate(divide="ignore"):
        logs = np.log(xs)
    if p < 0:
        zero = lo == 0
        logs = np.where(xs > 0, logs, 0.0)
    m = np.exp(logsumexp(p * logs, axis=-1, b=np.broadcast_to(ws, logs.shape)) / p)
    if p < 0:
        m = np.where(zero, 0.0, m)
    # rounding may step outside [min, max]
    return np.clip(m, lo, hi)


def align_field(keys_from, keys_to, field_to) -> np.ndarray:
    """Rows of ``field_to`` looked up by global key; absent keys give zeros."""
    keys_from = np.asarray(keys_from)
    out = np.zeros((keys_from.size, N_GRAPHLETS), dtype=np.int64)
    if keys_to.size == 0 or keys_from.size == 0:
        return out
    order = np.argsort(keys_to, kind="stable")
    sk = keys_to[order]
    pos = np.searchsorted(sk, keys_from)
    pos_c = np.minimum(pos, sk.size - 1)
    hit = sk[pos_c] == keys_from
    out[hit] = field_to[order[pos_c[hit]]]
    return out


def node_eta(field_x, field_z_aligned, cfg: DiscrepancyConfig | None = None) -> np.ndarray:
    """Per-vertex discrepancy for vertices of one side.

    ``field_z_aligned`` must already be row-aligned with ``field_x`` (zero
    rows for vertices missing from the intersection graph).
    """
    cfg = cfg or DiscrepancyConfig()
    return holder_mean(rdiff(field_x, field_z_aligned), cfg.weights(), cfg.holder_p)


def cohort_eta(values) -> float:
    """Compensated arithmetic mean; an empty cohort yields 0."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    return math.fsum(values.tolist()) / values.size


def cohort_weights(sizes) -> np.ndarray:
    """Aggregation weights ``|X_i| / |V|``."""
    sizes = np.asarray(sizes, dtype=float)
    total = sizes.sum()
    return sizes / total if total > 0 else np.zeros_like(sizes)


def side_eta(node_values, cohort) -> tuple[float, np.ndarray, np.ndarray]:
    """Combine vertex values by cohort 1..7.

    Returns ``(eta_side, weights, cohort_etas)``; empty cohorts get weight 0.
    """
    node_values = np.asarray(node_values, dtype=float)
    cohort = np.asarray(cohort)
    sizes = np.array([np.count_nonzero(cohort == i) for i in range(1, N_COHORTS + 1)])
    if sizes.sum() != node_values.size:
        raise ValueError("cohort labels must cover every vertex with labels 1..7")
    etas = np.array([cohort_eta(node_values[cohort == i]) for i in range(1, N_COHORTS + 1)])
    w = cohort_weights(sizes)
    return math.fsum((w * etas).tolist()), w, etas


@dataclass
class DiscrepancyReport:
    node_eta_x: np.ndarray
    node_eta_y: np.ndarray
    cohort_eta_x: np.ndarray
    cohort_eta_y: np.ndarray
    weights_x: np.ndarray
    weights_y: np.ndarray
    eta_x: float
    eta_y: float
    eta: float
    intersection_size: int
    intersection_edges: int
    config: DiscrepancyConfig = field(default_factory=DiscrepancyConfig)
    labels: tuple = ("x", "y")

    @property
    def agreement(self) -> float:
        return 1.0 - self.eta

    def to_dict(self, include_nodes: bool = True) -> dict:
        cfg = asdict(self.config)
        cfg["graphlet_weights"] = list(cfg["graphlet_weights"])
        if math.isinf(cfg["holder_p"]):
            cfg["holder_p"] = "inf" if cfg["holder_p"] > 0 else "-inf"
        d = {
            "x": self.labels[0],
            "y": self.labels[1],
            "config": cfg,
            "eta": self.eta,
            "agreement": self.agreement,
            "eta_x": self.eta_x,
            "eta_y": self.eta_y,
            "cohort_eta_x": self.cohort_eta_x.tolist(),
            "cohort_eta_y": self.cohort_eta_y.tolist(),
            "weights_x": self.weights_x.tolist(),
            "weights_y": self.weights_y.tolist(),
            "intersection_size": self.intersection_size,
            "intersection_edges": self.intersection_edges,
        }
        if include_nodes:
            d["node_eta_x"] = self.node_eta_x.tolist()
            d["node_eta_y"] = self.node_eta_y.tolist()
        return d

    def write_json(self, path, include_nodes: bool = True) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(include_nodes), fh, indent=2)
            fh.write("\n")


def network_eta(gx: CollabGraph, gy: CollabGraph, cohort_x=None, cohort_y=None,
                cfg: DiscrepancyConfig | None = None, *, field_x=None, field_y=None,
                labels=("x", "y"), threads=None) -> DiscrepancyReport:
    """Symmetric discrepancy between two networks over a shared author space.

    Missing cohort labels put every vertex of that side in cohort 1.
    Precomputed graphlet fields may be passed to skip their transforms.
    """
    cfg = cfg or DiscrepancyConfig()
    cx = np.ones(gx.n_vertices, np.int64) if cohort_x is None else np.asarray(cohort_x)
    cy = np.ones(gy.n_vertices, np.int64) if cohort_y is None else np.asarray(cohort_y)
    fx = transform(gx, threads) if field_x is None else field_x
    fy = transform(gy, threads) if field_y is None else field_y
    gz = graph_intersection(gx, gy)
    fz = transform(gz, threads)
    ex = node_eta(fx, align_field(gx.vertex_key, gz.vertex_key, fz), cfg)
    ey = node_eta(fy, align_field(gy.vertex_key, gz.vertex_key, fz), cfg)
    eta_x, wx, cex = side_eta(ex, cx)
    eta_y, wy, cey = side_eta(ey, cy)
    return DiscrepancyReport(ex, ey, cex, cey, wx, wy, eta_x, eta_y,
                             eta_x / 2 + eta_y / 2, gz.n_vertices, gz.n_edges, cfg,
                             tuple(labels))


def pairwise_table(networks, cfg: DiscrepancyConfig | None = None, fields=None,
                   threads=None):
    """All-pairs comparison.

    ``networks`` holds CollabNetwork-like objects (``label``, ``graph``,
    ``cohort``). Returns ``(agreement, intersection_sizes, reports)`` where
    ``reports[(i, j)]`` (i < j) is the report with network i as the x side.
    """
    n = len(networks)
    if n < 1:
        raise ValueError("need at least one network")
    if fields is None:
        fields = [transform(net.graph, threads) for net in networks]
    agree = np.ones((n, n))
    inter = np.zeros((n, n), dtype=np.int64)
    reports = {}
    for i in range(n):
        inter[i, i] = networks[i].graph.n_vertices
        for j in range(i + 1, n):
            r = network_eta(networks[i].graph, networks[j].graph,
                            networks[i].cohort, networks[j].cohort, cfg,
                            field_x=fields[i], field_y=fields[j],
                            labels=(networks[i].label, networks[j].label), threads=threads)
            reports[(i, j)] = r
            agree[i, j] = agree[j, i] = r.agreement
            inter[i, j] = inter[j, i] = r.intersection_size
    return agree, inter, reports


def write_pairwise_csv(labels, agree, inter, path, digits: int = 6) -> None:
    """Agreement in the upper triangle, intersection sizes in the lower,
    ``-`` on the diagonal."""
    n = len(labels)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(labels))
        for i in range(n):
            row = [labels[i]]
            for j in range(n):
                if i == j:
                    row.append("1.0" if n == 1 else "-")
                elif j > i:
                    row.append(f"{agree[i, j]:.{digits}f}")
                else:
                    row.append(str(int(inter[i, j])))
            w.writerow(row)


def target_cohort_table(target: int, labels, reports) -> dict:
    """Cohort-level agreements with one network as the comparison target.

    Returns ``weights`` (target cohort weights), ``agreement`` (7 x refs,
    ``1 - eta(X_i, G_z)``), ``side_agreement`` (``1 - eta_X`` per reference)
    and ``refs`` (reference labels).
    """
    refs, cols, sides, weights = [], [], [], None
    for j in range(len(labels)):
        if j == target:
            continue
        if (target, j) in reports:
            r = reports[(target, j)]
            ce, w, e = r.cohort_eta_x, r.weights_x, r.eta_x
        else:
            r = reports[(j, target)]
            ce, w, e = r.cohort_eta_y, r.weights_y, r.eta_y
        weights = w
        refs.append(labels[j])
        cols.append(np.where(w > 0, 1.0 - ce, np.nan))
        sides.append(1.0 - e)
    agreement = np.column_stack(cols) if cols else np.zeros((N_COHORTS, 0))
    return {"target": labels[target], "refs": refs, "weights": weights,
            "agreement": agreement, "side_agreement": np.array(sides)}


def write_target_cohort_csv(table: dict, path, digits: int = 6) -> None:
    """Rows: cohorts 1..7 then the side total; empty cohorts print ``-``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cohort", "weight"] + table["refs"])
        weights = table["weights"] if table["weights"] is not None else np.zeros(N_COHORTS)
        for i in range(N_COHORTS):
            cells = ["-" if np.isnan(v) else f"{v:.{digits}f}" for v in table["agreement"][i]]
            w.writerow([i + 1, f"{weights[i]:.{digits}f}"] + cells)
        w.writerow(["1-eta", ""] + [f"{v:.{digits}f}" for v in table["side_agreement"]])
