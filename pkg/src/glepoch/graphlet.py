"""Exact per-vertex graphlet frequencies over the five-graphlet dictionary.

Columns of a field are ``d0..d4``:

    d0  singleton (always 1)
    d1  edge (degree)
    d2  bi-fork K_{1,2}, counted at the center
    d3  2-path, counted at an endpoint
    d4  triangle

d2 and d3 are induced counts: wedges closed by a third edge count as
triangles only.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import os

import numba
import numpy as np

from .graph_core import CollabGraph

N_GRAPHLETS = 5

if "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe, which warns when the installed TBB is too old
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@numba.njit(cache=True, nogil=True)
def _oriented_triangles(out_ptr, out_idx, second, third, lo, hi):
    # out(u) holds the neighbors of higher rank. Triangle u<v<w (by rank) is
    # found once at u: second[slot(u,v)] and third[slot(u,w)] are both slots
    # of u, so threads over disjoint u ranges never write the same cell.
    n = out_ptr.size - 1
    mark = np.zeros(n, dtype=np.int64)   # slot of w in out(u), plus one
    for u in range(lo, hi):
        a0, a1 = out_ptr[u], out_ptr[u + 1]
        for s in range(a0, a1):
            mark[out_idx[s]] = s + 1
        for s in range(a0, a1):
            v = out_idx[s]
            for t in range(out_ptr[v], out_ptr[v + 1]):
                m = mark[out_idx[t]]
                if m:
                    second[s] += 1
                    third[m - 1] += 1
        for s in range(a0, a1):
            mark[out_idx[s]] = 0


@numba.njit(parallel=True, cache=True)
def _oriented_triangles_parallel(out_ptr, out_idx, second, third, chunks):
    for c in numba.prange(chunks.size - 1):
        _oriented_triangles(out_ptr, out_idx, second, third, chunks[c], chunks[c + 1])


def _orient(g: CollabGraph):
    """Out-lists keeping only neighbors of higher (degree, id) rank."""
    n = g.n_vertices
    deg = g.degree()
    order = np.lexsort((np.arange(n), deg))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    src = np.repeat(np.arange(n, dtype=np.int64), deg)
    keep = rank[g.indices] > rank[src]
    out_idx = g.indices[keep]
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src[keep], minlength=n), out=out_ptr[1:])
    return out_ptr, out_idx, src[keep]


def triangle_counts(g: CollabGraph, threads: int | None = None) -> np.ndarray:
    """Triangles incident to each vertex (int64)."""
    n = g.n_vertices
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    out_ptr, out_idx, out_src = _orient(g)
    second = np.zeros(out_idx.size, dtype=np.int64)
    third = np.zeros(out_idx.size, dtype=np.int64)
    if threads is not None and threads > 1 and n > 1:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
        # balance chunks by out-degree work
        work = np.cumsum(np.diff(out_ptr) + 1)
        n_chunks = 8 * threads
        cuts = np.searchsorted(work, np.linspace(0, work[-1], n_chunks + 1)[1:-1])
        chunks = np.unique(np.concatenate([[0], cuts, [n]])).astype(np.int64)
        _oriented_triangles_parallel(out_ptr, out_idx, second, third, chunks)
    else:
        _oriented_triangles(out_ptr, out_idx, second, third, 0, n)
    # lowest vertex: once per (u, v) hit; middle: via second; highest: via third
    d4 = np.bincount(out_src, weights=second, minlength=n)
    d4 += np.bincount(out_idx, weights=second, minlength=n)
    d4 += np.bincount(out_idx, weights=third, minlength=n)
    return np.rint(d4).astype(np.int64)


def transform_raw(g: CollabGraph) -> np.ndarray:
    """Non-induced counts ``[d0, d1, C(d1,2), sum_{u in N(v)} (deg u - 1)]``."""
    deg = g.degree().astype(np.int64)
    raw = np.empty((g.n_vertices, 4), dtype=np.int64)
    raw[:, 0] = 1
    raw[:, 1] = deg
    raw[:, 2] = deg * (deg - 1) // 2
    cs = np.zeros(g.indices.size + 1, dtype=np.int64)
    np.cumsum(deg[g.indices] - 1, out=cs[1:])
    raw[:, 3] = cs[g.indptr[1:]] - cs[g.indptr[:-1]]
    return raw


def transform(g: CollabGraph, threads: int | None = None, check: bool = True) -> np.ndarray:
    """Graphlet field of ``g`` as an ``(n, 5)`` int64 array, one row per vertex."""
    raw = transform_raw(g)
    d4 = triangle_counts(g, threads)
    field = np.empty((g.n_vertices, N_GRAPHLETS), dtype=np.int64)
    field[:, :2] = raw[:, :2]
    field[:, 2] = raw[:, 2] - d4
    field[:, 3] = raw[:, 3] - 2 * d4
    field[:, 4] = d4
    if check:
        check_invariants(g, field)
    return field


def check_invariants(g: CollabGraph, field: np.ndarray) -> None:
    """Raise AssertionError unless the field satisfies the counting identities."""
    deg = g.degree().astype(np.int64)
    d0, d1, d2, d3, d4 = field.T
    if not (d0 == 1).all():
        raise AssertionError("d0 != 1")
    if not np.array_equal(d1, deg):
        raise AssertionError("d1 != degree")
    if not np.array_equal(d2 + d4, d1 * (d1 - 1) // 2):
        raise AssertionError("d2 + d4 != C(d1, 2)")
    nb = np.zeros(g.n_vertices, dtype=np.int64)
    if g.indices.size:
        src = np.repeat(np.arange(g.n_vertices), deg)
        nb = np.bincount(src, weights=deg[g.indices] - 1, minlength=g.n_vertices).astype(np.int64)
    if not np.array_equal(d3, nb - 2 * d4):
        raise AssertionError("d3 != sum(deg(u)-1) - 2 d4")
    if d1.sum() != 2 * g.n_edges or d4.sum() % 3:
        raise AssertionError("global edge/triangle totals inconsistent")
    if (field < 0).any():
        raise AssertionError("negative count")


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """Rows ``d1..d4`` (singleton row omitted) by vertices in display order."""

    matrix: np.ndarray
    vertex_order: np.ndarray
    cohort_boundaries: np.ndarray


def spectrogram(field: np.ndarray, order=None, boundaries=None) -> Spectrogram:
    n = field.shape[0]
    order = np.arange(n) if order is None else np.asarray(order, dtype=np.int64)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError("order is not a permutation of the vertices")
    b = np.zeros(0, np.int64) if boundaries is None else np.asarray(boundaries, dtype=np.int64)
    return Spectrogram(field[order, 1:].T.copy(), order, b)


def export_spectrogram(spec: Spectrogram, vertex_keys, cohort, csv_path, json_path=None) -> None:
    """CSV ``vertex_key,cohort,d1,d2,d3,d4`` in display order, plus a JSON
    sidecar with the cohort boundaries."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex_key", "cohort", "d1", "d2", "d3", "d4"])
        cols = spec.matrix.T
        for j, v in enumerate(spec.vertex_order.tolist()):
            w.writerow([vertex_keys[v], int(cohort[v]), *cols[j].tolist()])
    if json_path is None:
        json_path = csv_path.with_suffix(".json")
    labels = sorted({int(c) for c in np.asarray(cohort).tolist()}) if len(cohort) else []
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump({"n_vertices": int(spec.vertex_order.size),
                   "cohort_boundaries": spec.cohort_boundaries.tolist(),
                   "cohorts_present": labels}, fh, indent=2)
        fh.write("\n")
