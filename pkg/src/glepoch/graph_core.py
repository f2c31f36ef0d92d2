"""Compressed sparse graph containers: citations, authorship, collaboration.

All structures use dense integer ids with CSR arrays whose neighbor lists
are sorted ascending. They are treated as immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse


class KeyIndex:
    """Bijection between opaque external string keys and 0..n-1."""

    def __init__(self, keys: Iterable[str] = ()):
        self._keys: list[str] = []
        self._ids: dict[str, int] = {}
        for k in keys:
            self.add(k)

    def add(self, key: str) -> int:
        i = self._ids.get(key)
        if i is None:
            i = len(self._keys)
            self._ids[key] = i
            self._keys.append(key)
        return i

    def id(self, key: str) -> int:
        return self._ids[key]

    def get(self, key: str, default=None):
        return self._ids.get(key, default)

    def key(self, i: int) -> str:
        return self._keys[i]

    @property
    def keys(self) -> list[str]:
        return self._keys

    def __contains__(self, key) -> bool:
        return key in self._ids

    def __len__(self) -> int:
        return len(self._keys)

    def __eq__(self, other) -> bool:
        return isinstance(other, KeyIndex) and self._keys == other._keys

    def __repr__(self) -> str:
        return f"KeyIndex(n={len(self)})"


def _csr_from_pairs(rows, cols, n_rows, n_cols):
    """Deduplicated pattern CSR with sorted indices, int64 arrays."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.size:
        code = np.unique(rows * n_cols + cols)
        rows, cols = np.divmod(code, n_cols)
    counts = np.bincount(rows, minlength=n_rows)
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, cols.astype(np.int64)


def parse_timestamp(text: str) -> int:
    """Parse ``YYYY`` or ``YYYY-MM`` into the packed form ``year*100 + month``.

    Year-only stamps carry month 0.
    """
    s = text.strip()
    try:
        if "-" in s:
            y, m = s.split("-", 1)
            year, month = int(y), int(m)
            if not 1 <= month <= 12:
                raise ValueError
        else:
            year, month = int(s), 0
    except ValueError:
        raise ValueError(f"unparseable timestamp {text!r}") from None
    if year < 0:
        raise ValueError(f"unparseable timestamp {text!r}")
    return year * 100 + month


def format_timestamp(t: int) -> str:
    year, month = divmod(int(t), 100)
    return f"{year}" if month == 0 else f"{year}-{month:02d}"


def time_order_key(t):
    """Comparable month-resolution key; a year-only stamp sorts as January."""
    t = np.asarray(t, dtype=np.int64)
    return t + (t % 100 == 0)


@dataclass(frozen=True, eq=False)
class CitationGraph:
    """Directed citation graph (citing -> cited) in CSR layout.

    ``pub_time`` holds packed timestamps (see :func:`parse_timestamp`).
    ``n_self_loops`` and ``n_duplicates`` record what was dropped at build time.
    """

    n_articles: int
    indptr: np.ndarray
    indices: np.ndarray
    pub_time: np.ndarray
    n_self_loops: int = 0
    n_duplicates: int = 0

    @property
    def n_edges(self) -> int:
        return int(self.indices.size)

    def cited_by(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edge_arrays(self):
        src = np.repeat(np.arange(self.n_articles, dtype=np.int64), np.diff(self.indptr))
        return src, self.indices

    def chronology_violations(self) -> int:
        """Edges whose cited article is timestamped after the citing one."""
        src, dst = self.edge_arrays()
        key = time_order_key(self.pub_time)
        return int(np.count_nonzero(key[dst] > key[src]))

    def to_scipy(self) -> sparse.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        return sparse.csr_matrix((data, self.indices, self.indptr),
                                 shape=(self.n_articles, self.n_articles))

    def __eq__(self, other) -> bool:
        return (isinstance(other, CitationGraph)
                and self.n_articles == other.n_articles
                and self.n_self_loops == other.n_self_loops
                and self.n_duplicates == other.n_duplicates
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.pub_time, other.pub_time))


def citation_graph_from_ids(n_articles, src, dst, pub_time) -> CitationGraph:
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    loops = src == dst
    n_loops = int(np.count_nonzero(loops))
    src, dst = src[~loops], dst[~loops]
    indptr, indices = _csr_from_pairs(src, dst, n_articles, n_articles)
    return CitationGraph(
        n_articles=int(n_articles),
        indptr=indptr,
        indices=indices,
        pub_time=np.asarray(pub_time, dtype=np.int64),
        n_self_loops=n_loops,
        n_duplicates=int(src.size - indices.size),
    )


def build_citation_graph(edges: Iterable[tuple[str, str]],
                         times: Mapping[str, object],
                         index: KeyIndex | None = None):
    """Build a citation graph from external keys.

    ``times`` maps every article key to a timestamp (packed int or a
    ``YYYY[-MM]`` string). Returns ``(graph, index, n_violations)``; self
    citations are dropped and counted in ``graph.n_self_loops``.
    """
    if index is None:
        index = KeyIndex(times.keys())
    pub = np.zeros(len(index), dtype=np.int64)
    for key, t in times.items():
        pub[index.id(key)] = parse_timestamp(t) if isinstance(t, str) else int(t)
    src, dst = [], []
    for citing, cited in edges:
        for k in (citing, cited):
            if k not in index:
                raise KeyError(f"unknown article key {k!r} in citation edge")
        src.append(index.id(citing))
        dst.append(index.id(cited))
    g = citation_graph_from_ids(len(index), src, dst, pub)
    return g, index, g.chronology_violations()


@dataclass(frozen=True, eq=False)
class Bipartite:
    """Article-author incidence with its transpose, both CSR."""

    n_articles: int
    n_authors: int
    art_indptr: np.ndarray
    art_indices: np.ndarray
    auth_indptr: np.ndarray
    auth_indices: np.ndarray

    @classmethod
    def from_pairs(cls, n_articles, n_authors, articles, authors) -> "Bipartite":
        a_ptr, a_idx = _csr_from_pairs(articles, authors, n_articles, n_authors)
        rows = np.repeat(np.arange(n_articles, dtype=np.int64), np.diff(a_ptr))
        u_ptr, u_idx = _csr_from_pairs(a_idx, rows, n_authors, n_articles)
        return cls(int(n_articles), int(n_authors), a_ptr, a_idx, u_ptr, u_idx)

    @property
    def n_links(self) -> int:
        return int(self.art_indices.size)

    def authors_of(self, article: int) -> np.ndarray:
        return self.art_indices[self.art_indptr[article]:self.art_indptr[article + 1]]

    def articles_of(self, author: int) -> np.ndarray:
        return self.auth_indices[self.auth_indptr[author]:self.auth_indptr[author + 1]]

    def to_scipy(self) -> sparse.csr_matrix:
        data = np.ones(self.art_indices.size, dtype=np.int32)
        return sparse.csr_matrix((data, self.art_indices, self.art_indptr),
                                 shape=(self.n_articles, self.n_authors))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Bipartite)
                and (self.n_articles, self.n_authors) == (other.n_articles, other.n_authors)
                and np.array_equal(self.art_indptr, other.art_indptr)
                and np.array_equal(self.art_indices, other.art_indices)
                and np.array_equal(self.auth_indptr, other.auth_indptr)
                and np.array_equal(self.auth_indices, other.auth_indices))


@dataclass(frozen=True, eq=False)
class CollabGraph:
    """Undirected simple collaboration graph over a subset of authors.

    Local vertex ``i`` stands for global author id ``vertex_key[i]``.
    ``weight`` counts shared articles per CSR slot; graphlet and
    discrepancy code ignores it.
    """

    indptr: np.ndarray
    indices: np.ndarray
    vertex_key: np.ndarray
    weight: np.ndarray | None = None

    @property
    def n_vertices(self) -> int:
        return int(self.vertex_key.size)

    @property
    def n_edges(self) -> int:
        return int(self.indices.size // 2)

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def _upper(self):
        src = np.repeat(np.arange(self.n_vertices, dtype=np.int64), self.degree())
        return src, src < self.indices

    def edge_list(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array of local ids with ``u < v``."""
        src, keep = self._upper()
        return np.column_stack([src[keep], self.indices[keep]])

    def key_edges(self) -> np.ndarray:
        """Edges keyed by global author id, ``(m, 2)`` with first < second."""
        e = self.vertex_key[self.edge_list()]
        return np.sort(e, axis=1) if e.size else e.reshape(0, 2)

    def to_scipy(self) -> sparse.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        n = self.n_vertices
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def permute(self, order: Sequence[int]) -> "CollabGraph":
        """Relabel so that new vertex ``i`` is old vertex ``order[i]``."""
        order = np.asarray(order, dtype=np.int64)
        inv = np.empty_like(order)
        inv[order] = np.arange(order.size)
        e = self.edge_list()
        w = None if self.weight is None else self.weight[self._upper()[1]]
        return collab_from_edges(self.vertex_key[order], inv[e[:, 0]], inv[e[:, 1]], w)

    def weighted_scipy(self) -> sparse.csr_matrix:
        """Adjacency with shared-article weights (1 where weights are absent)."""
        data = np.ones(self.indices.size, np.int64) if self.weight is None else self.weight
        n = self.n_vertices
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def same_as(self, other: "CollabGraph") -> bool:
        """Identical vertex keys, adjacency and weights."""
        return (np.array_equal(self.vertex_key, other.vertex_key)
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and ((self.weight is None and other.weight is None)
                     or (self.weight is not None and other.weight is not None
                         and np.array_equal(self.weight, other.weight))))


def collab_from_edges(vertex_key, u, v, weight=None) -> CollabGraph:
    """Symmetric CSR from local edge endpoints. Loops dropped, duplicates merged
    (weights summed)."""
    vertex_key = np.asarray(vertex_key, dtype=np.int64)
    n = vertex_key.size
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    w = np.ones(u.size, dtype=np.int64) if weight is None else np.asarray(weight, dtype=np.int64)
    keep = u != v
    u, v, w = u[keep], v[keep], w[keep]
    A = sparse.coo_matrix((np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                          shape=(n, n)).tocsr()
    A.sum_duplicates()
    A.sort_indices()
    return CollabGraph(A.indptr.astype(np.int64), A.indices.astype(np.int64), vertex_key,
                       A.data.astype(np.int64))


def project_collaboration(bip: Bipartite, article_subset) -> CollabGraph:
    """Co-authorship graph induced by a subset of articles.

    Vertices are the authors of at least one chosen article, in ascending
    author id; edge weights count the chosen articles two authors share.
    """
    subset = np.unique(np.asarray(list(article_subset) if not isinstance(article_subset, np.ndarray)
                                  else article_subset, dtype=np.int64))
    if subset.size and (subset[0] < 0 or subset[-1] >= bip.n_articles):
        raise IndexError("article subset outside bipartite range")
    B = bip.to_scipy()[subset]
    authors = np.unique(B.indices).astype(np.int64)
    if authors.size == 0:
        return CollabGraph(np.zeros(1, np.int64), np.zeros(0, np.int64),
                           np.zeros(0, np.int64), np.zeros(0, np.int64))
    B = B[:, authors].astype(np.int64)
    C = (B.T @ B).tocsr()
    C.setdiag(0)
    C.eliminate_zeros()
    C.sort_indices()
    return CollabGraph(C.indptr.astype(np.int64), C.indices.astype(np.int64),
                       authors, C.data.astype(np.int64))


def graph_intersection(gx: CollabGraph, gy: CollabGraph) -> CollabGraph:
    """``(Vx & Vy, Ex & Ey)`` by global author key. Weights take the minimum."""
    keys = np.intersect1d(gx.vertex_key, gy.vertex_key)
    if keys.size == 0:
        return CollabGraph(np.zeros(1, np.int64), np.zeros(0, np.int64),
                           keys.astype(np.int64), np.zeros(0, np.int64))

    def restricted(g):
        # rows/cols of the shared vertices, in ascending key order
        o = np.argsort(g.vertex_key, kind="stable")
        local = o[np.searchsorted(g.vertex_key[o], keys)]
        return g.weighted_scipy()[local][:, local]

    Z = restricted(gx).minimum(restricted(gy)).tocsr()
    Z.eliminate_zeros()
    Z.sort_indices()
    return CollabGraph(Z.indptr.astype(np.int64), Z.indices.astype(np.int64),
                       keys.astype(np.int64), Z.data.astype(np.int64))
