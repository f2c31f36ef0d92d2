"""Corpus I/O: tab-separated input files, a binary cache, and a synthetic
preferential-attachment corpus generator."""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph_core import (
    Bipartite,
    CitationGraph,
    KeyIndex,
    citation_graph_from_ids,
    format_timestamp,
    parse_timestamp,
)

CACHE_MAGIC = b"LGC1"
CACHE_VERSION = 1
CACHE_ENV = "GLEPOCH_CACHE_DIR"

ARTICLES_FILE = "articles.tsv"
CITATIONS_FILE = "citations.tsv"
AUTHORSHIP_FILE = "authorship.tsv"


class CorpusError(ValueError):
    """Malformed or inconsistent corpus input."""


class CacheError(ValueError):
    """Unreadable cache file (bad magic, version or checksum)."""


@dataclass(frozen=True, eq=False)
class LiteratureGraph:
    citations: CitationGraph
    authorship: Bipartite
    articles: KeyIndex
    authors: KeyIndex

    @property
    def pub_time(self) -> np.ndarray:
        return self.citations.pub_time

    @property
    def n_articles(self) -> int:
        return self.citations.n_articles

    @property
    def n_authors(self) -> int:
        return self.authorship.n_authors

    def summary(self) -> dict:
        """Counts in the sense of ``#Articles, #Authors, #Links`` where a link
        is one article-author incidence."""
        return {
            "articles": self.n_articles,
            "authors": self.n_authors,
            "links": self.authorship.n_links,
            "citations": self.citations.n_edges,
            "chronology_violations": self.citations.chronology_violations(),
            "self_citations_dropped": self.citations.n_self_loops,
        }

    def __eq__(self, other) -> bool:
        return (isinstance(other, LiteratureGraph)
                and self.citations == other.citations
                and self.authorship == other.authorship
                and self.articles == other.articles
                and self.authors == other.authors)


def _read_pairs(path: Path, what: str):
    """Yield ``(lineno, first, second)`` from a two-column TSV file."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise CorpusError(f"{path}:{lineno}: malformed {what} line {line!r}")
            yield lineno, parts[0], parts[1]


def load_corpus(articles_path, citations_path, authorship_path) -> LiteratureGraph:
    """Parse and validate the three corpus files.

    Authors are indexed in order of first appearance in the authorship file.
    """
    paths = [Path(p) for p in (articles_path, citations_path, authorship_path)]
    for p in paths:
        if not p.is_file():
            raise FileNotFoundError(f"missing corpus file: {p}")
    a_path, c_path, w_path = paths

    articles = KeyIndex()
    times = []
    for lineno, key, stamp in _read_pairs(a_path, "article"):
        if key in articles:
            raise CorpusError(f"{a_path}:{lineno}: duplicate article {key!r}")
        try:
            times.append(parse_timestamp(stamp))
        except ValueError as exc:
            raise CorpusError(f"{a_path}:{lineno}: {exc}") from None
        articles.add(key)

    src, dst = [], []
    for lineno, citing, cited in _read_pairs(c_path, "citation"):
        for k in (citing, cited):
            if k not in articles:
                raise CorpusError(f"{c_path}:{lineno}: unknown article {k!r}")
        src.append(articles.id(citing))
        dst.append(articles.id(cited))
    citations = citation_graph_from_ids(len(articles), src, dst, times)

    authors = KeyIndex()
    arts, auths = [], []
    for lineno, art, auth in _read_pairs(w_path, "authorship"):
        i = articles.get(art)
        if i is None:
            raise CorpusError(f"{w_path}:{lineno}: unknown article {art!r}")
        arts.append(i)
        auths.append(authors.add(auth))
    bip = Bipartite.from_pairs(len(articles), len(authors), arts, auths)
    return LiteratureGraph(citations, bip, articles, authors)


def load_corpus_dir(directory) -> LiteratureGraph:
    d = Path(directory)
    return load_corpus(d / ARTICLES_FILE, d / CITATIONS_FILE, d / AUTHORSHIP_FILE)


def write_corpus(lg: LiteratureGraph, directory) -> None:
    """Write the three TSV files that :func:`load_corpus_dir` reads back.

    Authorship lines are ordered so that authors first appear in id order,
    keeping the round trip exact.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    akeys = lg.articles.keys
    with open(d / ARTICLES_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for k, t in zip(akeys, lg.pub_time):
            fh.write(f"{k}\t{format_timestamp(t)}\n")
    src, dst = lg.citations.edge_arrays()
    with open(d / CITATIONS_FILE, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{akeys[s]}\t{akeys[t]}\n" for s, t in zip(src.tolist(), dst.tolist()))
    bip = lg.authorship
    ukeys = lg.authors.keys
    # first article of each author, in author id order, then the remaining links
    first = bip.auth_indices[bip.auth_indptr[:-1]] if bip.n_authors else np.zeros(0, np.int64)
    rows = np.repeat(np.arange(bip.n_authors, dtype=np.int64), np.diff(bip.auth_indptr))
    is_first = np.zeros(rows.size, dtype=bool)
    is_first[bip.auth_indptr[:-1][np.diff(bip.auth_indptr) > 0]] = True
    with open(d / AUTHORSHIP_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for u, a in zip(range(bip.n_authors), first.tolist()):
            fh.write(f"{akeys[a]}\t{ukeys[u]}\n")
        for u, a in zip(rows[~is_first].tolist(), bip.auth_indices[~is_first].tolist()):
            fh.write(f"{akeys[a]}\t{ukeys[u]}\n")


# -- binary cache -----------------------------------------------------------

_HEAD = struct.Struct("<4sQQQQQQQ")


def _strings_blob(keys) -> bytes:
    return "\n".join(keys).encode("utf-8")


def save_cache(lg: LiteratureGraph, path) -> None:
    """Write ``LGC1`` cache: header, CSR arrays, string tables, checksum.

    Header fields (little-endian u64): version, n_articles, n_authors,
    n_citations, n_links, self-loops dropped, duplicates dropped.
    """
    c, b = lg.citations, lg.authorship
    buf = io.BytesIO()
    buf.write(_HEAD.pack(CACHE_MAGIC, CACHE_VERSION, c.n_articles, b.n_authors,
                         c.n_edges, b.n_links, c.n_self_loops, c.n_duplicates))
    for arr in (c.pub_time, c.indptr, c.indices, b.art_indptr, b.art_indices):
        buf.write(np.ascontiguousarray(arr, dtype="<i8").tobytes())
    for keys in (lg.articles.keys, lg.authors.keys):
        blob = _strings_blob(keys)
        buf.write(struct.pack("<Q", len(blob)))
        buf.write(blob)
    body = buf.getvalue()
    digest = hashlib.blake2b(body, digest_size=8).digest()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(digest)


def load_cache(path) -> LiteratureGraph:
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != CACHE_MAGIC:
        raise CacheError(f"{path}: not an LGC1 cache file")
    if len(data) < _HEAD.size + 8:
        raise CacheError(f"{path}: checksum failure (truncated)")
    body, digest = data[:-8], data[-8:]
    if hashlib.blake2b(body, digest_size=8).digest() != digest:
        raise CacheError(f"{path}: checksum failure")
    _, version, n_art, n_auth, n_cit, n_links, n_loops, n_dup = _HEAD.unpack_from(body)
    if version != CACHE_VERSION:
        raise CacheError(f"{path}: cache version {version}, expected {CACHE_VERSION}")
    off = _HEAD.size

    def take(n):
        nonlocal off
        arr = np.frombuffer(body, dtype="<i8", count=n, offset=off).astype(np.int64)
        off += 8 * n
        return arr

    pub = take(n_art)
    c_ptr, c_idx = take(n_art + 1), take(n_cit)
    a_ptr, a_idx = take(n_art + 1), take(n_links)
    tables = []
    for n in (n_art, n_auth):
        (size,) = struct.unpack_from("<Q", body, off)
        off += 8
        text = body[off:off + size].decode("utf-8")
        off += size
        tables.append(text.split("\n") if n else [])
    citations = CitationGraph(int(n_art), c_ptr, c_idx, pub, int(n_loops), int(n_dup))
    rows = np.repeat(np.arange(n_art, dtype=np.int64), np.diff(a_ptr))
    bip = Bipartite.from_pairs(n_art, n_auth, rows, a_idx)
    return LiteratureGraph(citations, bip, KeyIndex(tables[0]), KeyIndex(tables[1]))


# -- synthetic corpora ------------------------------------------------------

TEAM_SIZE_KINDS = ("fixed", "poisson", "geometric", "zipf")


def _team_sizes(rng, n, dist):
    kind, param = dist
    if kind not in TEAM_SIZE_KINDS:
        raise ValueError(f"unknown team size distribution {kind!r}")
    param = float(param)
    if kind == "fixed":
        if param < 1 or param != int(param):
            raise ValueError("fixed team size must be a positive integer")
        return np.full(n, int(param), dtype=np.int64)
    if kind == "poisson":
        if param < 1:
            raise ValueError("poisson team size mean must be >= 1")
        return 1 + rng.poisson(param - 1, n)
    if kind == "geometric":
        if param < 1:
            raise ValueError("geometric team size mean must be >= 1")
        return rng.geometric(1.0 / param, n).astype(np.int64)
    if param <= 1:
        raise ValueError("zipf team size exponent must be > 1")
    return rng.zipf(param, n).astype(np.int64)


def generate_synthetic(n_articles: int,
                       span_years: int = 20,
                       attach_exponent: float = 2.7,
                       authors_per_article=("geometric", 6.5),
                       seed: int = 0,
                       *,
                       refs_per_article: float = 8.0,
                       new_author_prob: float = 0.4,
                       start_year: int = 2000,
                       team_size_cap: int | None = None) -> LiteratureGraph:
    """Grow a corpus by preferential attachment, month by month.

    Articles get non-decreasing year-month stamps spread over ``span_years``.
    Each article cites earlier-month articles chosen with probability
    proportional to ``citations received + offset`` and draws a team whose
    slots are new authors with ``new_author_prob`` or else returning authors
    picked in proportion to their article count (with a uniform admixture).
    ``attach_exponent`` is the target power-law exponent of the resulting
    degree distributions; it sets the Price offset for citations and the
    preferential share for author reuse.

    ``team_size_cap`` truncates larger teams, mimicking per-record author
    limits in bibliographic databases.
    """
    if n_articles < 1:
        raise ValueError("n_articles must be >= 1")
    if span_years < 1:
        raise ValueError("span_years must be >= 1")
    if attach_exponent <= 2:
        raise ValueError("attach_exponent must be > 2")
    if not 0 < new_author_prob < 1:
        raise ValueError("new_author_prob must lie in (0, 1)")
    if refs_per_article < 0:
        raise ValueError("refs_per_article must be >= 0")
    if team_size_cap is not None and team_size_cap < 1:
        raise ValueError("team_size_cap must be >= 1")
    rng = np.random.default_rng(seed)

    n_months = 12 * span_years
    month = (np.arange(n_articles, dtype=np.int64) * n_months) // n_articles
    year, mon = np.divmod(month, 12)
    pub = (start_year + year) * 100 + mon + 1

    # Price model: P(cite j) ~ k_j + a gives exponent 2 + a/m.
    m = max(refs_per_article, 1e-9)
    offset = (attach_exponent - 2.0) * m
    p_pref_cite = 1.0 / (1.0 + offset / m) if refs_per_article > 0 else 0.0

    # Simon-type reuse: exponent ~ 1 + 1/((1-q) * lam).
    q = new_author_prob
    lam = min(1.0, 1.0 / ((attach_exponent - 1.0) * (1.0 - q)))

    teams = _team_sizes(rng, n_articles, authors_per_article)
    if team_size_cap is not None:
        teams = np.minimum(teams, team_size_cap)
    n_refs = rng.poisson(refs_per_article, n_articles) if refs_per_article > 0 else np.zeros(n_articles, np.int64)

    cite_urn = np.empty(int(n_refs.sum()) + 1, dtype=np.int64)
    n_urn = 0
    auth_urn = np.empty(int(teams.sum()), dtype=np.int64)
    n_auth_urn = 0
    n_authors = 0
    src_l, dst_l, link_art, link_auth = [], [], [], []

    boundaries = np.searchsorted(month, np.arange(n_months + 1))
    for mth in range(n_months):
        lo, hi = boundaries[mth], boundaries[mth + 1]
        if lo == hi:
            continue
        urn_frozen = n_urn
        auth_frozen = n_auth_urn
        new_edges = []
        for i in range(lo, hi):
            # citations to strictly earlier months
            if lo > 0 and n_refs[i] > 0:
                k = n_refs[i]
                pref = rng.random(k) < p_pref_cite
                targets = np.where(
                    pref & (urn_frozen > 0),
                    cite_urn[rng.integers(0, max(urn_frozen, 1), k)],
                    rng.integers(0, lo, k),
                )
                targets = np.unique(targets)
                src_l.append(np.full(targets.size, i, dtype=np.int64))
                dst_l.append(targets)
                new_edges.append(targets)
            # team
            t = int(teams[i])
            new = rng.random(t) < q
            if n_authors == 0:
                new[0] = True
            n_new = int(new.sum())
            team = np.empty(t, dtype=np.int64)
            team[new] = n_authors + np.arange(n_new)
            n_old = t - n_new
            if n_old:
                pick = rng.random(n_old) < lam
                if auth_frozen == 0:
                    pick[:] = False
                team[~new] = np.where(pick,
                                      auth_urn[rng.integers(0, max(auth_frozen, 1), n_old)],
                                      rng.integers(0, max(n_authors, 1), n_old))
            n_authors += n_new
            team = np.unique(team)
            link_art.append(np.full(team.size, i, dtype=np.int64))
            link_auth.append(team)
            auth_urn[n_auth_urn:n_auth_urn + team.size] = team
            n_auth_urn += team.size
        for tg in new_edges:
            cite_urn[n_urn:n_urn + tg.size] = tg
            n_urn += tg.size

    src = np.concatenate(src_l) if src_l else np.zeros(0, np.int64)
    dst = np.concatenate(dst_l) if dst_l else np.zeros(0, np.int64)
    citations = citation_graph_from_ids(n_articles, src, dst, pub)
    arts = np.concatenate(link_art)
    auths = np.concatenate(link_auth)
    bip = Bipartite.from_pairs(n_articles, n_authors, arts, auths)
    width = len(str(max(n_articles, n_authors)))
    articles = KeyIndex(f"P{i:0{width}d}" for i in range(n_articles))
    authors = KeyIndex(f"A{i:0{width}d}" for i in range(n_authors))
    return LiteratureGraph(citations, bip, articles, authors)
