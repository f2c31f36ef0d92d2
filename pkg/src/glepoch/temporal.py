"""Epoch-centered triad citation networks and the septa-partition of authors.

For an epoch ``T`` the core is every article published inside ``T``. Cout
holds the articles that core articles cite, Cin the articles that cite a
core article; both are one hop only. Authors of the triad articles are then
split into seven cohorts by which of the three article sets they wrote in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .graph_core import CollabGraph, project_collaboration, time_order_key
from .ingest import LiteratureGraph

# (in Cout, in Core, in Cin) -> cohort label
DEFAULT_NUMBERING = {
    (True, False, False): 1,
    (False, True, False): 2,
    (False, False, True): 3,
    (True, True, True): 4,
    (False, True, True): 5,
    (True, False, True): 6,
    (True, True, False): 7,
}
PERSISTENT = 4

# unordered cohort pairs that can never share an edge
EMPTY_BLOCKS = ((1, 2), (1, 3), (1, 5), (2, 3), (2, 6), (3, 7))


@dataclass(frozen=True)
class Epoch:
    """Inclusive time window with packed ``year*100+month`` bounds.

    A year-only start means January, a year-only end means December.
    """

    label: str
    t_start: int
    t_end: int

    def __post_init__(self):
        if self._key(self.t_start, False) > self._key(self.t_end, True):
            raise ValueError(f"epoch {self.label!r}: start after end")

    @staticmethod
    def _key(t, is_end):
        y, m = divmod(int(t), 100)
        return y * 100 + (m if m else (12 if is_end else 1))

    @property
    def start_key(self) -> int:
        return self._key(self.t_start, False)

    @property
    def end_key(self) -> int:
        return self._key(self.t_end, True)

    def contains(self, pub_time) -> np.ndarray:
        k = time_order_key(pub_time)
        return (k >= self.start_key) & (k <= self.end_key)

    def __str__(self) -> str:
        return f"{self.label}={_fmt(self.t_start)}:{_fmt(self.t_end)}"


def _fmt(t):
    y, m = divmod(int(t), 100)
    return f"{y}" if m == 0 else f"{y}-{m:02d}"


_EPOCH_RE = re.compile(r"^\s*([^=]+?)\s*=\s*(\d{1,4}(?:-\d{1,2})?)\s*:\s*(\d{1,4}(?:-\d{1,2})?)\s*$")


def parse_epoch(text: str) -> Epoch:
    """Parse ``label=YYYY[-MM]:YYYY[-MM]``."""
    m = _EPOCH_RE.match(text)
    if not m:
        raise ValueError(f"bad epoch spec {text!r}; expected label=YYYY[-MM]:YYYY[-MM]")

    def pack(s):
        if "-" in s:
            y, mo = s.split("-")
            if not 1 <= int(mo) <= 12:
                raise ValueError(f"bad month in epoch spec {text!r}")
            return int(y) * 100 + int(mo)
        return int(s) * 100

    return Epoch(m.group(1), pack(m.group(2)), pack(m.group(3)))


def parse_epochs(text: str) -> list[Epoch]:
    """Comma-separated epoch specs; labels must be unique."""
    epochs = [parse_epoch(s) for s in text.split(",") if s.strip()]
    labels = [e.label for e in epochs]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate epoch labels")
    return epochs


DEFAULT_EPOCHS = parse_epochs(
    "SARS=2002:2004,Swine flu=2009:2011,MERS=2012:2014,"
    "Ebola=2014:2016,Avian flu=2017:2019,COVID-19=2020-01:2020-06"
)


@dataclass(frozen=True, eq=False)
class TriadNetwork:
    epoch: Epoch
    core: np.ndarray
    cout: np.ndarray
    cin: np.ndarray
    # open citation subgraph as (citing, cited) article id arrays
    edge_src: np.ndarray
    edge_dst: np.ndarray

    @property
    def articles(self) -> np.ndarray:
        return np.concatenate([self.cout, self.core, self.cin])

    def sizes(self) -> dict:
        return {"core": int(self.core.size), "cout": int(self.cout.size),
                "cin": int(self.cin.size), "edges": int(self.edge_src.size)}


def extract_triad(lg: LiteratureGraph, epoch: Epoch) -> TriadNetwork:
    """One-hop open citation network around the articles published in ``epoch``.

    An article that would land in two sets is assigned by precedence
    Core > Cout > Cin.
    """
    cg = lg.citations
    n = cg.n_articles
    in_core = epoch.contains(cg.pub_time)
    src, dst = cg.edge_arrays()

    cited_by_core = np.zeros(n, dtype=bool)
    cited_by_core[dst[in_core[src]]] = True
    in_cout = cited_by_core & ~in_core

    cites_core = np.zeros(n, dtype=bool)
    cites_core[src[in_core[dst]]] = True
    in_cin = cites_core & ~in_core & ~in_cout

    keep = ((in_core[src] & in_core[dst])
            | (in_core[src] & in_cout[dst])
            | (in_cin[src] & in_core[dst]))
    return TriadNetwork(
        epoch=epoch,
        core=np.flatnonzero(in_core),
        cout=np.flatnonzero(in_cout),
        cin=np.flatnonzero(in_cin),
        edge_src=src[keep],
        edge_dst=dst[keep],
    )


@dataclass(frozen=True, eq=False)
class SeptaPartition:
    """Cohort label per involved author.

    ``authors`` are global author ids in ascending order and ``cohort`` the
    matching labels in 1..7.
    """

    authors: np.ndarray
    cohort: np.ndarray

    def members(self, label: int) -> np.ndarray:
        return self.authors[self.cohort == label]

    def sizes(self) -> np.ndarray:
        """Cohort sizes for labels 1..7."""
        return np.bincount(self.cohort, minlength=8)[1:8]

    def cohort_of(self, author: int) -> int:
        i = np.searchsorted(self.authors, author)
        if i == self.authors.size or self.authors[i] != author:
            raise KeyError(author)
        return int(self.cohort[i])


def _authors_of(lg, articles):
    mask = np.zeros(lg.authorship.n_authors, dtype=bool)
    if articles.size:
        mask[lg.authorship.to_scipy()[articles].indices] = True
    return mask


def septa_partition(lg: LiteratureGraph, triad: TriadNetwork,
                    numbering: dict | None = None) -> SeptaPartition:
    """Group the triad's authors by which of Cout, Core, Cin they wrote in.

    ``numbering`` maps ``(cout, core, cin)`` boolean triples to labels and
    defaults to :data:`DEFAULT_NUMBERING`.
    """
    numbering = DEFAULT_NUMBERING if numbering is None else numbering
    if sorted(numbering.values()) != list(range(1, 8)) or (False, False, False) in numbering:
        raise ValueError("numbering must map the seven nonempty triples onto 1..7")
    o = _authors_of(lg, triad.cout)
    c = _authors_of(lg, triad.core)
    i = _authors_of(lg, triad.cin)
    code = o.astype(np.int64) * 4 + c.astype(np.int64) * 2 + i.astype(np.int64)
    table = np.zeros(8, dtype=np.int64)
    for (bo, bc, bi), label in numbering.items():
        table[int(bo) * 4 + int(bc) * 2 + int(bi)] = label
    authors = np.flatnonzero(code)
    return SeptaPartition(authors.astype(np.int64), table[code[authors]])


@dataclass(frozen=True, eq=False)
class CollabNetwork:
    """Epoch collaboration graph with vertices grouped by cohort 1..7."""

    label: str
    graph: CollabGraph
    cohort: np.ndarray

    @property
    def boundaries(self) -> np.ndarray:
        """Column offsets where each cohort starts, plus the end (length 8)."""
        counts = np.bincount(self.cohort, minlength=8)[1:8]
        return np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    def cohort_sizes(self) -> np.ndarray:
        return np.bincount(self.cohort, minlength=8)[1:8]


def build_epoch_collab(lg: LiteratureGraph, triad: TriadNetwork,
                       part: SeptaPartition) -> CollabNetwork:
    """Project the triad articles onto authors and order vertices by cohort,
    then by ascending author id."""
    g = project_collaboration(lg.authorship, triad.articles)
    if not np.array_equal(g.vertex_key, part.authors):
        raise ValueError("partition does not match the triad's authors")
    order = np.lexsort((part.authors, part.cohort))
    g = g.permute(order)
    return CollabNetwork(triad.epoch.label, g, part.cohort[order])
