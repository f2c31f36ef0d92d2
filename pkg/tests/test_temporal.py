import numpy as np
import pytest

from glepoch.graph_core import Bipartite, KeyIndex, build_citation_graph, time_order_key
from glepoch.ingest import LiteratureGraph, generate_synthetic
from glepoch.temporal import (
    DEFAULT_EPOCHS,
    EMPTY_BLOCKS,
    build_epoch_collab,
    extract_triad,
    parse_epoch,
    parse_epochs,
    septa_partition,
)

import oracles


def make_lg(times, citations, authorship):
    """LiteratureGraph from {key: stamp}, [(citing, cited)], {article: [authors]}."""
    cg, arts, _ = build_citation_graph(citations, times)
    authors = KeyIndex()
    pairs = [(arts.id(a), authors.add(u)) for a, us in authorship.items() for u in us]
    a, u = zip(*pairs) if pairs else ((), ())
    bip = Bipartite.from_pairs(len(arts), len(authors), a, u)
    return LiteratureGraph(cg, bip, arts, authors)


def keys(lg, ids):
    return sorted(lg.articles.key(int(i)) for i in ids)


def test_parse_epoch():
    e = parse_epoch("COVID-19=2020-01:2020-06")
    assert e.label == "COVID-19" and e.start_key == 202001 and e.end_key == 202006
    e = parse_epoch("SARS=2002:2004")
    assert e.start_key == 200201 and e.end_key == 200412
    with pytest.raises(ValueError):
        parse_epoch("bad=2004:2002")
    with pytest.raises(ValueError):
        parse_epoch("nolabel 2002:2004")
    with pytest.raises(ValueError):
        parse_epochs("a=2001:2002,a=2003:2004")


def test_default_epochs():
    assert [e.label for e in DEFAULT_EPOCHS] == [
        "SARS", "Swine flu", "MERS", "Ebola", "Avian flu", "COVID-19"]
    assert str(DEFAULT_EPOCHS[-1]) == "COVID-19=2020-01:2020-06"


def test_year_only_article_inside_month_window():
    e = parse_epoch("x=2020-01:2020-06")
    assert e.contains(np.array([202000, 202006, 202007, 201912])).tolist() == [True, True, False, False]


def test_three_article_chain():
    lg = make_lg({"A": "2001", "B": "2003", "C": "2005"},
                 [("B", "A"), ("C", "B")], {"A": ["u"], "B": ["v"], "C": ["w"]})
    t = extract_triad(lg, parse_epoch("e=2003:2003"))
    assert keys(lg, t.core) == ["B"] and keys(lg, t.cout) == ["A"] and keys(lg, t.cin) == ["C"]


def test_epoch_covering_everything_is_closed():
    lg = make_lg({"A": "2001", "B": "2003", "C": "2005"},
                 [("B", "A"), ("C", "B"), ("C", "A")], {"A": ["u"], "B": ["v"], "C": ["w"]})
    t = extract_triad(lg, parse_epoch("all=2000:2010"))
    assert t.cout.size == 0 and t.cin.size == 0 and t.core.size == 3
    assert t.edge_src.size == 3


def test_five_chain_one_hop_only():
    times = {f"P{i}": str(2000 + i) for i in range(1, 6)}
    cites = [(f"P{i}", f"P{i - 1}") for i in range(2, 6)]
    lg = make_lg(times, cites, {k: [k.lower()] for k in times})
    t = extract_triad(lg, parse_epoch("mid=2003:2003"))
    assert keys(lg, t.core) == ["P3"]
    assert keys(lg, t.cout) == ["P2"]
    assert keys(lg, t.cin) == ["P4"]
    assert sorted(keys(lg, t.articles)) == ["P2", "P3", "P4"]


def test_dag_precedence_and_edge_pattern():
    # D (2003, core) cites A; X (2004, outside) cites core B and is also cited by core C.
    times = {"A": "2000", "B": "2003", "C": "2003", "D": "2003", "X": "2004", "Y": "2005", "Z": "2006"}
    cites = [("D", "A"), ("X", "B"), ("C", "X"), ("Y", "C"), ("Y", "A"), ("Z", "Y"), ("B", "C")]
    lg = make_lg(times, cites, {k: [k.lower()] for k in times})
    t = extract_triad(lg, parse_epoch("e=2003:2003"))
    assert keys(lg, t.core) == ["B", "C", "D"]
    assert keys(lg, t.cout) == ["A", "X"]        # X cited by core wins over citing core
    assert keys(lg, t.cin) == ["Y"]              # Z is two hops away
    edges = {(lg.articles.key(s), lg.articles.key(d)) for s, d in zip(t.edge_src, t.edge_dst)}
    # X->B is cout->core and Y->A is cin->cout: both excluded
    assert edges == {("D", "A"), ("C", "X"), ("Y", "C"), ("B", "C")}


def test_triad_matches_bruteforce_on_random_corpora():
    for seed in range(10):
        lg = generate_synthetic(300, span_years=10, seed=seed)
        ep = parse_epoch("e=2004:2005")
        t = extract_triad(lg, ep)
        src, dst = lg.citations.edge_arrays()
        k = time_order_key(lg.pub_time)
        in_window = [(200401 <= x <= 200512) for x in k.tolist()]
        core, cout, cin = oracles.triad_sets(lg.n_articles, src.tolist(), dst.tolist(), in_window)
        assert t.core.tolist() == sorted(core)
        assert t.cout.tolist() == sorted(cout)
        assert t.cin.tolist() == sorted(cin)
        sets = [set(t.core.tolist()), set(t.cout.tolist()), set(t.cin.tolist())]
        assert not (sets[0] & sets[1]) and not (sets[0] & sets[2]) and not (sets[1] & sets[2])
        for s, d in zip(t.edge_src.tolist(), t.edge_dst.tolist()):
            assert (s in core and (d in core or d in cout)) or (s in cin and d in core)


def test_core_only_author_cohort_2():
    lg = make_lg({"A": "2001", "B": "2003"}, [("B", "A")], {"A": ["u"], "B": ["v"]})
    t = extract_triad(lg, parse_epoch("e=2003:2003"))
    p = septa_partition(lg, t)
    assert p.cohort_of(lg.authors.id("v")) == 2
    assert p.cohort_of(lg.authors.id("u")) == 1


def test_no_followers_empties_cohorts_3_to_6():
    lg = make_lg({"A": "2018", "B": "2020-02", "C": "2020-03"},
                 [("B", "A"), ("C", "B")], {"A": ["u", "v"], "B": ["v", "w"], "C": ["x"]})
    t = extract_triad(lg, parse_epoch("COVID-19=2020-01:2020-06"))
    assert t.cin.size == 0
    sizes = septa_partition(lg, t).sizes()
    assert sizes[2:6].tolist() == [0, 0, 0, 0]
    assert sizes.tolist() == [1, 2, 0, 0, 0, 0, 1]


def test_cout_and_cin_author_is_cohort_6():
    times = {"A": "2001", "B": "2003", "C": "2005"}
    lg = make_lg(times, [("B", "A"), ("C", "B")], {"A": ["u"], "B": ["v"], "C": ["u"]})
    p = septa_partition(lg, extract_triad(lg, parse_epoch("e=2003:2003")))
    assert p.cohort_of(lg.authors.id("u")) == 6


def test_septa_matches_boolean_rule_randomized():
    for seed in range(10):
        lg = generate_synthetic(300, span_years=10, seed=100 + seed)
        t = extract_triad(lg, parse_epoch("e=2004:2005"))
        p = septa_partition(lg, t)
        sets = {"cout": t.cout.tolist(), "core": t.core.tolist(), "cin": t.cin.tolist()}
        flags = oracles.author_flags(sets, lambda a: lg.authorship.authors_of(a).tolist())
        numbering = {(1, 0, 0): 1, (0, 1, 0): 2, (0, 0, 1): 3, (1, 1, 1): 4,
                     (0, 1, 1): 5, (1, 0, 1): 6, (1, 1, 0): 7}
        expected = {u: numbering[tuple(int(b) for b in f)] for u, f in flags.items()}
        got = dict(zip(p.authors.tolist(), p.cohort.tolist()))
        assert got == expected
        assert p.sizes().sum() == p.authors.size


def test_custom_numbering():
    lg = make_lg({"A": "2001", "B": "2003"}, [("B", "A")], {"A": ["u"], "B": ["v"]})
    t = extract_triad(lg, parse_epoch("e=2003:2003"))
    swapped = {(True, False, False): 2, (False, True, False): 1, (False, False, True): 3,
               (True, True, True): 4, (False, True, True): 5, (True, False, True): 6,
               (True, True, False): 7}
    p = septa_partition(lg, t, swapped)
    assert p.cohort_of(lg.authors.id("v")) == 1
    with pytest.raises(ValueError):
        septa_partition(lg, t, {(True, False, False): 1})


def test_epoch_collab_single_core_article():
    lg = make_lg({"A": "2003"}, [], {"A": ["u", "v"]})
    t = extract_triad(lg, parse_epoch("e=2003:2003"))
    net = build_epoch_collab(lg, t, septa_partition(lg, t))
    assert net.graph.n_edges == 1
    assert net.cohort.tolist() == [2, 2]


def test_epoch_collab_grouped_by_cohort():
    lg = generate_synthetic(400, span_years=10, seed=9)
    t = extract_triad(lg, parse_epoch("e=2004:2005"))
    net = build_epoch_collab(lg, t, septa_partition(lg, t))
    assert (np.diff(net.cohort) >= 0).all()
    b = net.boundaries
    assert b[0] == 0 and b[-1] == net.graph.n_vertices
    assert np.array_equal(np.diff(b), net.cohort_sizes())
    for lo, hi in zip(b[:-1], b[1:]):
        assert (np.diff(net.graph.vertex_key[lo:hi]) > 0).all()


LABEL_SETS = {1: {"out"}, 2: {"core"}, 3: {"in"}, 4: {"out", "core", "in"},
              5: {"core", "in"}, 6: {"out", "in"}, 7: {"out", "core"}}


def test_empty_block_list_matches_label_sets():
    derived = sorted((i, j) for i in range(1, 8) for j in range(i + 1, 8)
                     if not LABEL_SETS[i] & LABEL_SETS[j])
    assert derived == sorted(EMPTY_BLOCKS)
    assert len(derived) == 6


def test_blocks_nonempty_only_when_label_sets_meet():
    lg = generate_synthetic(200, span_years=8, seed=17)
    t = extract_triad(lg, parse_epoch("e=2003:2004"))
    net = build_epoch_collab(lg, t, septa_partition(lg, t))
    e = net.graph.edge_list()
    for u, v in e.tolist():
        assert LABEL_SETS[int(net.cohort[u])] & LABEL_SETS[int(net.cohort[v])]
