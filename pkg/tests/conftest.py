import sys
from pathlib import Path

import numpy as np
import pytest

from glepoch.graph_core import collab_from_edges

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        _ACCEPTANCE.append((m.args[0], m.args[1], status, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, status, name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{status}] criterion {num}: {title} ({name})")


def graph_from_keyed(vertices, edges):
    """CollabGraph over sorted global keys from keyed edge pairs."""
    keys = np.array(sorted(vertices), dtype=np.int64)
    if len(edges):
        e = np.asarray(edges, dtype=np.int64)
        u, v = np.searchsorted(keys, e[:, 0]), np.searchsorted(keys, e[:, 1])
    else:
        u = v = np.zeros(0, np.int64)
    return collab_from_edges(keys, u, v)


TOY_ARTICLES = "A\t2001\nB\t2003\nC\t2005\n"
TOY_CITATIONS = "B\tA\nC\tA\nC\tB\n"
TOY_AUTHORSHIP = "A\tu1\nA\tu2\nB\tu2\nB\tu3\nC\tu3\nC\tu4\nC\tu2\n"


@pytest.fixture
def toy_dir(tmp_path):
    d = tmp_path / "toy"
    d.mkdir()
    (d / "articles.tsv").write_text(TOY_ARTICLES)
    (d / "citations.tsv").write_text(TOY_CITATIONS)
    (d / "authorship.tsv").write_text(TOY_AUTHORSHIP)
    return d
