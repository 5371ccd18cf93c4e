"""Exhaustive enumeration: counts against the literature, canonicity, and
catalog file round trips."""

from __future__ import annotations

import pytest

from qswiso.catalog import enumerate_connected, enumerate_graphs, write_catalog
from qswiso.graphs import are_isomorphic_bruteforce, parse_graph6
from qswiso.search import load_catalog

from . import oracles

# graphs on n unlabeled vertices, and connected graphs on n unlabeled
# vertices; standard combinatorial sequences
ALL_COUNTS = {1: 1, 2: 2, 3: 4, 4: 11, 5: 34}
CONNECTED_COUNTS = {1: 1, 2: 1, 3: 2, 4: 6, 5: 21, 6: 112, 7: 853}


@pytest.mark.parametrize("n", sorted(ALL_COUNTS))
def test_enumerate_graphs_counts(n):
    assert len(enumerate_graphs(n)) == ALL_COUNTS[n]


@pytest.mark.parametrize("n", sorted(CONNECTED_COUNTS)[:5])
def test_enumerate_connected_counts(n):
    assert len(enumerate_connected(n)) == CONNECTED_COUNTS[n]


def test_enumerate_connected_pairwise_nonisomorphic():
    graphs = enumerate_connected(5)
    for i in range(len(graphs)):
        for j in range(i + 1, len(graphs)):
            assert not are_isomorphic_bruteforce(graphs[i], graphs[j])


def test_enumerate_connected_matches_networkx_atlas():
    nx = pytest.importorskip("networkx")
    ours = enumerate_connected(6)
    assert len(ours) == 112
    seen = set()
    for g in ours:
        h = oracles.nx_graph(g)
        seen.add(nx.to_graph6_bytes(h, header=False).decode().strip())
    # canonical forms are distinct, so the set has full size
    assert len(seen) == 112


def test_write_and_load_catalog(tmp_path):
    path = tmp_path / "n4.g6"
    count = write_catalog(str(path), 4)
    assert count == 6
    graphs, skipped = load_catalog(str(path))
    assert len(graphs) == 6
    assert skipped == 0
    assert {g.n for g in graphs} == {4}


def test_preseeded_catalogs_match_enumeration():
    for n in (5, 6, 7):
        graphs, skipped = load_catalog(f"data/catalogs/connected_n{n}.g6")
        assert skipped == 0
        assert len(graphs) == CONNECTED_COUNTS[n]


def test_preseeded_n8_count():
    graphs, skipped = load_catalog("data/catalogs/connected_n8.g6")
    assert skipped == 0
    assert len(graphs) == 11117


def test_load_catalog_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.g6"
    path.write_text("Dhc\nnot-a-graph6-line-\x19\n")
    from qswiso.errors import Graph6ParseError

    with pytest.raises(Graph6ParseError, match="bad.g6:2"):
        load_catalog(str(path))
