import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopon.lattice import (
    Domain,
    Lattice,
    box_domain,
    domain_minus,
    induced_domain,
    neighbors,
    parse_lattice,
)


def brute_induced_edges(lattice, vertices):
    """Every unordered pair of vertices at lattice distance one."""
    out = set()
    for u, v in itertools.combinations(sorted(vertices), 2):
        if v in neighbors(lattice, u) and u in neighbors(lattice, v):
            out.add((u, v))
    return out


def test_neighbors_z2_order(z2):
    assert neighbors(z2, (0, 0)) == [(1, 0), (-1, 0), (0, 1), (0, -1)]


def test_neighbors_degree():
    assert len(neighbors(Lattice.hypercubic(3), (0, 0, 0))) == 6
    hexl = Lattice.hexagonal()
    for v in [(0, 0), (1, 0), (-3, 7), (4, -2)]:
        assert len(neighbors(hexl, v)) == 3


def test_hex_adjacency_symmetric(hexl):
    for v in itertools.product(range(-3, 4), repeat=2):
        for w in neighbors(hexl, v):
            assert v in neighbors(hexl, w)
            assert w != v


def test_neighbors_wrong_arity(z2):
    with pytest.raises(ValueError):
        neighbors(z2, (0, 0, 0))


@pytest.mark.parametrize("sides,nv,ne", [((2, 2), 4, 4), ((3, 3), 9, 12), ((1, 1), 1, 0)])
def test_box_domain_counts(z2, sides, nv, ne):
    G = box_domain(z2, (0, 0), sides)
    assert len(G.vertices) == nv
    assert len(G.edges) == ne
    assert len(brute_induced_edges(z2, G.vertices)) == ne


def test_box_domain_rejects_bad_sides(z2):
    with pytest.raises(ValueError):
        box_domain(z2, (0, 0), (0, 3))
    with pytest.raises(ValueError):
        box_domain(z2, (0, 0), (3,))


def test_induced_domain_examples(z2):
    assert len(induced_domain(z2, [(0, 0), (1, 0)]).edges) == 1
    assert len(induced_domain(z2, [(0, 0), (1, 1)]).edges) == 0
    assert len(induced_domain(z2, [(0, 0), (1, 0), (0, 1), (1, 1)]).edges) == 4
    with pytest.raises(ValueError):
        induced_domain(z2, [])


def test_domain_minus(box3):
    G = domain_minus(box3, [(1, 1)])
    assert len(G.vertices) == 8
    assert len(G.edges) == 8
    assert len(brute_induced_edges(G.lattice, G.vertices)) == 8
    assert domain_minus(box3, []) == box3
    empty = domain_minus(box3, box3.vertices)
    assert empty.is_empty and not empty.edges
    with pytest.raises(ValueError):
        domain_minus(box3, [(7, 7)])


@settings(max_examples=60, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=25))
def test_induced_edges_match_recomputation(vs):
    lattice = Lattice.hypercubic(2)
    G = induced_domain(lattice, vs)
    assert set(G.edges) == brute_induced_edges(lattice, vs)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_domain_minus_composes(data):
    lattice = Lattice.hypercubic(2)
    G = box_domain(lattice, (0, 0), (4, 4))
    verts = sorted(G.vertices)
    A = set(data.draw(st.sets(st.sampled_from(verts), max_size=6)))
    B = set(data.draw(st.sets(st.sampled_from(sorted(set(verts) - A)), max_size=6)))
    assert domain_minus(domain_minus(G, A), B) == domain_minus(G, A | B)


def test_hex_box_is_bipartite_cubic_girth6(hexl):
    import networkx as nx

    G = box_domain(hexl, (0, 0), (7, 6))
    g = nx.Graph()
    g.add_edges_from(G.edges)
    assert nx.is_bipartite(g)
    assert nx.girth(g) == 6
    interior = [v for v in G.vertices if all(w in G.vertices for w in neighbors(hexl, v))]
    assert interior and all(g.degree(v) == 3 for v in interior)


def test_domain_json_roundtrip(box3):
    data = json.loads(json.dumps(box3.to_json()))
    assert "edges" not in data
    assert Domain.from_json(data) == box3


def test_parse_lattice():
    assert parse_lattice("z2") == Lattice.hypercubic(2)
    assert parse_lattice("Z3").d == 3
    assert parse_lattice("hex").is_hexagonal
    with pytest.raises(ValueError):
        parse_lattice("square")
