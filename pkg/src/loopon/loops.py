"""Loop configurations, their statistics, and the polygon through a vertex."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .lattice import Domain, Edge, Graph, Vertex, edge, is_adjacent
from .params import ModelParams, Number


class UnionFind:
    def __init__(self, items: Iterable = ()):
        self.parent = {x: x for x in items}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class Polygon:
    """A self-avoiding polygon: a cycle graph, or the degenerate one-vertex polygon.

    ``len(P)`` is the number of edges, so the degenerate polygon has length 0.
    """

    vertices: frozenset
    edges: frozenset = field(default=frozenset())

    def __post_init__(self):
        if not self.edges:
            if len(self.vertices) != 1:
                raise ValueError("an edgeless polygon must have exactly one vertex")
            return
        degree = Counter(v for e in self.edges for v in e)
        if set(degree) != set(self.vertices) or any(k != 2 for k in degree.values()):
            raise ValueError("polygon edges must give every vertex degree 2")
        if len(self.edges) < 3 or len(_components(self.edges)) != 1:
            raise ValueError("polygon edges must form a single cycle")

    @classmethod
    def degenerate(cls, x: Vertex) -> "Polygon":
        return cls(frozenset([tuple(x)]))

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> "Polygon":
        edges = frozenset(edge(*e) for e in edges)
        return cls(frozenset(v for e in edges for v in e), edges)

    @classmethod
    def from_walk(cls, sites: Sequence[Vertex]) -> "Polygon":
        """Close a walk whose endpoints are adjacent (the inverse of orientation)."""
        sites = [tuple(s) for s in sites]
        if len(sites) == 1:
            return cls.degenerate(sites[0])
        edges = {edge(a, b) for a, b in zip(sites, sites[1:])}
        edges.add(edge(sites[-1], sites[0]))
        if len(edges) != len(sites) or len(set(sites)) != len(sites):
            raise ValueError("walk does not close into a self-avoiding polygon")
        return cls(frozenset(sites), frozenset(edges))

    @property
    def is_degenerate(self) -> bool:
        return not self.edges

    @property
    def n_sites(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.vertices

    def __lt__(self, other: "Polygon") -> bool:
        return (len(self), sorted(self.edges)) < (len(other), sorted(other.edges))

    def to_json(self) -> list:
        if self.is_degenerate:
            (v,) = self.vertices
            return [[list(v)]]
        return [[list(a), list(b)] for a, b in sorted(self.edges)]


def _components(edges: Iterable[Edge]) -> list[frozenset]:
    """Edge sets of the connected components (isolated vertices are ignored)."""
    uf = UnionFind()
    edges = list(edges)
    for a, b in edges:
        uf.union(a, b)
    groups: dict = {}
    for e in edges:
        groups.setdefault(uf.find(e[0]), set()).add(e)
    return [frozenset(g) for _, g in sorted(groups.items())]


def is_valid_config(G: Graph, E: Iterable[Edge]) -> bool:
    """True iff every vertex has degree 0 or 2 in ``E``."""
    E = [edge(*e) for e in E]
    stray = [e for e in E if e not in G.edges]
    if stray:
        raise ValueError(f"edge {stray[0]} is not an edge of the domain")
    degree = Counter(v for e in E for v in e)
    return all(k == 2 for k in degree.values())


@dataclass(frozen=True)
class LoopConfig:
    """A spanning subgraph of ``domain`` in which every vertex has degree 0 or 2."""

    domain: Graph
    active_edges: frozenset

    def __post_init__(self):
        edges = frozenset(edge(*e) for e in self.active_edges)
        object.__setattr__(self, "active_edges", edges)
        if not is_valid_config(self.domain, edges):
            raise ValueError("configuration has a vertex of degree other than 0 or 2")

    @classmethod
    def empty(cls, domain: Graph) -> "LoopConfig":
        return cls(domain, frozenset())

    @cached_property
    def loops(self) -> list[Polygon]:
        return [Polygon.from_edges(c) for c in _components(self.active_edges)]

    @cached_property
    def _loop_of(self) -> dict[Vertex, Polygon]:
        return {v: P for P in self.loops for v in P.vertices}

    def to_json(self) -> list:
        return [[list(a), list(b)] for a, b in sorted(self.active_edges)]

    @classmethod
    def from_json(cls, domain: Graph, data) -> "LoopConfig":
        return cls(domain, frozenset(edge(tuple(a), tuple(b)) for a, b in data))


def loop_count(kappa: LoopConfig) -> int:
    return len(kappa.loops)


def edge_count(kappa: LoopConfig) -> int:
    return len(kappa.active_edges)


def weight_of(o: int, L: int, p: ModelParams) -> Number:
    # 0**0 == 1 for int, float and Fraction alike
    return p.lam**o * p.n**L


def weight(kappa: LoopConfig, p: ModelParams) -> Number:
    return weight_of(edge_count(kappa), loop_count(kappa), p)


def component_at(kappa: LoopConfig, x: Vertex) -> Polygon:
    x = tuple(x)
    if x not in kappa.domain.vertices:
        raise ValueError(f"{x} is not a vertex of the domain")
    return kappa._loop_of.get(x) or Polygon.degenerate(x)


def envelope(G: Graph, P: Polygon) -> Graph:
    """Graph on the polygon's vertices carrying every edge of ``G`` between them."""
    if not P.vertices <= G.vertices or not P.edges <= G.edges:
        raise ValueError("polygon is not contained in the domain")
    edges = frozenset(e for e in G.edges if e[0] in P.vertices and e[1] in P.vertices)
    cls = Domain if isinstance(G, Domain) else Graph
    return cls(G.lattice, P.vertices, edges)


def union_graph(lattice, polygons: Iterable[Polygon]) -> Graph:
    """Union of vertex sets and edge sets (not induced)."""
    vs: set = set()
    es: set = set()
    for P in polygons:
        vs |= P.vertices
        es |= P.edges
    return Graph(lattice, frozenset(vs), frozenset(es))


def polygon_in_lattice(lattice, P: Polygon) -> bool:
    return all(is_adjacent(lattice, a, b) for a, b in P.edges)
