"""Lattices (Z^d and the hexagonal lattice) and finite induced domains.

The hexagonal lattice uses the brick-wall embedding in Z^2: ``(x, y)`` is
joined to ``(x +/- 1, y)``, to ``(x, y + 1)`` when ``x + y`` is even and to
``(x, y - 1)`` when ``x + y`` is odd.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

Vertex = tuple[int, ...]
Edge = tuple[Vertex, Vertex]


@dataclass(frozen=True)
class Lattice:
    kind: str
    d: int = 2

    def __post_init__(self):
        if self.kind not in ("hypercubic", "hexagonal"):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.kind == "hypercubic" and self.d < 2:
            raise ValueError("hypercubic lattice needs d >= 2")
        if self.kind == "hexagonal" and self.d != 2:
            raise ValueError("hexagonal lattice is embedded in Z^2")

    @classmethod
    def hypercubic(cls, d: int = 2) -> "Lattice":
        return cls("hypercubic", d)

    @classmethod
    def hexagonal(cls) -> "Lattice":
        return cls("hexagonal", 2)

    @property
    def is_hexagonal(self) -> bool:
        return self.kind == "hexagonal"

    @property
    def degree(self) -> int:
        return 3 if self.is_hexagonal else 2 * self.d

    @property
    def name(self) -> str:
        return "hex" if self.is_hexagonal else f"z{self.d}"

    @property
    def directions(self) -> tuple[Vertex, ...]:
        """Unit steps +e_1, -e_1, +e_2, -e_2, ... (a hex vertex uses three of them)."""
        out = []
        for i in range(self.d):
            for sign in (1, -1):
                e = [0] * self.d
                e[i] = sign
                out.append(tuple(e))
        return tuple(out)

    def __str__(self) -> str:
        return self.name


def parse_lattice(spec: str) -> Lattice:
    """Parse ``"z2"``, ``"z3"``, ... or ``"hex"``."""
    s = spec.strip().lower()
    if s in ("hex", "hexagonal", "h"):
        return Lattice.hexagonal()
    m = re.fullmatch(r"z\^?(\d+)", s)
    if m:
        return Lattice.hypercubic(int(m.group(1)))
    raise ValueError(f"cannot parse lattice {spec!r}; expected z<d> or hex")


def _check_vertex(lattice: Lattice, v) -> Vertex:
    v = tuple(v)
    if len(v) != lattice.d:
        raise ValueError(f"vertex {v} has arity {len(v)}, lattice {lattice} needs {lattice.d}")
    if not all(isinstance(c, int) for c in v):
        try:
            v = tuple(int(c) for c in v)
        except (TypeError, ValueError):
            raise ValueError(f"vertex {v} must have integer coordinates") from None
    return v


def neighbors(lattice: Lattice, v) -> list[Vertex]:
    v = _check_vertex(lattice, v)
    if lattice.is_hexagonal:
        x, y = v
        vertical = (x, y + 1) if (x + y) % 2 == 0 else (x, y - 1)
        return [(x + 1, y), (x - 1, y), vertical]
    return [tuple(a + b for a, b in zip(v, e)) for e in lattice.directions]


def is_adjacent(lattice: Lattice, u: Vertex, v: Vertex) -> bool:
    return tuple(v) in neighbors(lattice, u)


def edge(u: Vertex, v: Vertex) -> Edge:
    """Canonical (sorted) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """A finite subgraph of a lattice. Edges are stored as sorted vertex pairs."""

    lattice: Lattice
    vertices: frozenset
    edges: frozenset

    @cached_property
    def sorted_vertices(self) -> list[Vertex]:
        return sorted(self.vertices)

    @cached_property
    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def incident(self) -> dict[Vertex, list[Edge]]:
        out: dict[Vertex, list[Edge]] = {v: [] for v in self.sorted_vertices}
        for e in self.sorted_edges:
            out[e[0]].append(e)
            out[e[1]].append(e)
        return out

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.vertices

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.kind,
            "d": self.lattice.d,
            "vertices": [list(v) for v in self.sorted_vertices],
        }


class Domain(Graph):
    """A finite induced subgraph: every lattice edge between two of its vertices is present.

    Build one with :func:`induced_domain`, :func:`box_domain` or :func:`domain_minus`.
    The vertex-free domain is only produced by :func:`domain_minus`; its partition
    function is 1.
    """

    @classmethod
    def from_json(cls, data: dict) -> "Domain":
        lattice = Lattice(data["lattice"], int(data.get("d", 2)))
        vertices = [tuple(v) for v in data["vertices"]]
        if not vertices:
            return empty_domain(lattice)
        return induced_domain(lattice, vertices)


def _induced_edges(lattice: Lattice, vertices: frozenset) -> frozenset:
    out = set()
    for v in vertices:
        for w in neighbors(lattice, v):
            if w in vertices:
                out.add(edge(v, w))
    return frozenset(out)


def empty_domain(lattice: Lattice) -> Domain:
    return Domain(lattice, frozenset(), frozenset())


def induced_domain(lattice: Lattice, vertex_set: Iterable) -> Domain:
    vertices = frozenset(_check_vertex(lattice, v) for v in vertex_set)
    if not vertices:
        raise ValueError("a domain needs at least one vertex")
    return Domain(lattice, vertices, _induced_edges(lattice, vertices))


def box_domain(lattice: Lattice, corner, side_lengths) -> Domain:
    """Induced domain on ``corner + [0, s_1) x ... x [0, s_d)``."""
    corner = _check_vertex(lattice, corner)
    sides = tuple(int(s) for s in side_lengths)
    if len(sides) != lattice.d:
        raise ValueError(f"need {lattice.d} side lengths, got {len(sides)}")
    if any(s < 1 for s in sides):
        raise ValueError(f"side lengths must be >= 1, got {sides}")
    ranges = [range(c, c + s) for c, s in zip(corner, sides)]
    return induced_domain(lattice, itertools.product(*ranges))


def domain_minus(G: Graph, S: Iterable) -> Domain:
    """Induced domain on ``V_G minus S``; removing all vertices gives the empty domain."""
    S = frozenset(tuple(v) for v in S)
    if not S <= G.vertices:
        missing = sorted(S - G.vertices)[:3]
        raise ValueError(f"vertices {missing} are not in the domain")
    rest = G.vertices - S
    if not rest:
        return empty_domain(G.lattice)
    edges = frozenset(e for e in G.edges if e[0] in rest and e[1] in rest)
    return Domain(G.lattice, rest, edges)


def parse_box(spec: str) -> tuple[int, ...]:
    """``"4x5"`` -> ``(4, 5)``."""
    try:
        sides = tuple(int(p) for p in spec.lower().split("x"))
    except ValueError:
        raise ValueError(f"cannot parse box {spec!r}; expected e.g. 4x4") from None
    return sides
