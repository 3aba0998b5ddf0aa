"""Exact enumeration of loop configurations on small domains.

Configurations are produced by depth-first search over the domain's edges in
sorted order, tracking vertex degrees: a branch dies as soon as a vertex
reaches degree 3, or when a vertex's last incident edge has been decided and
its degree is 1. Every quantity is then a sum over the enumerated
configurations. Most of them go through the generating polynomial
``{(edges, loops): multiplicity}``, which is computed once per domain and
evaluated at any ``(lambda, n)`` exactly or in floating point.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import CapExceeded
from .lattice import Graph, Lattice, Vertex, box_domain, domain_minus
from .loops import LoopConfig, Polygon, _components, envelope, union_graph, weight_of
from .params import ModelParams, Number, NumberMode, format_number
from .saw import occurrences, orient, pattern_p_prime

DEFAULT_EDGE_CAP = 40


def _check_cap(G: Graph, cap: int | None, force: bool):
    if cap is not None and len(G.edges) > cap and not force:
        raise CapExceeded(
            f"domain has {len(G.edges)} edges, over the enumeration cap {cap}; pass force=True to override"
        )


def _edge_subsets(G: Graph) -> Iterator[frozenset]:
    edges = G.sorted_edges
    n_edges = len(edges)
    last: dict = {}
    for i, (a, b) in enumerate(edges):
        last[a] = i
        last[b] = i
    settled: list[list] = [[] for _ in edges]
    for v, i in last.items():
        settled[i].append(v)
    deg = dict.fromkeys(G.vertices, 0)
    chosen: list = []

    def ok(i):
        return all(deg[v] != 1 for v in settled[i])

    def rec(i):
        if i == n_edges:
            yield frozenset(chosen)
            return
        a, b = edges[i]
        if ok(i):
            yield from rec(i + 1)
        if deg[a] < 2 and deg[b] < 2:
            deg[a] += 1
            deg[b] += 1
            if ok(i):
                chosen.append(edges[i])
                yield from rec(i + 1)
                chosen.pop()
            deg[a] -= 1
            deg[b] -= 1

    yield from rec(0)


def enumerate_configs(G: Graph, cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> Iterator[LoopConfig]:
    """Yield every configuration of ``G`` exactly once, the empty one first."""
    _check_cap(G, cap, force)
    for es in _edge_subsets(G):
        yield LoopConfig(G, es)


@lru_cache(maxsize=8192)
def _polynomial(G: Graph) -> tuple:
    poly: Counter = Counter()
    for es in _edge_subsets(G):
        poly[len(es), len(_components(es))] += 1
    return tuple(sorted(poly.items()))


def config_polynomial(G: Graph, cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> dict:
    """Multiplicities ``{(o, L): count}`` of configurations with o edges and L loops."""
    _check_cap(G, cap, force)
    return dict(_polynomial(G))


def evaluate(poly, p: ModelParams) -> Number:
    """Sum ``count * lam**o * n**L`` in a fixed (sorted) order."""
    items = poly.items() if isinstance(poly, dict) else poly
    total = p.zero
    for (o, L), c in sorted(items):
        total += c * weight_of(o, L, p)
    return total


def _params(p: ModelParams, mode) -> ModelParams:
    if mode is None:
        return p
    mode = NumberMode.parse(mode)
    return p if mode is p.mode else ModelParams(p.lam, p.n, mode)


def partition_function(G: Graph, p: ModelParams, mode=None, cap: int | None = DEFAULT_EDGE_CAP,
                       force: bool = False) -> Number:
    """Total weight of all configurations of ``G``; the empty domain gives 1."""
    p = _params(p, mode)
    if G.is_empty:
        return p.one
    return evaluate(config_polynomial(G, cap, force), p)


@dataclass
class EnumerationResult:
    Z: Number
    per_config_visit_count: int
    length_law: dict
    params: ModelParams
    marked: Vertex | None = None

    def to_json(self) -> dict:
        return {
            "Z": format_number(self.Z),
            "mode": self.params.mode.value,
            "params": self.params.to_json(),
            "configs": self.per_config_visit_count,
            "marked": list(self.marked) if self.marked is not None else None,
            "length_law": [[ell, format_number(q)] for ell, q in sorted(self.length_law.items())],
        }


def _length_polys(G: Graph, x: Vertex) -> dict:
    """``{ell: {(o, L): count}}`` split by the length of the loop through ``x``."""
    out: dict = {}
    for es in _edge_subsets(G):
        comps = _components(es)
        ell = 0
        for c in comps:
            if any(x in e for e in c):
                ell = len(c)
                break
        key = (len(es), len(comps))
        bucket = out.setdefault(ell, Counter())
        bucket[key] += 1
    return out


def loop_length_distribution(G: Graph, x: Vertex, p: ModelParams, mode=None,
                             cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> EnumerationResult:
    """Exact law of the length of the loop through ``x`` (0 when ``x`` is isolated)."""
    p = _params(p, mode)
    x = tuple(x)
    if x not in G.vertices:
        raise ValueError(f"{x} is not a vertex of the domain")
    _check_cap(G, cap, force)
    polys = _length_polys(G, x)
    masses = {ell: evaluate(poly, p) for ell, poly in sorted(polys.items())}
    Z = p.zero
    for ell in sorted(masses):
        Z += masses[ell]
    visits = sum(sum(poly.values()) for poly in polys.values())
    law = {ell: m / Z for ell, m in masses.items()}
    return EnumerationResult(Z, visits, law, p, x)


@lru_cache(maxsize=64)
def _loop_table(G: Graph) -> dict:
    """For each loop that occurs in some configuration, the polynomial of configurations containing it."""
    table: dict = {}
    for es in _edge_subsets(G):
        comps = _components(es)
        key = (len(es), len(comps))
        for c in comps:
            table.setdefault(c, Counter())[key] += 1
    return table


def prob_loop(G: Graph, P: Polygon, p: ModelParams, cap: int | None = DEFAULT_EDGE_CAP,
              force: bool = False) -> Number:
    """Probability that ``P`` is one of the loops, by direct enumeration of ``G``."""
    _check_cap(G, cap, force)
    poly = _loop_table(G).get(P.edges)
    if poly is None:
        return p.zero
    return evaluate(poly, p) / partition_function(G, p, cap=cap, force=force)


def _check_polygon_in(G: Graph, P: Polygon, x: Vertex | None = None):
    if not P.vertices <= G.vertices or not P.edges <= G.edges:
        raise ValueError("polygon is not contained in the domain")
    if x is not None and tuple(x) not in P.vertices:
        raise ValueError(f"polygon does not pass through {tuple(x)}")


def prob_component_equals(G: Graph, x: Vertex, P: Polygon, p: ModelParams, mode=None,
                          cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> tuple:
    """``(direct, formula)`` for the probability that the loop through ``x`` is ``P``.

    ``direct`` sums configuration weights; ``formula`` is
    ``n * lam**|P| * Z(G minus P) / Z(G)``.
    """
    p = _params(p, mode)
    if P.is_degenerate or len(P) < 4:
        raise ValueError("need a non-degenerate polygon")
    _check_polygon_in(G, P, x)
    direct = prob_loop(G, P, p, cap, force)
    ZG = partition_function(G, p, cap=cap, force=force)
    rest = partition_function(domain_minus(G, P.vertices), p, cap=cap, force=force)
    formula = p.n * p.lam ** len(P) * rest / ZG
    return direct, formula


def exp_moment(G: Graph, x: Vertex, delta: float, p: ModelParams, mode=None,
               cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> float:
    """``E[exp(delta * |loop through x|)]`` from the exact law (evaluated in float)."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    law = loop_length_distribution(G, x, p, mode, cap, force).length_law
    return math.fsum(float(q) * math.exp(delta * ell) for ell, q in sorted(law.items()))


@dataclass
class ExpMomentEstimate:
    delta: float
    value: float
    family_spec: dict
    argmax: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"delta": self.delta, "value": self.value, "family": self.family_spec, "argmax": self.argmax}


def sup_exp_moment(lattice: Lattice, family: Sequence[Sequence[int]], delta: float, p: ModelParams,
                   mode=None, cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> ExpMomentEstimate:
    """Largest exponential moment over the boxes in ``family`` and all their vertices.

    A finite scan: this is a lower estimate of the supremum over all domains.
    """
    best, where = 1.0, {}
    origin = (0,) * lattice.d
    for sides in family:
        G = box_domain(lattice, origin, sides)
        _check_cap(G, cap, force)
        for x in G.sorted_vertices:
            value = exp_moment(G, x, delta, p, mode, cap, force)
            if value > best:
                best, where = value, {"box": list(sides), "vertex": list(x)}
    spec = {"lattice": lattice.name, "boxes": [list(s) for s in family], "marked": "all vertices"}
    return ExpMomentEstimate(float(delta), best, spec, where)


def verify_factorization(G: Graph, P: Polygon, p: ModelParams, mode=None,
                         cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> tuple:
    """``(Z(G), Z(G minus P) * Z(envelope(P)))``; the first is never smaller."""
    p = _params(p, mode)
    _check_polygon_in(G, P)
    lhs = partition_function(G, p, cap=cap, force=force)
    rhs = (partition_function(domain_minus(G, P.vertices), p, cap=cap, force=force)
           * partition_function(envelope(G, P), p, cap=cap, force=force))
    return lhs, rhs


@dataclass
class Lemma1Check:
    ratio: Number
    bound: Number
    occurrence_count: int
    strengthened_bound: Number

    @property
    def ok(self) -> bool:
        return self.ratio <= self.bound and self.ratio <= self.strengthened_bound


def verify_lemma1(G: Graph, x: Vertex, P: Polygon, p: ModelParams, a: float,
                  occurrence_count: int | None = None, mode=None,
                  cap: int | None = DEFAULT_EDGE_CAP, force: bool = False) -> Lemma1Check:
    """Compare ``Z(G minus P)/Z(G)`` with ``(1 + lam**4 n)**(-ceil(a N))`` and ``(...)**(-m)``.

    ``m`` is the number of occurrences of the U pattern in f(P) oriented from ``x``
    (computed if not given); it must be at least ``ceil(a N)``.
    """

    p = _params(p, mode)
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    _check_polygon_in(G, P, x)
    pattern = pattern_p_prime(G.lattice)
    m = len(occurrences(orient(P, x), pattern)) if occurrence_count is None else occurrence_count
    need = math.ceil(a * len(P))
    if m < need:
        raise ValueError(f"polygon has {m} pattern occurrences, fewer than ceil(aN) = {need}")
    base = p.one + p.face_factor(len(pattern.sites))
    ratio = (partition_function(domain_minus(G, P.vertices), p, cap=cap, force=force)
             / partition_function(G, p, cap=cap, force=force))
    return Lemma1Check(ratio, base**-need, m, base**-m)


def disjoint_squares_partition(lattice: Lattice, squares: Iterable[Polygon], p: ModelParams, mode=None) -> tuple:
    """``(Z(union of squares), (1 + n lam**4)**k)`` for k pairwise vertex-disjoint faces."""
    p = _params(p, mode)
    squares = list(squares)
    seen: set = set()
    for Q in squares:
        if seen & Q.vertices:
            raise ValueError("faces are not pairwise vertex-disjoint")
        seen |= Q.vertices
    face_len = len(squares[0]) if squares else 4
    Z = partition_function(union_graph(lattice, squares), p) if squares else p.one
    return Z, (p.one + p.face_factor(face_len)) ** len(squares)


def brute_force_configs(G: Graph) -> Iterator[frozenset]:
    """All edge subsets with every degree in {0, 2}, by filtering the full power set."""
    edges = G.sorted_edges
    for mask in range(1 << len(edges)):
        chosen = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        degree = Counter(v for e in chosen for v in e)
        if all(k == 2 for k in degree.values()):
            yield frozenset(chosen)
