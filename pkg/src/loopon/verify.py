"""Exhaustive verification suites over the polygons of a box domain.

Each suite returns a :class:`SuiteReport`; ``report.passed`` is false as soon as
one check fails and ``report.counterexample`` holds the first failing case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from . import saw
from .enumerate import (
    disjoint_squares_partition,
    partition_function,
    prob_component_equals,
    verify_factorization,
)
from .lattice import Graph, Lattice, domain_minus
from .loops import Polygon, envelope, union_graph
from .params import ModelParams, NumberMode, format_number


@dataclass
class SuiteReport:
    suite: str
    params: dict
    checks: int = 0
    failures: int = 0
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checks > 0

    def record(self, ok: bool, case: dict):
        self.checks += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = case

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "checks": self.checks,
            "failures": self.failures,
            "pass": self.passed,
            "counterexample": self.counterexample,
            "details": self.details,
        }


def rooted_polygons(G: Graph, max_length: int | None = None) -> Iterable[tuple]:
    """Every pair ``(x, P)`` with ``P`` a non-degenerate polygon in ``G`` through ``x``."""
    for x in G.sorted_vertices:
        for P in saw.polygons_in(G, x, max_length):
            yield x, P


def _close(a, b, mode: NumberMode) -> bool:
    if mode is NumberMode.RATIONAL:
        return a == b
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-300)


def starting_point_suite(G: Graph, p: ModelParams, max_length: int = 12) -> SuiteReport:
    """Loop-through-x probability equals ``n lam^|P| Z(G minus P)/Z(G)`` for every rooted polygon."""
    rep = SuiteReport("starting-point", {**p.to_json(), "max_length": max_length, "domain": G.to_json()})
    for x, P in rooted_polygons(G, max_length):
        direct, formula = prob_component_equals(G, x, P, p)
        rep.record(_close(direct, formula, p.mode),
                   {"x": list(x), "polygon": P.to_json(), "direct": format_number(direct),
                    "formula": format_number(formula)})
    return rep


def factorization_suite(G: Graph, p: ModelParams, max_length: int | None = None) -> SuiteReport:
    """``Z(G) >= Z(G minus P) Z(envelope(P))`` for every polygon ``P`` in ``G``."""
    rep = SuiteReport("factorization", {**p.to_json(), "max_length": max_length, "domain": G.to_json()})
    seen = set()
    for _, P in rooted_polygons(G, max_length):
        if P in seen:
            continue
        seen.add(P)
        lhs, rhs = verify_factorization(G, P, p)
        rep.record(lhs >= rhs, {"polygon": P.to_json(), "lhs": format_number(lhs), "rhs": format_number(rhs)})
    return rep


def lemma1_suite(G: Graph, p: ModelParams, a: float | None = None,
                 max_length: int | None = None) -> SuiteReport:
    """Ratio ``Z(G minus P)/Z(G)`` against ``(1 + lam^4 n)^-m`` for rooted polygons with m >= 1 occurrences.

    With ``a`` given, polygons with ``m >= ceil(a N)`` are also checked against
    ``(1 + lam^4 n)^-ceil(a N)``. The union of the closing faces is checked to lie
    inside the envelope of ``P``.
    """
    rep = SuiteReport("lemma1", {**p.to_json(), "a": a, "max_length": max_length, "domain": G.to_json()})
    pattern = saw.pattern_p_prime(G.lattice)
    base = p.one + p.face_factor(len(pattern.sites))
    ZG = partition_function(G, p)
    ratios: dict = {}
    for x, P in rooted_polygons(G, max_length):
        w = saw.orient(P, x)
        occ = saw.occurrences(w, pattern)
        m = len(occ)
        if m == 0:
            continue
        if P not in ratios:
            ratios[P] = partition_function(domain_minus(G, P.vertices), p) / ZG
        ratio = ratios[P]
        squares = saw.q_squares(P, x, occ, pattern)
        Q = union_graph(G.lattice, squares)
        env = envelope(G, P)
        inside = Q.vertices <= env.vertices and Q.edges <= env.edges
        ok = ratio <= base**-m and inside
        if a is not None and m >= math.ceil(a * len(P)):
            ok = ok and ratio <= base ** -math.ceil(a * len(P))
        rep.record(ok, {"x": list(x), "polygon": P.to_json(), "m": m, "ratio": format_number(ratio),
                        "bound": format_number(base**-m), "squares_in_envelope": inside})
    rep.details["polygons"] = len(ratios)
    return rep


def disjoint_squares(lattice: Lattice, k: int) -> list[Polygon]:
    """``k`` unit faces spaced along the first axis (pairwise vertex-disjoint, some edge-adjacent)."""
    pattern = saw.pattern_p_prime(lattice)
    stride = 2 if not lattice.is_hexagonal else 4
    faces = []
    for i in range(k):
        shift = (stride * i,) + (0,) * (lattice.d - 1)
        faces.append(Polygon.from_walk([tuple(a + b for a, b in zip(s, shift)) for s in pattern.sites]))
    return faces


def bound_partition_suite(lattice: Lattice, p: ModelParams, k_max: int = 4) -> SuiteReport:
    """``Z(union of k disjoint faces) = (1 + n lam^face)^k`` for ``k = 1..k_max``."""
    rep = SuiteReport("bound-partition", {**p.to_json(), "k_max": k_max, "lattice": lattice.name})
    for k in range(1, k_max + 1):
        Z, expected = disjoint_squares_partition(lattice, disjoint_squares(lattice, k), p)
        ok = _close(Z, expected, p.mode)
        rep.record(ok, {"k": k, "Z": format_number(Z), "expected": format_number(expected)})
    return rep


def q_disjoint_suite(lattice: Lattice, max_length: int = 16) -> SuiteReport:
    """Closing faces of all pattern occurrences are pairwise vertex-disjoint, for every polygon through the origin."""
    rep = SuiteReport("q-squares", {"lattice": lattice.name, "max_length": max_length})
    pattern = saw.pattern_p_prime(lattice)
    x = (0,) * lattice.d
    for N in range(4, max_length + 1, 2):
        walks, _ = saw.sap_walks(lattice, x, N, cap=None)
        for sites in walks:
            w = saw.Walk(sites)
            occ = saw.occurrences(w, pattern)
            if len(occ) < 2:
                rep.record(True, {})
                continue
            P = Polygon.from_walk(sites)
            squares = saw.q_squares(P, x, occ, pattern)
            seen: set = set()
            ok = True
            for Q in squares:
                if seen & Q.vertices:
                    ok = False
                seen |= Q.vertices
            rep.record(ok, {"walk": [list(s) for s in sites], "occurrences": occ})
        rep.details[f"N={N}"] = len(walks)
    return rep


SUITES = ("starting-point", "factorization", "lemma1", "bound-partition", "q-squares")
