"""Self-avoiding walks and polygons, pattern occurrences and growth estimates.

Patterns match by translation only: a pattern occurs at step ``j`` of a walk
when the walk's steps ``j+1 .. j+m`` equal the pattern's ``m`` steps. Counting
is done by compiled depth-first search over a neighbour table; the pure-Python
generators (:func:`iter_saws`) are for streaming small cases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import CapExceeded
from .lattice import Graph, Lattice, Vertex, neighbors
from .loops import Polygon

DEFAULT_SAW_CAP = 20


@dataclass(frozen=True)
class Walk:
    """A walk given by its sites; ``len(w)`` is the number of steps."""

    sites: tuple

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(tuple(s) for s in self.sites))
        if not self.sites:
            raise ValueError("a walk needs at least one site")

    def __len__(self) -> int:
        return len(self.sites) - 1

    @property
    def steps(self) -> tuple:
        return tuple(
            tuple(b - a for a, b in zip(u, v)) for u, v in zip(self.sites, self.sites[1:])
        )

    def is_self_avoiding(self, lattice: Lattice) -> bool:
        if len(set(self.sites)) != len(self.sites):
            return False
        return all(v in neighbors(lattice, u) for u, v in zip(self.sites, self.sites[1:]))


@dataclass(frozen=True)
class Pattern(Walk):
    name: str = field(default="", compare=False)


@dataclass(frozen=True)
class PatternStats:
    """Occurrence histogram of a pattern over all N-step walks (or N-edge polygons)."""

    N: int
    kind: str
    histogram: tuple

    @property
    def total(self) -> int:
        return int(sum(self.histogram))

    def deficient(self, w: float) -> int:
        """Number of objects with fewer than ``w`` occurrences."""
        return int(sum(c for k, c in enumerate(self.histogram) if k < w))


# ---------------------------------------------------------------- tables


def _direction_ids(lattice: Lattice) -> dict:
    return {d: k for k, d in enumerate(lattice.directions)}


@lru_cache(maxsize=32)
def _lattice_table(lattice: Lattice, x: Vertex, radius: int):
    """Neighbour table of the cube of half-width ``radius`` around ``x``."""
    d = lattice.d
    side = 2 * radius + 1
    shape = (side,) * d
    if side**d > 5_000_000:
        raise CapExceeded(f"lattice window {shape} too large")
    local = np.indices(shape).reshape(d, -1).T
    coords = local + (np.asarray(x, dtype=np.int64) - radius)
    dirs = np.asarray(lattice.directions, dtype=np.int64)
    nbr = np.full((local.shape[0], len(dirs)), -1, dtype=np.int64)
    for k, step in enumerate(dirs):
        target = local + step
        inside = np.all((target >= 0) & (target < side), axis=1)
        if lattice.is_hexagonal:
            even = (coords[:, 0] + coords[:, 1]) % 2 == 0
            if step[1] == 1:
                inside &= even
            elif step[1] == -1:
                inside &= ~even
        idx = np.ravel_multi_index(tuple(np.where(inside[:, None], target, 0).T), shape)
        nbr[inside, k] = idx[inside]
    start = int(np.ravel_multi_index(tuple([radius] * d), shape))
    return coords, nbr, start


def _graph_table(G: Graph):
    verts = G.sorted_vertices
    index = {v: i for i, v in enumerate(verts)}
    dir_id = _direction_ids(G.lattice)
    nbr = np.full((len(verts), len(dir_id)), -1, dtype=np.int64)
    for a, b in G.edges:
        ia, ib = index[a], index[b]
        nbr[ia, dir_id[tuple(q - p for p, q in zip(a, b))]] = ib
        nbr[ib, dir_id[tuple(p - q for p, q in zip(a, b))]] = ia
    coords = np.asarray(verts, dtype=np.int64).reshape(len(verts), G.lattice.d)
    return coords, nbr, index


def _pattern_ids(lattice: Lattice, pattern: Pattern | None) -> np.ndarray:
    if pattern is None:
        return np.zeros(0, dtype=np.int64)
    dir_id = _direction_ids(lattice)
    try:
        return np.asarray([dir_id[s] for s in pattern.steps], dtype=np.int64)
    except KeyError:
        raise ValueError(f"pattern {pattern.name!r} is not a nearest-neighbour walk on {lattice}") from None


# ---------------------------------------------------------------- walks


def _check_cap(N: int, cap: int | None, force: bool, what: str):
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if cap is not None and N > cap and not force:
        raise CapExceeded(f"{what} with N={N} exceeds cap {cap}; pass force=True to override")


def saw_histograms(lattice: Lattice, x: Vertex, n_max: int, pattern: Pattern | None = None,
                   cap: int | None = DEFAULT_SAW_CAP, force: bool = False) -> np.ndarray:
    """``H[N, k]``: number of N-step SAWs from ``x`` with exactly k occurrences of ``pattern``."""
    _check_cap(n_max, cap, force, "SAW enumeration")
    x = tuple(x)
    _, nbr, start = _lattice_table(lattice, x, max(n_max, 1))
    return _kernels.saw_histograms(nbr, start, n_max, _pattern_ids(lattice, pattern))


def enumerate_saws(lattice: Lattice, x: Vertex, N: int, cap: int | None = DEFAULT_SAW_CAP,
                   force: bool = False) -> int:
    """Exact number of N-step self-avoiding walks starting at ``x``."""
    return int(saw_histograms(lattice, x, N, cap=cap, force=force)[N].sum())


def iter_saws(lattice: Lattice, x: Vertex, N: int) -> Iterator[Walk]:
    """Stream the N-step SAWs from ``x`` in backtracking order."""
    path = [tuple(x)]
    seen = {path[0]}

    def extend():
        if len(path) == N + 1:
            yield Walk(tuple(path))
            return
        for v in neighbors(lattice, path[-1]):
            if v not in seen:
                path.append(v)
                seen.add(v)
                yield from extend()
                seen.discard(path.pop())

    yield from extend()


# ---------------------------------------------------------------- polygons


def _polygon_lengths_ok(lattice: Lattice, N: int) -> bool:
    return N == 1 or (N % 2 == 0 and N >= (6 if lattice.is_hexagonal else 4))


def _closing_walks(coords, nbr, start, N, pattern_ids, store):
    hist = np.zeros(N + 1, dtype=np.int64)
    empty = np.zeros((0, N), dtype=np.int64)
    count = _kernels.closing_walks(nbr, coords, start, N - 1, pattern_ids, hist, empty)
    if not store:
        return hist, None
    out = np.zeros((count, N), dtype=np.int64)
    hist[:] = 0
    _kernels.closing_walks(nbr, coords, start, N - 1, pattern_ids, hist, out)
    return hist, out


def sap_walks(where, x: Vertex, N: int, pattern: Pattern | None = None,
              cap: int | None = DEFAULT_SAW_CAP, force: bool = False):
    """Canonical orientations f(P) of all N-edge polygons through ``x``.

    ``where`` is a :class:`Lattice` (polygons anywhere) or a :class:`Graph`
    (polygons inside it). Returns ``(walks, histogram)`` where ``walks`` is a list
    of site tuples and ``histogram[k]`` counts walks with k pattern occurrences.
    """
    x = tuple(x)
    lattice = where if isinstance(where, Lattice) else where.lattice
    if N < 4:
        return [], np.zeros(N + 1, dtype=np.int64)
    _check_cap(N, cap, force, "SAP enumeration")
    pid = _pattern_ids(lattice, pattern)
    if isinstance(where, Lattice):
        coords, nbr, start = _lattice_table(lattice, x, N)
    else:
        if x not in where.vertices:
            raise ValueError(f"{x} is not a vertex of the graph")
        coords, nbr, index = _graph_table(where)
        start = index[x]
    hist, out = _closing_walks(coords, nbr, start, N, pid, store=True)
    decoded = [tuple(tuple(int(c) for c in coords[i]) for i in row) for row in out]
    return decoded, hist


def sap_histogram(lattice: Lattice, x: Vertex, N: int, pattern: Pattern | None = None,
                  cap: int | None = DEFAULT_SAW_CAP, force: bool = False) -> np.ndarray:
    """``h[k]``: number of N-edge polygons through ``x`` whose f(P) has k occurrences."""
    if N == 1:
        h = np.zeros(2, dtype=np.int64)
        h[0] = 1
        return h
    if not _polygon_lengths_ok(lattice, N):
        return np.zeros(N + 1, dtype=np.int64)
    _check_cap(N, cap, force, "SAP enumeration")
    coords, nbr, start = _lattice_table(lattice, tuple(x), N)
    hist, _ = _closing_walks(coords, nbr, start, N, _pattern_ids(lattice, pattern), store=False)
    return hist


def count_saps(lattice: Lattice, x: Vertex, N: int, cap: int | None = DEFAULT_SAW_CAP,
               force: bool = False) -> int:
    return int(sap_histogram(lattice, x, N, cap=cap, force=force).sum())


def enumerate_saps(where, x: Vertex, N: int, cap: int | None = DEFAULT_SAW_CAP,
                   force: bool = False) -> list[Polygon]:
    """All N-edge polygons through ``x`` (``N = 1``: the degenerate polygon), each once."""
    lattice = where if isinstance(where, Lattice) else where.lattice
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if N == 1:
        return [Polygon.degenerate(tuple(x))]
    if not _polygon_lengths_ok(lattice, N):
        return []
    walks, _ = sap_walks(where, x, N, cap=cap, force=force)
    return [Polygon.from_walk(w) for w in walks]


def polygons_in(G: Graph, x: Vertex, max_length: int | None = None) -> list[Polygon]:
    """Every non-degenerate polygon inside ``G`` through ``x``, by increasing length."""
    top = len(G.vertices) if max_length is None else min(max_length, len(G.vertices))
    out = []
    for N in range(4, top + 1, 2):
        out.extend(enumerate_saps(G, x, N, cap=None))
    return out


def orient(P: Polygon, x: Vertex) -> Walk:
    """The canonical traversal f(P): of the two walks around P from ``x``, the lexicographically smaller."""
    x = tuple(x)
    if P.is_degenerate:
        raise ValueError("the degenerate polygon has no orientation")
    if x not in P.vertices:
        raise ValueError(f"{x} is not on the polygon")
    adj: dict = {}
    for a, b in P.edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    first = min(adj[x])
    sites = [x, first]
    while len(sites) < len(P):
        u, v = adj[sites[-1]]
        sites.append(u if u != sites[-2] else v)
    return Walk(tuple(sites))


def close(w: Walk) -> Polygon:
    return Polygon.from_walk(w.sites)


def pattern_p_prime(lattice: Lattice) -> Pattern:
    """The U-shaped pattern (o, e2, e1+e2, e1); on the hexagonal lattice five edges of one face."""
    if lattice.is_hexagonal:
        sites = ((0, 0), (0, 1), (1, 1), (2, 1), (2, 0), (1, 0))
        return Pattern(sites, name="hex-arc5")
    d = lattice.d
    o = (0,) * d
    e1 = (1,) + (0,) * (d - 1)
    e2 = (0, 1) + (0,) * (d - 2)
    e12 = (1, 1) + (0,) * (d - 2)
    return Pattern((o, e2, e12, e1), name="P'")


def occurrences(w: Walk, P: Walk) -> list[int]:
    """Steps ``j`` at which ``P`` occurs in ``w`` up to translation."""
    ws, ps = w.steps, P.steps
    m = len(ps)
    if m > len(ws):
        return []
    return [j for j in range(len(ws) - m + 1) if ws[j:j + m] == ps]


def pattern_stats(lattice: Lattice, x: Vertex, N: int, pattern: Pattern, kind: str = "saw",
                  cap: int | None = DEFAULT_SAW_CAP, force: bool = False) -> PatternStats:
    kind = kind.lower()
    if kind == "saw":
        hist = saw_histograms(lattice, x, N, pattern, cap=cap, force=force)[N]
    elif kind == "sap":
        hist = sap_histogram(lattice, x, N, pattern, cap=cap, force=force)
    else:
        raise ValueError(f"kind must be 'saw' or 'sap', got {kind!r}")
    return PatternStats(N, kind, tuple(int(c) for c in hist))


def deficient_counts(lattice: Lattice, x: Vertex, N: int, w: float, pattern: Pattern,
                     kind: str = "saw", cap: int | None = DEFAULT_SAW_CAP, force: bool = False) -> int:
    """Number of N-step SAWs (or N-edge SAPs, via f(P)) with fewer than ``w`` occurrences."""
    return pattern_stats(lattice, x, N, pattern, kind, cap=cap, force=force).deficient(w)


def q_squares(P: Polygon, x: Vertex, occ: Sequence[int], pattern: Pattern) -> list[Polygon]:
    """Minimal faces closing the pattern occurrences ``occ`` of f(P) (oriented from ``x``)."""
    w = orient(P, x)
    genuine = set(occurrences(w, pattern))
    m = len(pattern)
    out = []
    for j in occ:
        if j not in genuine:
            raise ValueError(f"no occurrence of the pattern at step {j}")
        out.append(Polygon.from_walk(w.sites[j:j + m + 1]))
    return out


def growth_estimates(counts: Mapping[int, int]) -> dict[int, float]:
    """Root estimates ``count ** (1/N)`` of the growth rate."""
    if not counts:
        raise ValueError("need at least one count")
    out = {}
    for N, c in sorted(counts.items()):
        if c <= 0 or N <= 0:
            raise ValueError(f"cannot take a root of count {c} at N={N}")
        out[N] = math.exp(math.log(c) / N)
    return out


def check_supermultiplicativity(saw_counts: Mapping[int, int], sap_counts: Mapping[int, int] | None = None,
                                d: int = 2, mu_bound: float | None = None) -> dict:
    """Check ``c_{m+n} <= c_m c_n`` and ``|SAP_x(N)| <= (d-1)/d * N * M**N``.

    ``M`` defaults to ``2d - 1``, an upper bound on the connective constant of Z^d.
    """
    M = 2 * d - 1 if mu_bound is None else mu_bound
    sub = []
    for m in saw_counts:
        for n in saw_counts:
            if m <= n and m >= 1 and m + n in saw_counts:
                sub.append({"m": m, "n": n, "lhs": saw_counts[m + n],
                            "rhs": saw_counts[m] * saw_counts[n],
                            "ok": saw_counts[m + n] <= saw_counts[m] * saw_counts[n]})
    sap = []
    for N, c in sorted((sap_counts or {}).items()):
        bound = (d - 1) / d * N * M**N
        sap.append({"N": N, "count": c, "bound": bound, "ok": c <= bound})
    return {
        "submultiplicative": sub,
        "sap_bound": sap,
        "ok": all(r["ok"] for r in sub) and all(r["ok"] for r in sap),
    }


def proper_internal_witness(lattice: Lattice, pattern: Pattern, k: int) -> Walk:
    """A self-avoiding walk on which ``pattern`` occurs at least ``k`` times.

    Copies of the pattern are chained by a short connector chosen so that each
    copy starts on a vertex of the same parity class.
    """
    if lattice.is_hexagonal:
        connector = ((0, -1), (1, 0), (0, -1), (1, 0), (1, 0))
    else:
        connector = ((1,) + (0,) * (lattice.d - 1),)
    steps = []
    for i in range(k):
        steps.extend(pattern.steps)
        if i < k - 1:
            steps.extend(connector)
    sites = [pattern.sites[0]]
    for s in steps:
        sites.append(tuple(a + b for a, b in zip(sites[-1], s)))
    w = Walk(tuple(sites))
    if not w.is_self_avoiding(lattice):
        raise RuntimeError("connector produced a non-self-avoiding walk")
    return w

