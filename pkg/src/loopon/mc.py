"""Metropolis face-flip sampler for the loop O(n) measure.

A move picks a minimal face uniformly, proposes the symmetric difference of the
current configuration with the face boundary, rejects it if some degree leaves
{0, 2}, and otherwise accepts with probability ``min(1, lam**d_edges * n**d_loops)``.

On the hexagonal lattice every even subgraph is a valid configuration and the
face boundaries span the cycle space of a simply connected domain, so the chain
is irreducible there. On Z^d this is not established and reports are flagged
``heuristic``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .enumerate import enumerate_configs
from .lattice import Edge, Graph, Vertex, edge
from .loops import LoopConfig, _components, is_valid_config
from .params import ModelParams, NumberMode

logger = logging.getLogger(__name__)

RNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True)
class Face:
    """Boundary of a minimal lattice face, as a cyclic vertex list."""

    cycle: tuple

    @property
    def edges(self) -> tuple[Edge, ...]:
        c = self.cycle
        return tuple(edge(c[i], c[(i + 1) % len(c)]) for i in range(len(c)))

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.cycle)


def _face_cycles(lattice, v: Vertex):
    if lattice.is_hexagonal:
        x, y = v
        if (x + y) % 2 == 0:
            yield ((x, y), (x, y + 1), (x + 1, y + 1), (x + 2, y + 1), (x + 2, y), (x + 1, y))
        return
    d = lattice.d
    for i in range(d):
        for j in range(i + 1, d):
            ei = tuple(int(k == i) for k in range(d))
            ej = tuple(int(k == j) for k in range(d))
            a = tuple(p + q for p, q in zip(v, ei))
            b = tuple(p + q + r for p, q, r in zip(v, ei, ej))
            c = tuple(p + q for p, q in zip(v, ej))
            yield (v, a, b, c)


def list_faces(G: Graph) -> list[Face]:
    """All minimal faces whose every edge lies in ``G``, ordered by their lowest vertex."""
    out = []
    for v in G.sorted_vertices:
        for cyc in _face_cycles(G.lattice, v):
            f = Face(cyc)
            if all(e in G.edges for e in f.edges):
                out.append(f)
    return out


class _Arrays:
    """Integer encoding of a domain for the compiled chain."""

    def __init__(self, G: Graph, faces: Sequence[Face]):
        self.vertices = G.sorted_vertices
        self.edges = G.sorted_edges
        vidx = {v: i for i, v in enumerate(self.vertices)}
        self.eidx = {e: i for i, e in enumerate(self.edges)}
        self.other = np.array([[vidx[a], vidx[b]] for a, b in self.edges], dtype=np.int64).reshape(-1, 2)
        width = max((len(x) for x in G.incident().values()), default=0) or 1
        self.inc = np.full((len(self.vertices), width), -1, dtype=np.int64)
        for v, es in G.incident().items():
            for q, e in enumerate(es):
                self.inc[vidx[v], q] = self.eidx[e]
        k = len(faces[0].cycle) if faces else 4
        self.faces = np.array([[self.eidx[e] for e in f.edges] for f in faces], dtype=np.int64).reshape(-1, k)
        self.vidx = vidx

    def encode(self, edges) -> tuple[np.ndarray, np.ndarray]:
        active = np.zeros(len(self.edges), dtype=np.bool_)
        deg = np.zeros(len(self.vertices), dtype=np.int64)
        for e in edges:
            i = self.eidx[e]
            active[i] = True
            deg[self.other[i]] += 1
        return active, deg

    def decode(self, active: np.ndarray) -> frozenset:
        return frozenset(self.edges[i] for i in np.flatnonzero(active))


def acceptance_probability(p: ModelParams, d_edges: int, d_loops: int) -> float:
    lam, n = float(p.lam), float(p.n)
    ratio = 1.0
    if d_edges:
        if lam == 0.0:
            return 0.0 if d_edges > 0 else 1.0
        ratio *= lam**d_edges
    if d_loops:
        if n == 0.0:
            return 0.0 if d_loops > 0 else 1.0
        ratio *= n**d_loops
    return min(1.0, ratio)


@dataclass
class ChainState:
    """Mutable chain state; ``config`` is the current set of active edges."""

    domain: Graph
    params: ModelParams
    rng_seed: int
    config: set = field(default_factory=set)
    step_counter: int = 0
    accepted: int = 0

    def __post_init__(self):
        self.faces = list_faces(self.domain)
        self.rng = np.random.Generator(np.random.PCG64(self.rng_seed))
        self.config = {edge(*e) for e in self.config}
        if not is_valid_config(self.domain, self.config):
            raise ValueError("initial configuration is not valid")

    def snapshot(self) -> LoopConfig:
        return LoopConfig(self.domain, frozenset(self.config))


def propose(state: ChainState, face: Face, u: float) -> bool:
    """Apply one Metropolis flip of ``face`` with uniform ``u``; return whether it was accepted."""
    new = set(state.config).symmetric_difference(face.edges)
    if not is_valid_config(state.domain, new):
        return False
    d_edges = len(new) - len(state.config)
    d_loops = len(_components(new)) - len(_components(state.config))
    if u < acceptance_probability(state.params, d_edges, d_loops):
        state.config = new
        return True
    return False


def step(state: ChainState) -> ChainState:
    """One Metropolis move drawn from the state's own generator."""
    if not state.faces:
        raise ValueError("domain has no complete face")
    f = int(state.rng.integers(len(state.faces)))
    u = float(state.rng.random())
    if propose(state, state.faces[f], u):
        state.accepted += 1
    state.step_counter += 1
    assert is_valid_config(state.domain, state.config)
    return state


@dataclass
class MCReport:
    params: ModelParams
    seed: int
    sweeps: int
    burn_in: int
    n_faces: int
    steps: int
    acceptance_rate: float
    mean_edges: float
    mean_loops: float
    histograms: dict
    heuristic: bool
    lattice: str
    domain: dict
    final_config: frozenset = field(repr=False, default=frozenset())

    def length_law(self, x: Vertex) -> dict[int, float]:
        h = self.histograms[tuple(x)]
        total = sum(h.values())
        return {ell: c / total for ell, c in sorted(h.items())}

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "seed": self.seed,
            "rng": RNG_NAME,
            "sweeps": self.sweeps,
            "burn_in": self.burn_in,
            "faces": self.n_faces,
            "steps": self.steps,
            "acceptance_rate": self.acceptance_rate,
            "mean_edges": self.mean_edges,
            "mean_loops": self.mean_loops,
            "heuristic": self.heuristic,
            "lattice": self.lattice,
            "domain": self.domain,
            "histograms": [
                {"vertex": list(v), "counts": [[ell, c] for ell, c in sorted(h.items())]}
                for v, h in sorted(self.histograms.items())
            ],
        }


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    # separate face and uniform streams, so the draws do not depend on the block size
    face_ss, u_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(face_ss)), np.random.Generator(np.random.PCG64(u_ss))


def _block_draws(streams, n_faces: int, size: int):
    face_rng, u_rng = streams
    return face_rng.integers(0, n_faces, size=size, dtype=np.int64), u_rng.random(size)


def run(G: Graph, params: ModelParams, sweeps: int, burn_in: int = 0, seed: int = 0,
        marked: Sequence[Vertex] | None = None, full_recount: bool = False,
        block_sweeps: int = 100_000, initial: frozenset = frozenset()) -> MCReport:
    """Run one chain for ``burn_in + sweeps`` sweeps of ``|faces|`` moves each.

    Observables are sampled once per sweep after burn-in. The same inputs and
    seed always give the same report.
    """
    sweeps, burn_in = int(sweeps), int(burn_in)
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    faces = list_faces(G)
    if not faces:
        raise ValueError("domain has no complete face; nothing to sample")
    if params.mode is not NumberMode.FLOAT:
        params = ModelParams(params.lam, params.n, NumberMode.FLOAT)
    marked = [tuple(v) for v in (marked if marked is not None else G.sorted_vertices[:1])]
    for v in marked:
        if v not in G.vertices:
            raise ValueError(f"marked vertex {v} is not in the domain")
    arr = _Arrays(G, faces)
    active, deg = arr.encode({edge(*e) for e in initial})
    rng = _streams(seed)
    F = len(faces)
    total_sweeps = burn_in + sweeps
    hist = np.zeros((len(marked), len(G.vertices) + 1), dtype=np.int64)
    marked_idx = np.array([arr.vidx[v] for v in marked], dtype=np.int64)
    no_masks = np.zeros(0, dtype=np.int64)
    accepted = 0
    sum_o = sum_L = 0.0
    samples = 0
    done = 0
    while done < total_sweeps:
        chunk = min(block_sweeps, total_sweeps - done)
        faces_seq, u_seq = _block_draws(rng, F, chunk * F)
        burn_left = max(0, burn_in - done)
        acc, _, so, sl, ns = _kernels.flip_chain(
            active, deg, arr.faces, arr.inc, arr.other, float(params.lam), float(params.n),
            faces_seq, u_seq, F, burn_left, marked_idx, hist, full_recount, no_masks)
        accepted += acc
        sum_o += so
        sum_L += sl
        samples += ns
        done += chunk
    histograms = {
        v: {ell: int(c) for ell, c in enumerate(hist[i]) if c}
        for i, v in enumerate(marked)
    }
    steps = total_sweeps * F
    logger.debug("chain finished: %d steps, %d accepted", steps, accepted)
    return MCReport(
        params=params, seed=seed, sweeps=sweeps, burn_in=burn_in, n_faces=F, steps=steps,
        acceptance_rate=accepted / steps, mean_edges=sum_o / samples, mean_loops=sum_L / samples,
        histograms=histograms, heuristic=not G.lattice.is_hexagonal, lattice=G.lattice.name,
        domain=G.to_json(), final_config=arr.decode(active),
    )


def trajectory(G: Graph, params: ModelParams, face_seq: Sequence[int], u_seq: Sequence[float],
               initial: frozenset = frozenset(), full_recount: bool = False) -> list[frozenset]:
    """Configurations after each move of the compiled chain for given draws (small domains)."""
    faces = list_faces(G)
    arr = _Arrays(G, faces)
    if len(arr.edges) > 62:
        raise ValueError("trajectory recording needs at most 62 edges")
    active, deg = arr.encode({edge(*e) for e in initial})
    face_seq = np.asarray(face_seq, dtype=np.int64)
    masks = np.zeros(len(face_seq), dtype=np.int64)
    hist = np.zeros((0, 1), dtype=np.int64)
    _kernels.flip_chain(active, deg, arr.faces, arr.inc, arr.other, float(params.lam), float(params.n),
                        face_seq, np.asarray(u_seq, dtype=np.float64), max(len(faces), 1), 0,
                        np.zeros(0, dtype=np.int64), hist, full_recount, masks)
    return [frozenset(arr.edges[i] for i in range(len(arr.edges)) if m >> i & 1) for m in masks]


def tv_distance(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(k, 0)) - float(q.get(k, 0))) for k in keys)


def coverage(G: Graph, params: ModelParams, sweeps: int, seed: int = 0) -> dict:
    """Fraction of the enumerated configurations that one chain visits."""
    faces = list_faces(G)
    if not faces:
        raise ValueError("domain has no complete face")
    rng = _streams(seed)
    fs, us = _block_draws(rng, len(faces), int(sweeps) * len(faces))
    visited = set(trajectory(G, params, fs, us))
    visited.add(frozenset())
    every = {k.active_edges for k in enumerate_configs(G, cap=None)}
    return {"visited": len(visited & every), "total": len(every), "fraction": len(visited & every) / len(every)}


def transition_matrix(G: Graph, params: ModelParams) -> tuple[list[frozenset], list[list]]:
    """Exact single-move transition matrix over the enumerated configurations (small domains).

    Entries are computed in the params' number mode, so rational inputs give exact rows.
    """
    faces = list_faces(G)
    states = [k.active_edges for k in enumerate_configs(G, cap=None)]
    index = {s: i for i, s in enumerate(states)}
    one = params.one
    P = [[params.zero for _ in states] for _ in states]
    for i, s in enumerate(states):
        stay = one
        for f in faces:
            new = frozenset(s.symmetric_difference(f.edges))
            if new not in index:
                continue
            d_e = len(new) - len(s)
            d_l = len(_components(new)) - len(_components(s))
            ratio = _exact_ratio(params, d_e, d_l)
            prob = (one if ratio >= 1 else ratio) / len(faces)
            P[i][index[new]] += prob
            stay -= prob
        P[i][i] += stay
    return states, P


def _exact_ratio(p: ModelParams, d_e: int, d_l: int):
    if (p.lam == 0 and d_e > 0) or (p.n == 0 and d_l > 0):
        return p.zero
    if (p.lam == 0 and d_e < 0) or (p.n == 0 and d_l < 0):
        return p.one
    return p.lam**d_e * p.n**d_l
