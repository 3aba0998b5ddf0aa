import itertools
import math

import pytest

from loopon import saw
from loopon.errors import CapExceeded
from loopon.lattice import Lattice, box_domain, neighbors
from loopon.loops import Polygon

Z2_SAW = [1, 4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100, 120292, 324932,
          881500, 2374444, 6416596, 17245332]
Z2_SAP = {4: 4, 6: 12, 8: 56, 10: 280, 12: 1488, 14: 8232, 16: 47008}


def brute_saws(lattice, N):
    """Every sequence of N lattice directions, kept when the path never revisits a site."""
    x = (0,) * lattice.d
    dirs = lattice.directions
    count = 0
    for seq in itertools.product(range(len(dirs)), repeat=N):
        sites = [x]
        ok = True
        for k in seq:
            v = tuple(a + b for a, b in zip(sites[-1], dirs[k]))
            if v in sites or v not in neighbors(lattice, sites[-1]):
                ok = False
                break
            sites.append(v)
        count += ok
    return count


def naive_occurrences(w, P):
    """Shifts ``j`` where the pattern's sites, translated to ``w.sites[j]``, are the next sites of ``w``."""
    m = len(P.sites)
    out = []
    for j in range(len(w.sites) - m + 1):
        shift = tuple(a - b for a, b in zip(w.sites[j], P.sites[0]))
        if all(tuple(a + b for a, b in zip(s, shift)) == w.sites[j + i] for i, s in enumerate(P.sites)):
            out.append(j)
    return out


@pytest.mark.parametrize("N", range(0, 9))
def test_saw_counts_brute_force_z2(z2, N):
    assert saw.enumerate_saws(z2, (0, 0), N) == brute_saws(z2, N) == Z2_SAW[N]


@pytest.mark.parametrize("N", range(0, 6))
def test_saw_counts_brute_force_hex(hexl, N):
    assert saw.enumerate_saws(hexl, (0, 0), N) == brute_saws(hexl, N)


def test_saw_counts_z2_to_16(z2):
    H = saw.saw_histograms(z2, (0, 0), 16)
    assert [int(r.sum()) for r in H] == Z2_SAW


def test_saw_counts_translation_invariant(z2, hexl):
    assert saw.enumerate_saws(z2, (5, -3), 10) == Z2_SAW[10]
    assert saw.enumerate_saws(hexl, (2, 4), 9) == saw.enumerate_saws(hexl, (0, 0), 9)


def test_saw_counts_z3():
    assert saw.enumerate_saws(Lattice.hypercubic(3), (0, 0, 0), 6) == 16926


def test_iter_saws_matches_count(z2, hexl):
    walks = list(saw.iter_saws(z2, (0, 0), 6))
    assert len(walks) == Z2_SAW[6] == len(set(walks))
    assert all(w.is_self_avoiding(z2) and len(w) == 6 for w in walks)
    assert sum(1 for _ in saw.iter_saws(hexl, (1, 0), 7)) == saw.enumerate_saws(hexl, (1, 0), 7)


def test_saw_cap(z2):
    with pytest.raises(CapExceeded):
        saw.enumerate_saws(z2, (0, 0), 21)
    with pytest.raises(CapExceeded):
        saw.enumerate_saws(z2, (0, 0), 9, cap=8)
    assert saw.enumerate_saws(z2, (0, 0), 9, cap=8, force=True) == Z2_SAW[9]


def test_walk_basics(z2):
    w = saw.Walk([(0, 0), (0, 1), (1, 1)])
    assert len(w) == 2 and w.steps == ((0, 1), (1, 0))
    assert w.is_self_avoiding(z2)
    assert not saw.Walk([(0, 0), (0, 1), (0, 0)]).is_self_avoiding(z2)
    assert not saw.Walk([(0, 0), (1, 1)]).is_self_avoiding(z2)
    with pytest.raises(ValueError):
        saw.Walk([])


# ------------------------------------------------------------------ polygons


def test_sap_counts_z2(z2):
    for N, c in Z2_SAP.items():
        assert saw.count_saps(z2, (0, 0), N) == c


def test_sap_counts_hex(hexl):
    assert saw.count_saps(hexl, (0, 0), 6) == 3
    assert saw.count_saps(hexl, (0, 0), 8) == 0
    assert saw.count_saps(hexl, (0, 0), 10) == 15


def test_sap_invalid_lengths(z2, hexl):
    assert saw.count_saps(z2, (0, 0), 5) == 0
    assert saw.count_saps(z2, (0, 0), 2) == 0
    assert saw.count_saps(hexl, (0, 0), 4) == 0
    assert saw.enumerate_saps(z2, (0, 0), 7) == []
    with pytest.raises(ValueError):
        saw.enumerate_saps(z2, (0, 0), -1)


def test_enumerate_saps_degenerate(z2):
    (P,) = saw.enumerate_saps(z2, (3, 4), 1)
    assert P.is_degenerate and P.vertices == {(3, 4)}


def test_saps_are_distinct_polygons_through_x(z2):
    for N in (4, 6, 8, 10):
        polys = saw.enumerate_saps(z2, (0, 0), N)
        assert len(polys) == len(set(polys)) == Z2_SAP[N]
        assert all(len(P) == N and (0, 0) in P.vertices for P in polys)


def test_sap_brute_force_from_saws(z2):
    # a polygon of length N is a SAW of N-1 steps ending next to its start
    for N in (4, 6, 8):
        found = set()
        for w in saw.iter_saws(z2, (0, 0), N - 1):
            if w.sites[-1] in neighbors(z2, w.sites[0]):
                found.add(Polygon.from_walk(w.sites))
        assert found == set(saw.enumerate_saps(z2, (0, 0), N))


def test_orient_round_trip(z2):
    for P in saw.enumerate_saps(z2, (0, 0), 8):
        w = saw.orient(P, (0, 0))
        assert w.sites[0] == (0, 0) and len(w.sites) == 8
        assert w.sites[1] < w.sites[-1]
        assert saw.close(w) == P


def test_orient_errors(square):
    P = Polygon.from_edges(square.edges)
    with pytest.raises(ValueError):
        saw.orient(P, (5, 5))
    with pytest.raises(ValueError):
        saw.orient(Polygon.degenerate((0, 0)), (0, 0))


def test_sap_walks_are_canonical(z2):
    walks, _ = saw.sap_walks(z2, (0, 0), 10)
    for sites in walks:
        assert saw.orient(Polygon.from_walk(sites), (0, 0)).sites == tuple(sites)


def test_polygons_in_box(box3, box4):
    assert len(saw.polygons_in(box3, (1, 1))) == 12
    assert len(saw.polygons_in(box3, (0, 0))) == 1 + 2 + 3 + 1
    inside = saw.polygons_in(box4, (1, 1), 8)
    assert all(P.vertices <= box4.vertices for P in inside)
    with pytest.raises(ValueError):
        saw.sap_walks(box3, (9, 9), 4)


# ------------------------------------------------------------------ patterns


def test_pattern_p_prime_z2(z2):
    P = saw.pattern_p_prime(z2)
    assert P.sites == ((0, 0), (0, 1), (1, 1), (1, 0))
    assert P.steps == ((0, 1), (1, 0), (0, -1))
    assert P.is_self_avoiding(z2)


def test_pattern_p_prime_z3_and_hex(hexl):
    P3 = saw.pattern_p_prime(Lattice.hypercubic(3))
    assert P3.steps == ((0, 1, 0), (1, 0, 0), (0, -1, 0))
    Ph = saw.pattern_p_prime(hexl)
    assert Ph.name == "hex-arc5" and len(Ph) == 5
    assert Ph.is_self_avoiding(hexl)
    # five edges of one hexagonal face: closing it takes one more edge
    assert Ph.sites[-1] in neighbors(hexl, Ph.sites[0])


@pytest.mark.parametrize("lat", ["z2", "z3", "hex"])
@pytest.mark.parametrize("k", range(1, 6))
def test_proper_internal_witness(lat, k, z2, hexl):
    lattice = {"z2": z2, "z3": Lattice.hypercubic(3), "hex": hexl}[lat]
    P = saw.pattern_p_prime(lattice)
    w = saw.proper_internal_witness(lattice, P, k)
    assert w.is_self_avoiding(lattice)
    assert len(saw.occurrences(w, P)) >= k


def test_occurrences_match_naive(z2, hexl):
    for lattice, N in ((z2, 8), (hexl, 9)):
        P = saw.pattern_p_prime(lattice)
        for w in saw.iter_saws(lattice, (0, 0), N):
            assert saw.occurrences(w, P) == naive_occurrences(w, P)


def test_occurrences_short_walk(z2):
    P = saw.pattern_p_prime(z2)
    assert saw.occurrences(saw.Walk([(0, 0), (0, 1)]), P) == []


def test_histogram_matches_naive(z2):
    P = saw.pattern_p_prime(z2)
    stats = saw.pattern_stats(z2, (0, 0), 8, P)
    naive = [0] * len(stats.histogram)
    for w in saw.iter_saws(z2, (0, 0), 8):
        naive[len(naive_occurrences(w, P))] += 1
    assert list(stats.histogram) == naive
    assert stats.total == Z2_SAW[8]


def test_deficient_edge_cases(z2):
    P = saw.pattern_p_prime(z2)
    for N in (4, 8, 12):
        assert saw.deficient_counts(z2, (0, 0), N, 0, P) == 0
        assert saw.deficient_counts(z2, (0, 0), N, N + 1, P) == Z2_SAW[N]
    with pytest.raises(ValueError):
        saw.pattern_stats(z2, (0, 0), 4, P, kind="bridge")


def test_deficient_saps_filter_oracle(z2):
    P = saw.pattern_p_prime(z2)
    walks, _ = saw.sap_walks(z2, (0, 0), 12, P)
    for w in (1, 2, 3):
        filt = sum(1 for s in walks if len(naive_occurrences(saw.Walk(s), P)) < w)
        assert saw.deficient_counts(z2, (0, 0), 12, w, P, kind="sap") == filt


def test_deficient_fraction_nonincreasing(z2):
    P = saw.pattern_p_prime(z2)
    fr = [saw.deficient_counts(z2, (0, 0), N, 1, P) / Z2_SAW[N] for N in range(6, 17, 2)]
    assert all(a >= b for a, b in zip(fr, fr[1:]))
    assert math.isclose(fr[0], 0.9308, abs_tol=5e-5)
    assert math.isclose(fr[-1], 0.8096, abs_tol=5e-5)


def test_q_squares_examples(z2):
    P_pat = saw.pattern_p_prime(z2)
    unit = Polygon.from_walk([(0, 0), (0, 1), (1, 1), (1, 0)])
    occ = saw.occurrences(saw.orient(unit, (0, 0)), P_pat)
    assert occ == [0]
    assert saw.q_squares(unit, (0, 0), occ, P_pat) == [unit]
    tall = Polygon.from_walk([(0, 0), (0, 1), (0, 2), (1, 2), (1, 1), (1, 0)])
    occ = saw.occurrences(saw.orient(tall, (0, 0)), P_pat)
    assert occ == [1]
    (Q,) = saw.q_squares(tall, (0, 0), occ, P_pat)
    assert Q.vertices == {(0, 1), (0, 2), (1, 2), (1, 1)}
    with pytest.raises(ValueError):
        saw.q_squares(tall, (0, 0), [0], P_pat)


def test_q_squares_disjoint_small(z2):
    P_pat = saw.pattern_p_prime(z2)
    for N in (8, 10, 12):
        walks, _ = saw.sap_walks(z2, (0, 0), N)
        for s in walks:
            occ = saw.occurrences(saw.Walk(s), P_pat)
            sq = saw.q_squares(Polygon.from_walk(s), (0, 0), occ, P_pat)
            verts = [v for Q in sq for v in Q.vertices]
            assert len(verts) == len(set(verts))


# ------------------------------------------------------------------ growth


def test_growth_estimates(z2):
    est = saw.growth_estimates({N: Z2_SAW[N] for N in range(10, 17)})
    assert all(2.6 < v < 3.0 for v in est.values())
    vals = list(est.values())
    assert vals == sorted(vals, reverse=True)
    with pytest.raises(ValueError):
        saw.growth_estimates({})
    with pytest.raises(ValueError):
        saw.growth_estimates({0: 1})


def test_supermultiplicativity(z2):
    res = saw.check_supermultiplicativity({N: Z2_SAW[N] for N in range(1, 17)}, Z2_SAP, d=2)
    assert res["ok"]
    row = next(r for r in res["submultiplicative"] if r["m"] == 2 and r["n"] == 2)
    assert row["lhs"] == 100 and row["rhs"] == 144
    first = res["sap_bound"][0]
    assert first["count"] == 4 and first["bound"] == 162
    bad = saw.check_supermultiplicativity({1: 4, 2: 17})
    assert not bad["ok"]
