from fractions import Fraction

import numpy as np
import pytest

from loopon import mc
from loopon.enumerate import enumerate_configs, loop_length_distribution, partition_function
from loopon.lattice import box_domain, domain_minus
from loopon.loops import _components, is_valid_config, weight_of
from loopon.params import ModelParams


def _w(edges, p):
    return weight_of(len(edges), len(_components(edges)), p)


@pytest.fixture(scope="module")
def hexbox(hexl):
    return box_domain(hexl, (0, 0), (5, 4))


def test_list_faces(square, box3, hexbox, z2):
    assert len(mc.list_faces(square)) == 1
    assert len(mc.list_faces(box3)) == 4
    assert mc.list_faces(domain_minus(box3, {(1, 1)})) == []
    assert len(mc.list_faces(hexbox)) == 5 and len(hexbox.edges) == 24
    assert all(len(f.cycle) == 6 for f in mc.list_faces(hexbox))
    assert len(mc.list_faces(box_domain(z2.hypercubic(3), (0, 0, 0), (2, 2, 2)))) == 6


def test_acceptance_probability():
    one = ModelParams(1, 1)
    assert mc.acceptance_probability(one, 4, 1) == 1
    p = ModelParams(0.5, 2, "float")
    assert mc.acceptance_probability(p, 4, 1) == 0.125
    assert mc.acceptance_probability(p, -4, -1) == 1
    assert mc.acceptance_probability(ModelParams(1, 0), 4, 1) == 0
    assert mc.acceptance_probability(ModelParams(0, 1), 4, 1) == 0
    assert mc.acceptance_probability(ModelParams(0, 1), -4, -1) == 1


def test_flip_from_empty_accepted_at_one(square):
    state = mc.ChainState(square, ModelParams(1, 1), rng_seed=0)
    assert mc.propose(state, state.faces[0], 0.999999)
    assert state.config == set(square.edges)


def test_n_zero_stays_empty(hexbox):
    rep = mc.run(hexbox, ModelParams(0.9, 0), sweeps=2000, seed=3, marked=[(2, 1)])
    assert rep.final_config == frozenset()
    assert rep.histograms[(2, 1)] == {0: 2000}
    assert rep.acceptance_rate == 0


def test_step_python_path(hexbox):
    state = mc.ChainState(hexbox, ModelParams(0.8, 1.5), rng_seed=5)
    for _ in range(500):
        mc.step(state)
    assert state.step_counter == 500
    assert 0 < state.accepted < 500
    assert is_valid_config(hexbox, state.config)
    with pytest.raises(ValueError):
        mc.ChainState(hexbox, ModelParams(1, 1), 0, config={((0, 0), (1, 0))})


def test_detailed_balance_exact_square(square):
    p = ModelParams("1/2", 2)
    states, P = mc.transition_matrix(square, p)
    assert len(states) == 2
    Z = partition_function(square, p)
    pi = [_w(s, p) / Z for s in states]
    for i in range(2):
        assert sum(P[i]) == 1
        assert sum(pi[j] * P[j][i] for j in range(2)) == pi[i]
        for j in range(2):
            assert pi[i] * P[i][j] == pi[j] * P[j][i]
    assert all(isinstance(x, Fraction) for row in P for x in row)


def test_detailed_balance_exact_hex(hexbox):
    p = ModelParams("4/5", "3/2")
    states, P = mc.transition_matrix(hexbox, p)
    Z = partition_function(hexbox, p)
    pi = [_w(s, p) / Z for s in states]
    k = len(states)
    assert k == 32
    for i in range(k):
        assert sum(pi[j] * P[j][i] for j in range(k)) == pi[i]
        for j in range(k):
            assert pi[i] * P[i][j] == pi[j] * P[j][i]


def test_kernel_matches_python_path(hexbox):
    p = ModelParams(0.8, 1.5, "float")
    rng = np.random.default_rng(11)
    F = len(mc.list_faces(hexbox))
    fs, us = rng.integers(0, F, 3000), rng.random(3000)
    traj = mc.trajectory(hexbox, p, fs, us)
    state = mc.ChainState(hexbox, p, rng_seed=0)
    for f, u, want in zip(fs, us, traj):
        mc.propose(state, state.faces[int(f)], float(u))
        assert frozenset(state.config) == want


def test_local_and_full_recount_agree(hexbox, box4):
    for G in (hexbox, box4):
        p = ModelParams(0.9, 1.7, "float")
        rng = np.random.default_rng(2)
        F = len(mc.list_faces(G))
        fs, us = rng.integers(0, F, 5000), rng.random(5000)
        assert mc.trajectory(G, p, fs, us) == mc.trajectory(G, p, fs, us, full_recount=True)


def test_run_reproducible(hexbox):
    p = ModelParams(0.8, 1.5)
    a = mc.run(hexbox, p, sweeps=5000, burn_in=10, seed=7, marked=[(2, 1)])
    b = mc.run(hexbox, p, sweeps=5000, burn_in=10, seed=7, marked=[(2, 1)], block_sweeps=777)
    c = mc.run(hexbox, p, sweeps=5000, burn_in=10, seed=8, marked=[(2, 1)])
    assert a.to_json() == b.to_json()
    assert a.histograms != c.histograms
    data = a.to_json()
    assert data["rng"] == "numpy.random.PCG64" and data["heuristic"] is False
    assert sum(n for _, n in data["histograms"][0]["counts"]) == 5000


def test_run_errors(hexbox, box3):
    p = ModelParams(1, 1)
    with pytest.raises(ValueError):
        mc.run(hexbox, p, sweeps=0)
    with pytest.raises(ValueError):
        mc.run(hexbox, p, sweeps=10, burn_in=-1)
    with pytest.raises(ValueError):
        mc.run(domain_minus(box3, {(1, 1)}), p, sweeps=10)
    with pytest.raises(ValueError):
        mc.run(hexbox, p, sweeps=10, marked=[(40, 40)])


def test_z2_flagged_heuristic(box3):
    assert mc.run(box3, ModelParams(1, 1), sweeps=10).heuristic is True


def test_hex_coverage(hexbox):
    cov = mc.coverage(hexbox, ModelParams(1, 1), sweeps=2000, seed=1)
    assert cov == {"visited": 32, "total": 32, "fraction": 1.0}


def test_tv_distance():
    assert mc.tv_distance({0: 0.5, 4: 0.5}, {0: 0.5, 4: 0.5}) == 0
    assert mc.tv_distance({0: 1.0}, {4: 1.0}) == 1
    assert mc.tv_distance({0: 0.75, 4: 0.25}, {0: Fraction(1, 2), 4: Fraction(1, 2)}) == 0.25


def test_mc_converges_to_exact_law(hexbox):
    p = ModelParams(0.8, 1.5)
    x = (2, 1)
    exact = loop_length_distribution(hexbox, x, p).length_law
    tvs = []
    for sweeps in (5000, 80000):
        rep = mc.run(hexbox, p, sweeps=sweeps, burn_in=100, seed=4, marked=[x])
        tvs.append(mc.tv_distance(rep.length_law(x), exact))
    assert tvs[1] < 0.02
    assert tvs[1] <= tvs[0] + 0.005


def test_mean_observables(hexbox):
    p = ModelParams(0.8, 1.5)
    rep = mc.run(hexbox, p, sweeps=100000, burn_in=100, seed=9, marked=[(2, 1)])
    configs = list(enumerate_configs(hexbox))
    Z = partition_function(hexbox, p)
    mean_o = sum(len(k.active_edges) * _w(k.active_edges, p) for k in configs) / Z
    assert abs(rep.mean_edges - float(mean_o)) < 0.1
