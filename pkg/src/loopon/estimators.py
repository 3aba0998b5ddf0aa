"""scikit-learn style wrappers: fit on a domain (or nothing), then transform/predict."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import bounds, enumerate as _enum, mc
from .lattice import Graph
from .params import ModelParams, NumberMode


def _check_domain(G) -> Graph:
    if not isinstance(G, Graph):
        raise TypeError(f"expected a Domain, got {type(G).__name__}")
    if G.is_empty:
        raise ValueError("cannot fit on the empty domain")
    return G


class ExactLoopModel(BaseEstimator, TransformerMixin):
    """Exact enumeration of the loop O(n) model on a small domain.

    Parameters
    ----------
    lam, n : number or str
        Edge and loop weights; strings such as ``"1/2"`` are read exactly.
    mode : {"rational", "float"}
    marked : vertex or None
        Vertex whose loop-length law is computed (first vertex if None).
    cap : int
        Largest number of domain edges accepted.

    Attributes
    ----------
    Z_ : partition function at ``(lam, n)``
    length_law_ : dict mapping loop length to probability at ``marked``
    polynomial_ : dict mapping ``(edges, loops)`` to configuration counts
    n_configs_ : int
    """

    def __init__(self, lam=1, n=1, mode="rational", marked=None, cap=_enum.DEFAULT_EDGE_CAP):
        self.lam = lam
        self.n = n
        self.mode = mode
        self.marked = marked
        self.cap = cap

    def fit(self, G, y=None):
        G = _check_domain(G)
        self.params_ = ModelParams(self.lam, self.n, NumberMode.parse(self.mode))
        x = tuple(self.marked) if self.marked is not None else G.sorted_vertices[0]
        res = _enum.loop_length_distribution(G, x, self.params_, cap=self.cap)
        self.domain_ = G
        self.Z_ = res.Z
        self.length_law_ = res.length_law
        self.n_configs_ = res.per_config_visit_count
        self.polynomial_ = _enum.config_polynomial(G, cap=self.cap)
        return self

    def transform(self, X):
        """Partition function at each row ``(lam, n)`` of ``X`` (float evaluation)."""
        check_is_fitted(self, "polynomial_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"X must have two columns (lam, n), got {X.shape[1]}")
        out = np.empty((X.shape[0], 1))
        for i, (lam, n) in enumerate(X):
            out[i, 0] = _enum.evaluate(self.polynomial_, ModelParams(lam, n, NumberMode.FLOAT))
        return out

    def exp_moment(self, delta: float) -> float:
        check_is_fitted(self, "length_law_")
        return float(sum(float(q) * np.exp(delta * ell) for ell, q in sorted(self.length_law_.items())))


class LoopSampler(BaseEstimator):
    """Metropolis face-flip sampler; ``fit`` runs one seeded chain on a domain.

    Attributes
    ----------
    report_ : mc.MCReport
    acceptance_rate_ : float
    length_laws_ : dict mapping each marked vertex to its empirical loop-length law
    """

    def __init__(self, lam=0.5, n=1.0, sweeps=10_000, burn_in=100, seed=0, marked=None, full_recount=False):
        self.lam = lam
        self.n = n
        self.sweeps = sweeps
        self.burn_in = burn_in
        self.seed = seed
        self.marked = marked
        self.full_recount = full_recount

    def fit(self, G, y=None):
        G = _check_domain(G)
        p = ModelParams(self.lam, self.n, NumberMode.FLOAT)
        marked = None if self.marked is None else [tuple(v) for v in self.marked]
        self.report_ = mc.run(G, p, self.sweeps, self.burn_in, self.seed, marked, self.full_recount)
        self.acceptance_rate_ = self.report_.acceptance_rate
        self.length_laws_ = {v: self.report_.length_law(v) for v in self.report_.histograms}
        return self

    def tv_distance(self, exact_law: dict, vertex=None) -> float:
        check_is_fitted(self, "length_laws_")
        v = tuple(vertex) if vertex is not None else next(iter(self.length_laws_))
        return mc.tv_distance(self.length_laws_[v], exact_law)


class ThresholdCurveEstimator(BaseEstimator, TransformerMixin):
    """Lower bound ``min(2/(mu + mu'), lambda_1(n))`` on the critical edge weight as a function of n.

    ``transform`` maps a column of n values to columns
    ``(lambda1, lambda1_prime, combined, slope_model)``; ``predict`` returns ``combined``.
    """

    def __init__(self, mu=2.64, mu_prime=2.0, a_prime=0.01):
        self.mu = mu
        self.mu_prime = mu_prime
        self.a_prime = a_prime

    def fit(self, X=None, y=None):
        self.inputs_ = bounds.ThresholdInputs(float(self.mu), float(self.mu_prime), float(self.a_prime))
        self.lambda1_prime_ = bounds.lambda1_prime(self.inputs_.mu, self.inputs_.mu_prime)
        self.slope_ = bounds.taylor_slope(self.inputs_)
        return self

    def transform(self, X):
        check_is_fitted(self, "inputs_")
        ns = check_array(X, dtype=np.float64, ensure_2d=False).reshape(-1)
        if (ns < 0).any():
            raise ValueError("n values must be nonnegative")
        curve = bounds.threshold_curve(ns, self.inputs_)
        return np.array([row[1:] for row in curve.rows()], dtype=np.float64).reshape(-1, 4)

    def predict(self, X):
        return self.transform(X)[:, 2]
