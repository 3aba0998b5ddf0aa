"""Threshold numerics: the shifted lower bound on the critical edge weight.

Given a growth-rate estimate ``mu``, a pattern-deficient growth rate
``mu_prime < mu`` and a pattern density ``a_prime``, the bound is
``min(2 / (mu + mu_prime), lambda_1(n))`` where ``lambda_1(n)`` is the smallest
root above ``1/mu`` of ``lam * mu = (1 + lam**4 * n) ** a_prime``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import bisect

from .saw import pattern_p_prime, pattern_stats


@dataclass(frozen=True)
class ThresholdInputs:
    mu: float
    mu_prime: float
    a_prime: float = 0.01

    def __post_init__(self):
        if not (0 < self.mu_prime < self.mu):
            raise ValueError(f"need 0 < mu_prime < mu, got mu={self.mu}, mu_prime={self.mu_prime}")
        if not (0 < self.a_prime < 1):
            raise ValueError(f"a_prime must lie in (0, 1), got {self.a_prime}")


def lambda1_prime(mu: float, mu_prime: float) -> float:
    if not (0 < mu_prime < mu):
        raise ValueError(f"need 0 < mu_prime < mu, got mu={mu}, mu_prime={mu_prime}")
    return 2.0 / (mu + mu_prime)


def _residual(lam: float, n: float, mu: float, a_prime: float) -> float:
    return lam * mu - (1.0 + lam**4 * n) ** a_prime


def solve_lambda1(n: float, inputs: ThresholdInputs, lam_cap: float | None = None,
                  grid_points: int = 4000) -> float:
    """Smallest ``lam > 1/mu`` solving ``lam * mu = (1 + lam**4 n)**a_prime`` (bisection, tol 1e-12)."""
    mu, a = inputs.mu, inputs.a_prime
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0 / mu
    lo = 1.0 / mu
    hi = 10.0 / mu if lam_cap is None else lam_cap
    grid = np.linspace(lo, hi, grid_points)
    vals = grid * mu - (1.0 + grid**4 * n) ** a
    sign = vals >= 0
    if not sign.any():
        raise ValueError(f"no root of lam*mu = (1+lam^4 n)^a' in [{lo}, {hi}] for n={n}, a'={a}")
    i = int(np.argmax(sign))
    if (~sign[i:]).any():
        warnings.warn(f"second sign change of the threshold equation below lam={hi} (n={n}, a'={a}); "
                      "returning the smallest root", RuntimeWarning, stacklevel=2)
    return bisect(_residual, grid[i - 1], grid[i], args=(n, mu, a), xtol=1e-15, maxiter=200)


def taylor_slope(inputs: ThresholdInputs) -> float:
    """Small-n slope ``a_prime / mu**5`` of ``lambda_1(n) - 1/mu``."""
    return inputs.a_prime / inputs.mu**5


def combined_lower_bound(n: float, inputs: ThresholdInputs) -> float:
    return min(lambda1_prime(inputs.mu, inputs.mu_prime), solve_lambda1(n, inputs))


@dataclass
class ThresholdCurve:
    inputs: ThresholdInputs
    samples: list

    HEADER = ("n", "lambda1", "lambda1_prime", "combined", "slope_model")

    def rows(self) -> list[tuple]:
        mu = self.inputs.mu
        slope = taylor_slope(self.inputs)
        return [(n, l1, l1p, comb, 1.0 / mu + slope * n) for n, l1, l1p, comb in self.samples]

    def to_csv(self) -> str:
        lines = [",".join(self.HEADER)]
        for row in self.rows():
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def threshold_curve(n_grid: Iterable[float], inputs: ThresholdInputs) -> ThresholdCurve:
    l1p = lambda1_prime(inputs.mu, inputs.mu_prime)
    samples = []
    for n in n_grid:
        l1 = solve_lambda1(float(n), inputs)
        samples.append((float(n), l1, l1p, min(l1p, l1)))
    return ThresholdCurve(inputs, samples)


def _need(counts: Mapping[int, int], N: int):
    if N not in counts:
        raise KeyError(f"missing count for N={N}")
    return counts[N]


def tail_first_term(ell: int, lam: float, n: float, a_prime: float, deficient: Mapping[int, int],
                    n_max: int) -> float:
    """``n * sum_{ell < N <= n_max} |SAP_x(N, ceil(a' N), P')| lam**N`` (odd N contribute nothing)."""
    terms = [_need(deficient, N) * lam**N for N in range(ell + 1, n_max + 1) if _sap_length(N)]
    return n * math.fsum(terms)


def tail_second_term(ell: int, lam: float, n: float, a_prime: float, sap_counts: Mapping[int, int],
                     n_max: int) -> float:
    """``n * sum_{ell < N <= n_max} |SAP_x(N)| lam**N (1 + lam**4 n)**(-ceil(a' N))``."""
    base = 1.0 + lam**4 * n
    terms = [_need(sap_counts, N) * lam**N * base ** -math.ceil(a_prime * N)
             for N in range(ell + 1, n_max + 1) if _sap_length(N)]
    return n * math.fsum(terms)


def tail_second_majorant(ell: int, lam: float, n: float, a_prime: float, n_max: int, d: int = 2,
                         mu_bound: float | None = None) -> float:
    """The same truncation with ``|SAP_x(N)|`` replaced by ``(d-1)/d * N * M**N``, ``M = 2d - 1``."""
    M = 2 * d - 1 if mu_bound is None else mu_bound
    base = 1.0 + lam**4 * n
    terms = [N * (lam * M) ** N * base ** -math.ceil(a_prime * N)
             for N in range(ell + 1, n_max + 1) if _sap_length(N)]
    return n * (d - 1) / d * math.fsum(terms)


def _sap_length(N: int) -> bool:
    return N >= 4 and N % 2 == 0


def sap_tail_counts(lattice, x, n_max: int, a_prime: float) -> tuple[dict, dict]:
    """``(deficient, total)`` SAP counts for even ``4 <= N <= n_max`` with threshold ``ceil(a' N)``."""
    pattern = pattern_p_prime(lattice)
    deficient, total = {}, {}
    for N in range(4, n_max + 1, 2):
        stats = pattern_stats(lattice, x, N, pattern, "sap", cap=None)
        deficient[N] = stats.deficient(math.ceil(a_prime * N))
        total[N] = stats.total
    return deficient, total
