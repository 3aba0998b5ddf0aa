"""Exact and Monte Carlo computations for the loop O(n) model on Z^d and the hexagonal lattice."""

__version__ = "0.1.0"

from .lattice import Domain, Lattice, box_domain, domain_minus, induced_domain, neighbors
from .loops import LoopConfig, Polygon
from .params import ModelParams, NumberMode
from .estimators import ExactLoopModel, LoopSampler, ThresholdCurveEstimator

__all__ = [
    "Domain",
    "ExactLoopModel",
    "Lattice",
    "LoopConfig",
    "LoopSampler",
    "ModelParams",
    "NumberMode",
    "Polygon",
    "ThresholdCurveEstimator",
    "box_domain",
    "domain_minus",
    "induced_domain",
    "neighbors",
]
