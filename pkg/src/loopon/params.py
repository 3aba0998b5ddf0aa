"""Model parameters and the exact/float number modes."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[Fraction, float]


class NumberMode(str, enum.Enum):
    RATIONAL = "rational"
    FLOAT = "float"

    @classmethod
    def parse(cls, value) -> "NumberMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"mode must be 'rational' or 'float', got {value!r}") from None


def coerce(value, mode) -> Number:
    """Convert ``value`` (int, float, Fraction or a string like ``"1/2"``) to ``mode``."""
    mode = NumberMode.parse(mode)
    if mode is NumberMode.RATIONAL:
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"{value} has no rational representation")
        if isinstance(value, str):
            return Fraction(value.strip())
        return Fraction(value)
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def format_number(x) -> Union[str, float, int]:
    """JSON form: Fractions as ``"p/q"`` strings (integers stay ``"p"``), floats as-is."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return float(x)


@dataclass(frozen=True)
class ModelParams:
    """Edge weight ``lam`` and loop weight ``n`` of the loop O(n) measure."""

    lam: Number
    n: Number
    mode: NumberMode = NumberMode.RATIONAL

    def __post_init__(self):
        mode = NumberMode.parse(self.mode)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "lam", coerce(self.lam, mode))
        object.__setattr__(self, "n", coerce(self.n, mode))
        if self.lam < 0 or self.n < 0:
            raise ValueError(f"parameters must be nonnegative, got lambda={self.lam}, n={self.n}")

    @property
    def one(self) -> Number:
        return Fraction(1) if self.mode is NumberMode.RATIONAL else 1.0

    @property
    def zero(self) -> Number:
        return Fraction(0) if self.mode is NumberMode.RATIONAL else 0.0

    def face_factor(self, face_length: int = 4) -> Number:
        """Weight ``n * lam**face_length`` of a single minimal loop."""
        return self.n * self.lam**face_length

    def to_json(self) -> dict:
        return {"lambda": format_number(self.lam), "n": format_number(self.n), "mode": self.mode.value}


