"""Demand tuples for the 3-user relay network.

A demand is a vector of six non-negative stream counts, one per ordered
user pair, kept in the fixed order (1,2), (1,3), (2,1), (2,3), (3,1), (3,2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

USERS = (1, 2, 3)

# ordered pairs in canonical component order
PAIRS = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))

_PAIR_INDEX = {pair: k for k, pair in enumerate(PAIRS)}


@dataclass(frozen=True)
class DofTuple:
    """Per-stream DoF demand, one component per ordered user pair."""

    d12: float
    d13: float
    d21: float
    d23: float
    d31: float
    d32: float

    def __post_init__(self):
        for name, pair, value in zip(
            ("d12", "d13", "d21", "d23", "d31", "d32"), PAIRS, self.as_tuple()
        ):
            value = float(value)
            if not value >= 0:  # also rejects NaN
                raise ValueError(f"DoF component {pair} must be >= 0, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_iterable(cls, values: Iterable[float]) -> "DofTuple":
        vals = tuple(float(v) for v in values)
        if len(vals) != 6:
            raise ValueError(f"a DoF tuple has 6 components, got {len(vals)}")
        return cls(*vals)

    @classmethod
    def from_string(cls, text: str) -> "DofTuple":
        """Parse the CLI form "d12,d13,d21,d23,d31,d32"."""
        parts = text.split(",")
        if len(parts) != 6:
            raise ValueError(f"expected six comma-separated numbers, got {text!r}")
        try:
            return cls.from_iterable(float(p) for p in parts)
        except ValueError as exc:
            raise ValueError(f"malformed DoF tuple {text!r}: {exc}") from exc

    @classmethod
    def zero(cls) -> "DofTuple":
        return cls(0, 0, 0, 0, 0, 0)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.d12, self.d13, self.d21, self.d23, self.d31, self.d32)

    def get(self, i: int, j: int) -> float:
        """Component for the ordered pair (i, j)."""
        return self.as_tuple()[_PAIR_INDEX[(i, j)]]

    @property
    def is_integral(self) -> bool:
        return all(float(v).is_integer() for v in self.as_tuple())

    def as_ints(self) -> tuple[int, ...]:
        if not self.is_integral:
            raise ValueError(f"tuple {self.as_tuple()} has fractional components")
        return tuple(int(v) for v in self.as_tuple())

    def total(self) -> float:
        """Component sum, i.e. the total number of demanded streams."""
        return sum(self.as_tuple())

    def relabeled(self, perm: dict[int, int]) -> "DofTuple":
        """Apply a user relabeling: component (i,j) moves to (perm[i], perm[j])."""
        if sorted(perm) != [1, 2, 3] or sorted(perm.values()) != [1, 2, 3]:
            raise ValueError(f"perm must be a bijection on {{1,2,3}}, got {perm}")
        values = {}
        for (i, j), v in zip(PAIRS, self.as_tuple()):
            values[(perm[i], perm[j])] = v
        return DofTuple.from_iterable(values[p] for p in PAIRS)

    def to_json(self) -> list[float]:
        """JSON form: array of six numbers in canonical pair order."""
        return list(self.as_tuple())

    @classmethod
    def from_json(cls, data: Iterable[float]) -> "DofTuple":
        return cls.from_iterable(data)
