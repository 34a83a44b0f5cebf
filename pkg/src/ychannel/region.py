"""Membership tests for the achievable-DoF polytope of the 3-user relay.

The region is cut out by six inequalities, one per permutation (p1,p2,p3)
of the users: d_{p1 p2} + d_{p1 p3} + d_{p2 p3} <= N, where N is the
number of relay antennas.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .dof import DofTuple

# Comparisons on real-valued tuples allow this slack so that points on a
# face of the polytope are not rejected by rounding; integer tuples are
# compared exactly.
REAL_TOL = 1e-9


@dataclass(frozen=True)
class RegionBound:
    """One face of the region: sum of three demand components <= rhs."""

    permutation: tuple[int, int, int]
    rhs: int

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """The three ordered pairs whose components this bound sums."""
        p1, p2, p3 = self.permutation
        return ((p1, p2), (p1, p3), (p2, p3))

    def lhs(self, d: DofTuple) -> float:
        return sum(d.get(i, j) for i, j in self.pairs)

    def holds(self, d: DofTuple) -> bool:
        tol = 0.0 if d.is_integral else REAL_TOL
        return self.lhs(d) <= self.rhs + tol

    def describe(self, d: DofTuple | None = None) -> str:
        terms = " + ".join(f"d{i}{j}" for i, j in self.pairs)
        head = f"p={self.permutation}: {terms}"
        if d is None:
            return f"{head} <= {self.rhs}"
        return f"{head} = {self.lhs(d):g} > {self.rhs}"


def region_bounds(n: int) -> tuple[RegionBound, ...]:
    """All six bounds of the region for a relay with ``n`` antennas."""
    _check_n(n)
    return tuple(RegionBound(p, n) for p in permutations((1, 2, 3)))


def violated_bounds(d: DofTuple, n: int) -> list[RegionBound]:
    """The bounds that ``d`` breaks; empty iff ``d`` is in the region."""
    return [b for b in region_bounds(n) if not b.holds(d)]


def region_contains(d: DofTuple, n: int) -> bool:
    """True iff every permutation bound holds for ``d``."""
    return not violated_bounds(d, n)


def sum_dof(n: int) -> int:
    """Maximum component sum over the region.

    Equals 2N: the bounds for permutations (1,2,3) and (3,2,1) partition
    the six components, so their sum caps the total at 2N, and the
    all-bidirectional demand d12 = d21 = N attains it.
    """
    _check_n(n)
    return 2 * n


def unidirectional_dim_bound(d: DofTuple) -> float:
    """Relay dimensions needed if every stream used its own dimension."""
    return d.total()


def _check_n(n: int):
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"relay antenna count must be a positive integer, got {n}")
