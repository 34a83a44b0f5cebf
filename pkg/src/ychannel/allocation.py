"""Greedy sub-channel allocation for an integer DoF demand.

Strategies are filled in decreasing order of efficiency: bi-directional
exchange first (1 relay dimension carries 2 streams), then cyclic
three-way exchange (2 dimensions carry 3 streams), then plain one-way
forwarding (1 dimension per stream). In separable mode the cyclic stage
is skipped, which models independent coding per sub-channel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .dof import PAIRS, DofTuple
from .errors import ContractError, IntegralityError
from .flowgraph import THREE_CYCLES, TWO_CYCLES

MODES = ("joint", "separable")

# each ordered pair lies on exactly one 3-cycle
_CYCLE_EDGES = {
    (1, 2, 3): ((1, 2), (2, 3), (3, 1)),
    (1, 3, 2): ((1, 3), (3, 2), (2, 1)),
}
_EDGE_TO_CYCLE = {e: c for c, edges in _CYCLE_EDGES.items() for e in edges}


@dataclass(frozen=True)
class Allocation:
    """Per-strategy stream counts for one demand.

    ``two_cycle`` maps unordered pairs (i,j), i<j, to bi-directional
    streams per direction; ``three_cycle`` maps each 3-cycle to its
    cyclic stream count; ``uni`` maps ordered pairs to one-way streams.
    """

    mode: str
    two_cycle: dict[tuple[int, int], int]
    three_cycle: dict[tuple[int, int, int], int]
    uni: dict[tuple[int, int], int]

    def demand(self) -> DofTuple:
        """Reconstruct the demand this allocation serves."""
        comps = []
        for i, j in PAIRS:
            pair = (min(i, j), max(i, j))
            cyc = _EDGE_TO_CYCLE[(i, j)]
            comps.append(self.two_cycle[pair] + self.three_cycle[cyc] + self.uni[(i, j)])
        return DofTuple.from_iterable(comps)


@dataclass(frozen=True)
class PlanEntry:
    """One strategy instance bound to concrete sub-channel indices."""

    kind: str  # "bidir" | "cyclic" | "uni"
    users: tuple[int, ...]  # pair (i,j) or cycle (i,j,k)
    subs: tuple[int, ...]  # one index, or two for cyclic entries

    def to_json(self) -> dict:
        if self.kind == "cyclic":
            return {"kind": self.kind, "cycle": list(self.users), "subs": list(self.subs)}
        return {"kind": self.kind, "pair": list(self.users), "sub": self.subs[0]}

    @classmethod
    def from_json(cls, data: dict) -> "PlanEntry":
        if data["kind"] == "cyclic":
            return cls("cyclic", tuple(data["cycle"]), tuple(data["subs"]))
        return cls(data["kind"], tuple(data["pair"]), (data["sub"],))


@dataclass(frozen=True)
class SubChannelPlan:
    entries: tuple[PlanEntry, ...]
    total_subchannels: int


@dataclass(frozen=True)
class InfeasibilityReport:
    """Returned instead of a plan when the demand outgrows the relay."""

    n_s: int
    n: int


PlanOutcome = Union[SubChannelPlan, InfeasibilityReport]


def _require_integral(d: DofTuple) -> DofTuple:
    if not d.is_integral:
        raise IntegralityError(
            f"allocation needs integer stream counts, got {d.as_tuple()}"
        )
    return d


def allocate_two_cycles(d: DofTuple) -> tuple[dict[tuple[int, int], int], DofTuple]:
    """Pair up opposite-direction streams on each 2-cycle.

    Each pair (i,j) gets min(d_ij, d_ji) bi-directional streams; the
    returned residual carries what is left per ordered pair.
    """
    _require_integral(d)
    ints = dict(zip(PAIRS, d.as_ints()))
    two = {}
    residual = dict(ints)
    for i, j in TWO_CYCLES:
        paired = min(ints[(i, j)], ints[(j, i)])
        two[(i, j)] = paired
        residual[(i, j)] -= paired
        residual[(j, i)] -= paired
    return two, DofTuple.from_iterable(residual[p] for p in PAIRS)


def allocate_three_cycles(
    residual: DofTuple,
) -> tuple[dict[tuple[int, int, int], int], DofTuple]:
    """Serve residual 3-cycles with the cyclic strategy.

    Expects a residual in which every 2-cycle is already resolved
    (min(d'_ij, d'_ji) = 0 for all pairs); under that condition at most
    one of the two 3-cycles can be present, so the fixed processing
    order (1,2,3) then (1,3,2) cannot change the result.
    """
    _require_integral(residual)
    left = dict(zip(PAIRS, residual.as_ints()))
    for i, j in TWO_CYCLES:
        if min(left[(i, j)], left[(j, i)]) > 0:
            raise ContractError(
                f"residual still contains the 2-cycle ({i},{j}); "
                "run the bi-directional stage first"
            )
    three = {}
    for cycle in THREE_CYCLES:
        edges = _CYCLE_EDGES[cycle]
        amount = min(left[e] for e in edges)
        three[cycle] = amount
        for e in edges:
            left[e] -= amount
    return three, DofTuple.from_iterable(left[p] for p in PAIRS)


def allocate(d: DofTuple, n: int, mode: str = "joint") -> Allocation:
    """Run the full allocation pipeline for an integer demand.

    ``n`` is not a constraint here: demands that exceed the relay are
    allocated anyway and reported as infeasible by :func:`build_plan`.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"relay antenna count must be a positive integer, got {n}")
    _require_integral(d)
    two, residual = allocate_two_cycles(d)
    if mode == "joint":
        three, residual = allocate_three_cycles(residual)
    else:
        three = {c: 0 for c in THREE_CYCLES}
    uni = dict(zip(PAIRS, residual.as_ints()))
    return Allocation(mode=mode, two_cycle=two, three_cycle=three, uni=uni)


def subchannels_required(a: Allocation) -> int:
    """Relay dimensions the allocation needs.

    Computed as the demanded stream total minus one unit per allocated
    cycle stream (each cycle reuses dimensions across its streams).
    """
    total = int(a.demand().total())
    return total - sum(a.two_cycle.values()) - sum(a.three_cycle.values())


def plan_cost(a: Allocation) -> int:
    """Same quantity by per-strategy dimension costs: 1 per bi-directional
    stream pair, 2 per cyclic stream triple, 1 per one-way stream."""
    return (
        1 * sum(a.two_cycle.values())
        + 2 * sum(a.three_cycle.values())
        + 1 * sum(a.uni.values())
    )


def build_plan(a: Allocation, n: int) -> PlanOutcome:
    """Assign concrete sub-channel indices, or report infeasibility.

    Indices run 0..N_s-1: 2-cycles in lexicographic order, then cycles
    (1,2,3) and (1,3,2), then one-way pairs in lexicographic order.
    """
    n_s = subchannels_required(a)
    if n_s > n:
        return InfeasibilityReport(n_s=n_s, n=n)
    entries = []
    sub = 0
    for pair in TWO_CYCLES:
        for _ in range(a.two_cycle[pair]):
            entries.append(PlanEntry("bidir", pair, (sub,)))
            sub += 1
    for cycle in THREE_CYCLES:
        for _ in range(a.three_cycle[cycle]):
            entries.append(PlanEntry("cyclic", cycle, (sub, sub + 1)))
            sub += 2
    for pair in PAIRS:
        for _ in range(a.uni[pair]):
            entries.append(PlanEntry("uni", pair, (sub,)))
            sub += 1
    assert sub == n_s
    return SubChannelPlan(entries=tuple(entries), total_subchannels=n_s)


def sum_dof_plan(
    n: int, split: tuple[int, int, int] | None = None
) -> tuple[DofTuple, SubChannelPlan]:
    """A demand and plan attaining the maximum total of 2N streams.

    All sub-channels run bi-directional exchange. ``split`` distributes
    them over the pairs (1,2), (1,3), (2,3); by default pair (1,2) takes
    all of them.
    """
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"relay antenna count must be a positive integer, got {n}")
    if split is None:
        split = (n, 0, 0)
    if len(split) != 3 or any(s < 0 for s in split) or sum(split) != n:
        raise ValueError(f"split must be 3 non-negative counts summing to {n}, got {split}")
    n12, n13, n23 = split
    d = DofTuple(n12, n13, n12, n23, n13, n23)
    plan = build_plan(allocate(d, n, "joint"), n)
    assert isinstance(plan, SubChannelPlan) and plan.total_subchannels == n
    return d, plan


# ---------------------------------------------------------------------------
# JSON form


def plan_document(a: Allocation, n: int, include_plan: bool = True) -> dict:
    """Serializable summary: allocation, feasibility, and optionally the plan."""
    outcome = build_plan(a, n)
    feasible = isinstance(outcome, SubChannelPlan)
    doc = {
        "mode": a.mode,
        "two_cycle": {f"{i}{j}": a.two_cycle[(i, j)] for i, j in TWO_CYCLES},
        "three_cycle": {"".join(map(str, c)): a.three_cycle[c] for c in THREE_CYCLES},
        "uni": {f"{i}{j}": a.uni[(i, j)] for i, j in PAIRS},
        "n": n,
        "n_s": subchannels_required(a),
        "feasible": feasible,
    }
    if include_plan:
        doc["plan"] = [e.to_json() for e in outcome.entries] if feasible else None
    return doc


def allocation_from_document(doc: dict) -> Allocation:
    return Allocation(
        mode=doc["mode"],
        two_cycle={(i, j): doc["two_cycle"][f"{i}{j}"] for i, j in TWO_CYCLES},
        three_cycle={
            c: doc["three_cycle"]["".join(map(str, c))] for c in THREE_CYCLES
        },
        uni={(i, j): doc["uni"][f"{i}{j}"] for i, j in PAIRS},
    )


def dump_plan_document(a: Allocation, n: int, path: str):
    with open(path, "w") as fh:
        json.dump(plan_document(a, n), fh, indent=2)
        fh.write("\n")
