"""Three-user MIMO relay toolkit.

Demand-side: DoF-region membership, message-flow graphs, and the greedy
cycle-resolving sub-channel allocation. Signal-side: zero-forcing channel
diagonalization and a link-level Monte Carlo simulator with a compiled
trial kernel (pure-Python fallback selected at import).
"""

from .allocation import (
    Allocation,
    InfeasibilityReport,
    PlanEntry,
    SubChannelPlan,
    allocate,
    allocate_three_cycles,
    allocate_two_cycles,
    allocation_from_document,
    build_plan,
    plan_cost,
    plan_document,
    subchannels_required,
    sum_dof_plan,
)
from .backend import BACKEND, TrialStats, available_backends, run_trials
from .dof import PAIRS, DofTuple
from .errors import (
    ContractError,
    InfeasibleDemandError,
    IntegralityError,
    NearSingularChannelError,
    UnsupportedRegimeError,
    YchannelError,
)
from .flowgraph import (
    ALL_CYCLES,
    CycleId,
    FlowGraph,
    build_flow_graph,
    check_bound_properties,
    enumerate_cycles,
)
from .phy import (
    ChannelSet,
    CoderSet,
    RoundResult,
    StreamRecord,
    StreamSymbols,
    build_coders,
    downlink_decode,
    draw_symbols,
    plan_streams,
    relay_forward,
    sample_channels,
    uplink,
)
from .region import (
    RegionBound,
    region_bounds,
    region_contains,
    sum_dof,
    unidirectional_dim_bound,
    violated_bounds,
)
from .simulate import (
    InseparabilityReport,
    SimConfig,
    StreamSlope,
    StreamStat,
    SweepResult,
    inseparability_experiment,
    load_sweep_csv,
    persist,
    run_ser,
    run_sweep,
    sweep_from_json,
    sweep_to_json,
)

__version__ = "0.1.0"
