"""Compressive data aggregation for mobile sensor networks in bike races."""

from .config import ExperimentConfig, load_config
from .graph import NeighborGraph, RiderPositions, knn_graph, laplacian
from .linalg import (
    LpProblem,
    LpSolution,
    LpStatus,
    dct_matrix,
    least_squares,
    rank,
    solve_lp,
)
from .metrics import StepReport, stress, summarize
from .mobility import (
    PelotonParams,
    RaceTrace,
    VelocityFrame,
    ingest_trace,
    simulate_race,
    velocities,
)
from .protocol import (
    AggregateMessage,
    LinearSystem,
    SensorState,
    collect_timestep,
    plan_rounds,
    reconstruct,
    sink_collect,
    step_sensor,
)
from .radio import RadioParams, Reachability, compute_reachability, hop_distance_to_sinks
from .sparsity import (
    CsFormulation,
    Measurement,
    build_basis_l1,
    build_laplacian_l1,
    build_pairwise_l1,
    decode_solution,
)

__all__ = [
    "AggregateMessage",
    "CsFormulation",
    "ExperimentConfig",
    "LinearSystem",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "Measurement",
    "NeighborGraph",
    "PelotonParams",
    "RaceTrace",
    "RadioParams",
    "Reachability",
    "RiderPositions",
    "SensorState",
    "StepReport",
    "VelocityFrame",
    "build_basis_l1",
    "build_laplacian_l1",
    "build_pairwise_l1",
    "collect_timestep",
    "compute_reachability",
    "dct_matrix",
    "decode_solution",
    "hop_distance_to_sinks",
    "ingest_trace",
    "knn_graph",
    "laplacian",
    "least_squares",
    "load_config",
    "plan_rounds",
    "rank",
    "reconstruct",
    "simulate_race",
    "sink_collect",
    "solve_lp",
    "step_sensor",
    "stress",
    "summarize",
    "velocities",
]
