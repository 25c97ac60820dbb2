"""Planar pointing consensus: agents at fixed positions rotate unit headings
under decentralized projection control until all point at one common target.
"""

from .geometry import (
    SingularMatrixError,
    ZeroVectorError,
    angle_between,
    projector,
    rotation,
    solve_2x2,
    unit,
    unit_from_angle,
    wrap_angle,
)
from .graph import (
    CycleDetectedError,
    Digraph,
    GraphError,
    UnreachableVertexError,
    ValidationResult,
    topological_order,
    validate_rooted_out_branching,
)
from .scenario import (
    FeasibilityCertificate,
    InconsistentAnglesError,
    NoCommonTargetError,
    Scenario,
    ScenarioError,
    TargetBehindAgentError,
    TargetCoincidesWithAgentError,
    check_feasibility,
    load_scenario,
    recover_target,
    sample_initial_headings,
    scenario_hash,
    synthesize_angles,
)
from .dynamics import (
    HeadingState,
    Trajectory,
    angular_speed,
    control_agent,
    control_root,
    control_signals,
    simulate,
    simulate_local_frame,
    step,
)
from .analysis import (
    AnalysisReport,
    analyze,
    edge_error,
    least_squares_intersection,
    lyapunov_value,
    pairwise_intersections,
)
from . import presets

__version__ = "0.1.0"
