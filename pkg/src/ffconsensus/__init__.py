"""Exact finite-field consensus toolkit.

Analyze, design, and simulate linear consensus networks over prime
fields: convergence certification, weight-matrix synthesis, Kronecker
composition, distributed averaging, and pose estimation from relative
measurements.  All arithmetic is exact modular arithmetic.
"""

from .analysis import (
    ConsensusReport,
    TransitionGraph,
    build_transition_graph,
    certify_consensus,
    consensus_by_cycles,
    consensus_functional,
    convergence_time,
    inverse_recursion,
    is_nilpotent,
    is_row_stochastic,
    predict_cycle_structure,
)
from .design import (
    DesignResult,
    GraphSpec,
    enumerate_consensus_matrices,
    fully_connected_design,
    kronecker_compose,
    spanning_tree_design,
)
from .errors import (
    FFConsensusError,
    FieldMismatchError,
    GuardExceededError,
    ParseError,
    PreconditionError,
)
from .field import FpElement, PrimeField, is_prime
from .linalg import AffineSubset, FpMatrix, FpPolynomial, kronecker
from .sim import (
    MeasurementGraph,
    PoseResult,
    SimConfig,
    Trajectory,
    build_L,
    decompose_measurement,
    perturb_measurements,
    recover_real_average,
    run_average,
    run_consensus,
    run_pose_estimation,
)

__version__ = "0.1.0"
