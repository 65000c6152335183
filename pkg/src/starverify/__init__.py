"""Star-set reachability verification of signal reconstruction networks.

Decides whether a network fed a spike-faulted input set keeps its
reachable output bounds inside a threshold band around the unperturbed
signal, and grades the failure when it does not.
"""

from ._exceptions import (
    DimensionError,
    EmptySetError,
    FormatError,
    RejectionBudgetError,
    SolverError,
    SplitBudgetError,
    StarVerifyError,
    UnboundedSetError,
)
from ._faults import Campaign, CampaignEntry, SpikeFault, apply_fault, generate_campaign
from ._lp import LinearProgram, LpSolution, feasible_point, solve
from ._metrics import (
    RobustnessReport,
    ThresholdBand,
    build_report,
    percentage_robustness,
    unrobustness_grade,
)
from ._network import DenseLayer, Network, ReluLayer
from ._reach import (
    ReachResult,
    output_bounds,
    reach_network,
    relu_layer_approx,
    relu_layer_exact,
    relu_step_exact,
    union_of_star_bounds,
)
from ._star import Bounds, SignalStar, from_bounds, from_spike_fault, point_star
from .estimator import SpikeRobustnessVerifier

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "Campaign",
    "CampaignEntry",
    "DenseLayer",
    "DimensionError",
    "EmptySetError",
    "FormatError",
    "LinearProgram",
    "LpSolution",
    "Network",
    "ReachResult",
    "RejectionBudgetError",
    "ReluLayer",
    "RobustnessReport",
    "SignalStar",
    "SolverError",
    "SpikeFault",
    "SpikeRobustnessVerifier",
    "SplitBudgetError",
    "StarVerifyError",
    "ThresholdBand",
    "UnboundedSetError",
    "apply_fault",
    "build_report",
    "feasible_point",
    "from_bounds",
    "from_spike_fault",
    "generate_campaign",
    "output_bounds",
    "percentage_robustness",
    "point_star",
    "reach_network",
    "relu_layer_approx",
    "relu_layer_exact",
    "relu_step_exact",
    "solve",
    "union_of_star_bounds",
    "unrobustness_grade",
    "__version__",
]
