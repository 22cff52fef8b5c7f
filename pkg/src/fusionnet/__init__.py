"""Threshold-rule optimization for distributed detection in sensor networks.

Networks are directed acyclic graphs with node 1 as the fusion center.
Observations are Gaussian; rules are likelihood-ratio thresholds indexed by
the message a node receives from its parents.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetError, ConvergenceError, CyclicGraphError, DegenerateModelError, DomainError, FusionError,
    GraphValidationError, InfeasibleConstraintError, ParseError, ShapeMismatchError, UnsupportedShapeError,
)
from .gaussmath import Gaussian1D, chernoff_info, kl_divergence_gauss, q_function, q_inverse
from .kernels import BACKEND
from .models import CorrelatedModel, CorrelatedThresholds, WgnModel, n_sensor_wgn, two_sensor_wgn
from .netfile import NetworkSpec, load_network, parse_network, serialize_network
from .netgraph import Dag, acyclic_graph_11, binary_tree_11, dag_from_edges, tandem, threshold_count
from .objectives import ChannelSet, CostMatrix, ThresholdRuleSet, bayes_risk, region_probs
from .optimizer import OptConfig, OptResult, np_solve, optimize_correlated, pbpo_bayes

__all__ = [
    "__version__", "BACKEND",
    "FusionError", "DomainError", "DegenerateModelError", "UnsupportedShapeError", "GraphValidationError",
    "CyclicGraphError", "ShapeMismatchError", "ConvergenceError", "InfeasibleConstraintError", "BudgetError",
    "ParseError",
    "Gaussian1D", "q_function", "q_inverse", "kl_divergence_gauss", "chernoff_info",
    "WgnModel", "n_sensor_wgn", "two_sensor_wgn", "CorrelatedModel", "CorrelatedThresholds",
    "NetworkSpec", "parse_network", "load_network", "serialize_network",
    "Dag", "dag_from_edges", "threshold_count", "tandem", "acyclic_graph_11", "binary_tree_11",
    "CostMatrix", "ThresholdRuleSet", "ChannelSet", "region_probs", "bayes_risk",
    "OptConfig", "OptResult", "pbpo_bayes", "np_solve", "optimize_correlated",
]
