"""Threshold optimization: person-by-person fixed points, Neyman-Pearson
multiplier search, coordinate search, and a brute-force oracle."""

from .config import OptConfig, OptResult, rel_change
from .correlated import optimize_correlated
from .intervals import IntervalSet
from .neyman import XYX, np_solve, pbpo_np_fixed_multiplier
from .oracle import OracleResult, brute_force_oracle
from .pbpo import pbpo_bayes, pbpo_weighted, threshold_from_gradient
from .search import coordinate_search
from .xyx import XyxRules

__all__ = [
    "OptConfig", "OptResult", "rel_change", "optimize_correlated", "IntervalSet", "XYX", "np_solve",
    "pbpo_np_fixed_multiplier", "OracleResult", "brute_force_oracle", "pbpo_bayes", "pbpo_weighted",
    "threshold_from_gradient", "coordinate_search", "XyxRules",
]
