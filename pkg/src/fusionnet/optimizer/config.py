"""Optimizer configuration and result records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class OptConfig:
    tol: float = 1e-8
    max_iter: int = 500
    restarts: int = 8
    grid_points: int = 33
    rng_seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        if self.restarts < 1:
            raise DomainError("restarts must be at least 1")
        if self.grid_points < 3:
            raise DomainError("grid_points must be at least 3")

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator per restart/stream, reproducible from ``rng_seed``."""
        return np.random.default_rng(np.random.SeedSequence([self.rng_seed, stream]))


@dataclass
class OptResult:
    """Outcome of an optimization.

    ``rules`` is a :class:`~fusionnet.objectives.ThresholdRuleSet` for graph
    problems, a :class:`~fusionnet.models.CorrelatedThresholds` for the
    correlated model, an :class:`~fusionnet.optimizer.xyx.XyxRules` for the
    interactive process, or a plain coordinate vector for generic search.
    """

    rules: Any
    objective_value: float
    region_probs: Any
    converged: bool
    iterations: int
    fixed_point_residual: float = math.nan
    degenerate_updates: int = 0
    restart_index: int = 0
    details: dict = field(default_factory=dict)


def rel_change(a, b) -> float:
    """Largest relative difference between two threshold arrays.

    Equal entries (including ``inf == inf``) count as zero change; a finite
    value against an infinite one counts as infinite change.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return math.inf
    same = a == b
    if same.all():
        return 0.0
    a, b = a[~same], b[~same]
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        return math.inf
    scale = np.maximum(np.abs(a), np.abs(b))
    return float(np.max(np.abs(a - b) / scale))
