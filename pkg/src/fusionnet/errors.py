"""Exception hierarchy shared by every module."""


class FusionError(Exception):
    """Base class for all package errors."""


class DomainError(FusionError, ValueError):
    """An argument lies outside the domain of a function."""


class DegenerateModelError(FusionError, ValueError):
    """The two hypotheses cannot be told apart (equal means)."""


class UnsupportedShapeError(FusionError, ValueError):
    """A decision region would not have the supported shape."""


class GraphValidationError(FusionError, ValueError):
    """Malformed network: bad indices, duplicates, self-loops, disconnected."""


class CyclicGraphError(GraphValidationError):
    """The network contains a directed cycle."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        path = " -> ".join(str(k) for k in self.cycle)
        super().__init__(
            f"directed cycle {path}: sensors on a closed path behave like a "
            "centralized sub-network, so the graph is rejected; merge the "
            "cycle into one node or remove an arrow"
        )


class ShapeMismatchError(FusionError, ValueError):
    """Rule tables or models do not match the network they are used with."""


class ConvergenceError(FusionError, RuntimeError):
    """An iterative routine ran out of budget.

    The best estimate reached so far is kept on ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InfeasibleConstraintError(FusionError, ValueError):
    """A false-alarm level cannot be met inside the multiplier bracket."""


class BudgetError(FusionError, ValueError):
    """A requested enumeration is too large to run."""


class ParseError(FusionError, ValueError):
    """A network/model file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
