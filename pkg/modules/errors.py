# modules/errors.py

class LabError(Exception):
    """Base class for every error raised by the dyck_lab modules."""


class GraphValidationError(LabError, ValueError):
    pass


class Graph6DecodeError(LabError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class PreconditionError(LabError, ValueError):
    """
    Raised when an operation is called outside its domain.

    Parameters:
    - precondition (str): Short name of the failed precondition, e.g. "kuratowski-connected".
    - message (str): Human readable explanation.
    """

    def __init__(self, precondition, message=""):
        super().__init__(f"precondition '{precondition}' failed" + (f": {message}" if message else ""))
        self.precondition = precondition


class NonFacialCycleError(LabError, ValueError):
    def __init__(self, cycle, counterexample_edges):
        super().__init__(f"cycle {list(cycle)} is not facial")
        self.cycle = list(cycle)
        self.counterexample_edges = sorted(counterexample_edges)


class AntichainError(LabError, ValueError):
    def __init__(self, message, graph=None):
        super().__init__(message)
        self.graph = graph


class ConfigError(LabError):
    pass


class InvariantViolation(LabError, RuntimeError):
    """A result failed its own internal check. This is a bug, never a property of the input."""


class SearchRefused(LabError):
    """
    Raised when a search cannot give an exact answer within its limits.
    A refusal is never an answer: callers report it, they do not guess.

    Parameters:
    - message (str): What was refused and why.
    - stats (dict): Search statistics at the moment of refusal.
    """

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})
        self.stats.setdefault("reason", message)


class BudgetExhausted(SearchRefused):
    pass


class EmbeddingRefused(SearchRefused):
    def __init__(self, block_edges, limit, stats=None):
        super().__init__(f"block with {block_edges} edges exceeds the embedder bound of {limit}", stats)
        self.block_edges = block_edges
        self.limit = limit


class IsomorphismRefused(SearchRefused):
    pass
