"""Exception hierarchy shared by every zvline module."""


class ZvError(Exception):
    """Base class for all zvline errors."""


# graph construction and queries
class GraphError(ZvError, ValueError):
    pass


class DuplicateVertex(GraphError):
    pass


class UnknownEndpoint(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class NonPositiveLength(GraphError):
    pass


class Disconnected(GraphError):
    pass


class UnknownVertex(ZvError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class EmptySet(ZvError, ValueError):
    pass


# partitions
class AmbiguousRoot(ZvError, ValueError):
    pass


class NotSubsetOfZ(ZvError, ValueError):
    pass


class MissingNestedPartition(ZvError, ValueError):
    pass


class InvalidPartition(ZvError, ValueError):
    pass


# mechanisms
class EmptyProfile(ZvError, ValueError):
    pass


class ParetoZEmpty(ZvError, RuntimeError):
    pass


class WeightedWithoutOverride(ZvError, ValueError):
    pass


class NotATree(ZvError, ValueError):
    pass


class NotABlockGraph(ZvError, ValueError):
    pass


class InvalidOrder(ZvError, ValueError):
    pass


# families, search and I/O
class InvalidParameters(ZvError, ValueError):
    pass


class BudgetExceeded(ZvError, RuntimeError):
    """A bounded search stopped before it could give a definitive answer."""


class ParseError(ZvError, ValueError):
    pass
