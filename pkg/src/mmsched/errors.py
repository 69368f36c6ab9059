"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MmschedError(Exception):
    """Base class for every error raised by this package."""


class NetworkError(MmschedError, ValueError):
    """A network violates a structural invariant."""


class ScheduleError(MmschedError):
    """A schedule cannot be evaluated against a network."""


class NonMatchingSlot(ScheduleError):
    def __init__(self, slot: int, node: int):
        super().__init__(f"slot {slot} uses node {node} more often than it has RF chains")
        self.slot = slot
        self.node = node


class NegativeNetFlow(ScheduleError):
    def __init__(self, node: int, value: float):
        super().__init__(f"node {node} has negative net flow {value:.3e}")
        self.node = node
        self.value = value


class NoEnbLinks(MmschedError):
    """The eNB has no outgoing links."""


class Disconnected(MmschedError):
    """Some destination is unreachable from the eNB."""


class UnreachableUe(Disconnected):
    """Some UE is unreachable from the eNB."""


class AlreadyExpanded(MmschedError):
    """Expansion was requested on a network that is already expanded."""


class RfLimitViolated(MmschedError):
    def __init__(self, node: int, slot: int):
        super().__init__(f"slot {slot} exceeds the RF chain count of node {node}")
        self.node = node
        self.slot = slot


class TooLarge(MmschedError):
    """An exhaustive routine was asked to handle an instance beyond its guard."""


class LPError(MmschedError):
    """Base class for linear programming failures."""


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


class NumericFailure(LPError):
    pass


class SingularBasis(LPError):
    pass


class Cycling(LPError):
    """The simplex iteration cap was hit."""


class BoundViolated(MmschedError):
    """A proven structural bound failed; indicates an implementation bug."""


class NonPositiveDistance(MmschedError, ValueError):
    """Path loss was requested at a distance that is not positive."""
