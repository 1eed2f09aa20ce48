"""Exception types shared across the package."""

from __future__ import annotations


class AgentwardError(Exception):
    """Base class for all errors raised by this package."""


# -- graph construction -----------------------------------------------------


class DuplicateIdError(AgentwardError):
    def __init__(self, node_id: str) -> None:
        super().__init__(f"duplicate node id: {node_id!r}")
        self.node_id = node_id


class DanglingEdgeError(AgentwardError):
    def __init__(self, src: str, dst: str) -> None:
        super().__init__(f"edge references unknown node: {src!r} -> {dst!r}")
        self.src = src
        self.dst = dst


class UnmediatedFunctionalNodeError(AgentwardError):
    """A functional node has no inbound edge from its paired enforcement node."""

    def __init__(self, node_id: str, reason: str = "") -> None:
        detail = f" ({reason})" if reason else ""
        super().__init__(f"functional node {node_id!r} is not mediated{detail}")
        self.node_id = node_id


class InvalidNodeError(AgentwardError):
    """A node spec violates a structural invariant (e.g. resource misuse)."""


# -- workflow runtime --------------------------------------------------------


class RouterFailure(AgentwardError):
    """The host routing policy raised; wraps the original error."""


class MissingPairError(AgentwardError):
    def __init__(self, node_id: str) -> None:
        super().__init__(f"functional node {node_id!r} has no paired enforcement node")
        self.node_id = node_id


class BehaviorFailure(AgentwardError):
    """A node behavior binding raised or is unregistered; wraps the host error."""


# -- policy-spec -------------------------------------------------------------


class EmptyDocumentError(AgentwardError):
    pass


class MissingSectionError(AgentwardError):
    def __init__(self, section: str) -> None:
        super().__init__(f"skill document is missing the {section} section")
        self.section = section


class IncompleteFactsError(AgentwardError):
    """classify_risk was called without all four dimension answers."""


class PairExistsError(AgentwardError):
    def __init__(self, name: str) -> None:
        super().__init__(f"a counterpart is already registered for {name!r}")
        self.name = name


class PairMissingError(AgentwardError):
    def __init__(self, name: str) -> None:
        super().__init__(f"no counterpart registered for {name!r}")
        self.name = name


# -- decision engine ---------------------------------------------------------


class InvalidPatternError(AgentwardError):
    """A rule pattern failed to compile at ruleset load time."""


class InvalidConfigError(AgentwardError):
    pass


# -- interventions -----------------------------------------------------------


class UnauthorizedResourceError(AgentwardError):
    def __init__(self, node_id: str, resource: str) -> None:
        super().__init__(f"node {node_id!r} is not registered for resource {resource!r}")
        self.node_id = node_id
        self.resource = resource


class StoreUnavailableError(AgentwardError):
    """A persistent store could not be reached; callers treat this fail-closed."""


# -- scanner -----------------------------------------------------------------


class UnreadablePackageError(AgentwardError):
    pass


# -- factory -----------------------------------------------------------------


class GeneratorFailure(AgentwardError):
    pass


class JudgeUnavailableError(AgentwardError):
    """No judge answered and the deterministic fallback has no coverage."""


# -- harness -----------------------------------------------------------------


class SuiteParseError(AgentwardError):
    pass


class DomainMismatchError(AgentwardError):
    def __init__(self, expected: str, got: str) -> None:
        super().__init__(f"suite domain {got!r} does not match engine binding {expected!r}")
        self.expected = expected
        self.got = got


class IoFailureError(AgentwardError):
    pass


# -- control api -------------------------------------------------------------


class UnknownTicketError(AgentwardError):
    def __init__(self, ticket_id: str) -> None:
        super().__init__(f"unknown ticket: {ticket_id!r}")
        self.ticket_id = ticket_id


class TicketNotPendingError(AgentwardError):
    def __init__(self, ticket_id: str, state: str) -> None:
        super().__init__(f"ticket {ticket_id!r} is not pending (state: {state})")
        self.ticket_id = ticket_id
        self.state = state


class IndexOutOfRangeError(AgentwardError):
    def __init__(self, index: int, size: int) -> None:
        super().__init__(f"audit index {index} outside [0, {size}]")
        self.index = index
        self.size = size
