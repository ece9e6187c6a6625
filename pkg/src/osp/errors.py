"""Exception hierarchy shared by every layer of the runtime."""

from __future__ import annotations


class OSPError(Exception):
    """Base class for all runtime errors raised by this package."""

    # Source position attached by the DSL layer, when the error is raised
    # while executing a parsed program.
    pos = None


class SchemaError(OSPError):
    """An archetype definition or instance field value is malformed."""


class UnknownInstanceError(OSPError):
    """An id does not name a live instance of the expected kind."""

    def __init__(self, ident, expected: str = "instance") -> None:
        super().__init__(f"unknown {expected} id {ident}")
        self.ident = ident
        self.expected = expected


class EdgeCreationError(OSPError):
    """An edge endpoint is missing or is not a node."""


class AbilityRegistrationError(OSPError):
    """An ability cannot be attached to the requested owner/trigger."""


class PathError(OSPError):
    """Base class for path-collection failures."""


class DeadReferenceError(PathError):
    """A path element does not refer to a live node or edge."""


class InvalidPathError(PathError):
    """A sequence violates one of the path-collection constraints."""

    def __init__(self, violation) -> None:
        super().__init__(str(violation))
        self.violation = violation


class ExpansionError(PathError):
    """A path cannot be expanded into a physically traversable sequence."""


class EngineError(OSPError):
    """Illegal traversal operation or state detected by the walker engine."""


class AbilityError(EngineError):
    """An ability body failed; wraps the underlying cause."""

    def __init__(self, walker: int, location: int, ability: str, cause: BaseException) -> None:
        super().__init__(
            f"ability {ability} failed for walker {walker} at {location}: {cause}"
        )
        self.walker = walker
        self.location = location
        self.ability = ability
        self.cause = cause
        self.pos = getattr(cause, "pos", None)


class StepBudgetExceeded(EngineError):
    """The configured step budget ran out before the walkers quiesced."""


class SkipSignal(Exception):
    """Raised inside an ability body to abandon the current location."""

    def __init__(self, walker: int) -> None:
        super().__init__(f"skip by walker {walker}")
        self.walker = walker


class DisengageSignal(Exception):
    """Raised inside an ability body to end the walker's whole traversal."""

    def __init__(self, walker: int) -> None:
        super().__init__(f"disengage by walker {walker}")
        self.walker = walker
