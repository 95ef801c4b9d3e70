from typing import Any, Optional


class SupercombError(Exception):
    """ Base class of every error raised by the package """


class InputError(SupercombError):
    """ Malformed input or violated usage contract (exit code 2) """


class PropertyFailure(SupercombError):
    """ A mathematical hypothesis or property does not hold (exit code 1) """


# ----- set families -----

class OutOfRangePoint(InputError):

    def __init__(self, point: int, n: int) -> None:
        super().__init__(f'point {point} is outside the ground set 0..{n - 1}')
        self.point = point
        self.n = n


class GroundTooLarge(InputError):

    def __init__(self, n: int, limit: int) -> None:
        super().__init__(f'ground set of {n} points exceeds the limit of {limit}')
        self.n = n
        self.limit = limit


class EmptySet(InputError):
    pass


class EmptyTarget(InputError):
    pass


class EmptyValue(InputError):

    def __init__(self, point: str) -> None:
        super().__init__(f'set-valued map is empty at {point!r}')
        self.point = point


class NotLinked(InputError):
    pass


class NotSingleton(PropertyFailure):

    def __init__(self, what: str, points: list[int]) -> None:
        super().__init__(f'{what} is {points}, expected exactly one point')
        self.what = what
        self.points = points


# ----- maps and spaces -----

class NotSurjective(PropertyFailure):

    def __init__(self, missing: list[int]) -> None:
        super().__init__(f'map is not surjective, points {missing} have empty fibers')
        self.missing = missing


class NotClosed(InputError):

    def __init__(self, points: list[str]) -> None:
        super().__init__(f'{points} is not closed')
        self.points = points


class NotExtendable(PropertyFailure):

    def __init__(self, component: list[str], values: list[int]) -> None:
        super().__init__(f'component {component} carries conflicting values {values}')
        self.component = component
        self.values = values


# ----- selection -----

class PreconditionFailed(PropertyFailure):

    def __init__(self, kind: str, verdict: Any) -> None:
        super().__init__(f'precondition {kind} failed: {verdict.witness}')
        self.kind = kind            # NotSContinuous | NotConvexValue | BadSubbase
        self.verdict = verdict


class HypothesisFailed(PropertyFailure):

    def __init__(self, kind: str, verdict: Any) -> None:
        super().__init__(f'hypothesis {kind} failed: {verdict.witness}')
        self.kind = kind            # NotSOpen | NotSConvex | BadSubbase
        self.verdict = verdict


class SelectionInvariantError(SupercombError):
    """ The constructed map violates a guarantee of the selection theorem """


class InternalXiFailure(SelectionInvariantError):
    pass


class NotALift(PropertyFailure):

    def __init__(self, point: str) -> None:
        super().__init__(f'lift does not cover the map at {point!r}')
        self.point = point


# ----- files -----

class ParseError(InputError):

    def __init__(self, path: str, message: str, location: Optional[str] = None) -> None:
        super().__init__(f'{path}: {message}' if location is None else f'{path} at {location}: {message}')
        self.path = path
        self.location = location


class SchemaError(ParseError):
    pass


class InvariantError(ParseError):
    pass


class CacheCorrupt(SupercombError):

    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f'cache file {path} is corrupt: {reason}')
        self.path = path
        self.reason = reason


class UsageError(InputError):
    """ Unknown verb, unknown flag or malformed flag value """


class GroundMismatch(InputError):
    """ Two inputs that must share a ground set or a space do not """
