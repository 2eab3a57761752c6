"""Exception hierarchy.

The CLI maps each family to an exit code: `InputError` -> 3,
`NumericalError` -> 4, `HypothesisFailed` -> 2.
"""


class WarpGeoError(Exception):
    """Base class for every error raised by this package."""


# -- input / parsing ---------------------------------------------------------

class InputError(WarpGeoError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=1, column=1, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class DomainError(InputError, ValueError):
    """A function was evaluated outside its domain."""


class IterateDomainError(DomainError):
    """An iterated logarithm is not positive at a sample point."""


class ScenarioError(InputError):
    pass


class DimensionError(InputError, ValueError):
    pass


class KindMismatch(InputError, ValueError):
    pass


class AmbientNotWarped(InputError, TypeError):
    pass


class AmbientMismatch(InputError, ValueError):
    pass


class NotOrthonormal(InputError, ValueError):
    pass


class NoDivergentRays(InputError, ValueError):
    pass


class NonpositiveWarp(InputError, ValueError):
    pass


# -- numerical ---------------------------------------------------------------

class NumericalError(WarpGeoError):
    pass


class OutOfChart(NumericalError):
    pass


class LeftChart(NumericalError):
    pass


class SingularMetric(NumericalError):
    pass


class DegeneratePlane(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class SearchFailed(NumericalError):
    pass


class ExtensionFailure(NumericalError):
    pass


class EmptyRegion(NumericalError):
    pass


class NotFound(NumericalError):
    pass


# -- hypotheses --------------------------------------------------------------

class HypothesisFailed(WarpGeoError):
    """A theorem hypothesis was checked and found false.

    `item` names the failing hypothesis; `report` optionally carries the
    partially filled report so callers can still emit it.
    """

    def __init__(self, item, message="", report=None, witness=None):
        self.item = item
        self.report = report
        self.witness = witness
        super().__init__(f"hypothesis {item!r} failed" + (f": {message}" if message else ""))


class ContainmentViolated(HypothesisFailed):
    def __init__(self, message="", report=None, witness=None):
        super().__init__("containment", message, report=report, witness=witness)


class DimensionHypothesisFailed(HypothesisFailed):
    def __init__(self, message="", report=None):
        super().__init__("dimension", message, report=report)


class OutsideDeclaredInjRadius(HypothesisFailed):
    def __init__(self, message="", witness=None):
        super().__init__("injectivity-radius", message, witness=witness)


class NotASubmersion(HypothesisFailed):
    def __init__(self, message="", witness=None):
        super().__init__("submersion", message, witness=witness)


class NonWarpedAmbient(HypothesisFailed):
    def __init__(self, message=""):
        super().__init__("warped-ambient", message)
