"""Exception types shared across the package."""


class FatgraphError(Exception):
    """Base class for all package errors."""


class CapExceeded(FatgraphError):
    """An exact or exhaustive routine was asked to run above its size cap."""


class Infeasible(FatgraphError):
    """Forcing constraints cannot be satisfied simultaneously."""


class ParseError(FatgraphError, ValueError):
    """Malformed input file."""


class NegativeLiteral(ParseError):
    """A negated literal appeared in a formula that must be monotone."""


class InvalidPartial(FatgraphError, ValueError):
    """A partial coloring already contains a monochromatic induced P3."""


class DegenerateGeometry(FatgraphError, ValueError):
    """A geometric object has no extent (all vertices coincide)."""


class InvalidObjectSet(FatgraphError, ValueError):
    """An object set violates its fatness or size constraints."""


class SlackViolation(FatgraphError):
    """An embedding has a non-designed pair too close to its contact threshold."""


class ShapeMismatch(FatgraphError, ValueError):
    """A graph does not have the shape an operation requires."""


class GridTooSmall(FatgraphError):
    """The grid has fewer free cells than the formula has clauses."""


class TooManyOccurrences(ParseError):
    """A variable occurs more than four times, so the formula cannot be padded."""
