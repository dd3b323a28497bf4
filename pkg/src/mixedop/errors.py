"""Exception types shared across the package."""


class MixedOpError(Exception):
    """Base class for every error raised by this package."""


class UnknownAtomError(MixedOpError, KeyError):
    """A pair, map, or density names an atom that its measure space lacks.

    On atomic spaces this is the analogue of an absolute-continuity
    violation: mass sits where the reference measure has none.
    """


class DimensionMismatchError(MixedOpError, ValueError):
    """Vector or matrix shape is inconsistent with the fiber dimensions."""


class InvalidExponentError(MixedOpError, ValueError):
    """A norm exponent lies outside [1, inf]."""


class UnsupportedExponentsError(MixedOpError, ValueError):
    """Exponent pair outside the supported regime (1 <= q <= p, p finite
    unless p == q)."""


class HypothesisViolationError(MixedOpError, ValueError):
    """A criterion's structural hypothesis fails on the given instance."""


class NotInjectiveError(MixedOpError, ValueError):
    """An injective mapping was required."""


class MissingPairError(MixedOpError, KeyError):
    """A required (s, t) pair is absent from the kernel's relation."""


class SliceRangeError(MixedOpError, ValueError):
    """A per-slice map sends a cell outside its target slice."""


class ScenarioError(MixedOpError, ValueError):
    """A scenario file does not parse or fails cross-reference checks."""


class SandwichViolationError(MixedOpError):
    """The ordering oracle <= lower <= upper failed beyond tolerance."""
