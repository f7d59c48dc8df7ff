"""Exception types shared across the package."""


class OptionSpanError(Exception):
    """Base class for every domain error raised by this package."""


class DimensionMismatch(OptionSpanError):
    """Vectors indexed against incompatible state spaces."""


class NonPositiveProbability(OptionSpanError):
    """A state probability is zero, negative, or not finite."""


class InvalidProbability(OptionSpanError):
    """Probabilities do not sum to one within the accepted input tolerance."""


class NegativeUnderlying(OptionSpanError):
    """The underlying violates limited liability (a payoff is negative)."""


class EmptySequence(OptionSpanError):
    """A convergence report was requested for an empty sequence."""


class InvalidN(OptionSpanError):
    """Ladder sharpness must be at least one."""


class NotMeasurable(OptionSpanError):
    """The claim varies inside a level set of the underlying."""


class NegativeTarget(OptionSpanError):
    """Ladder targets must be nonnegative; split signed claims first."""


class MissingOne(OptionSpanError):
    """A sublattice harness requires the constant-one claim as a generator."""


class InvalidPricing(OptionSpanError):
    """Malformed pricing inputs (strikes not increasing, non-finite prices)."""


class DegeneratePi(OptionSpanError):
    """The pricing functional is identically zero on the option space."""


class FreeLunchPresent(OptionSpanError):
    """Price bounds were requested but the inputs admit a free lunch."""


class NotDeterminedByArbitrage(OptionSpanError):
    """Consistent prices for the claim span a gap above tolerance."""


class NumericalDegeneracy(OptionSpanError):
    """A solver landed in a region where no verdict can be certified."""


class MalformedProgram(OptionSpanError):
    """A linear program with inconsistent shapes or non-finite data."""
