"""Exception types raised across the package."""


class DoveSagnacError(Exception):
    """Base class for all errors raised by dovesagnac."""


class InvalidArgumentError(DoveSagnacError, ValueError):
    pass


class NoTotalInternalReflectionError(DoveSagnacError, ValueError):
    """The ray inside the prism does not totally reflect at the base."""


class UnsupportedInputError(DoveSagnacError, ValueError):
    """Input state lies outside the family an interferometer model handles."""


class UnderdeterminedFitError(DoveSagnacError, ValueError):
    pass


class InconsistentMeasurementError(DoveSagnacError, ValueError):
    """Measured values cannot arise from any physical parameter set."""


class NoSolutionError(DoveSagnacError, ValueError):
    pass
