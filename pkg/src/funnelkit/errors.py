"""Exception hierarchy shared by every funnelkit module."""


class FunnelkitError(Exception):
    """Base class for all funnelkit errors."""


class ParameterError(FunnelkitError, ValueError):
    """Invalid rate or physical parameter."""


class MissingField(ParameterError):
    pass


class NegativeRate(ParameterError):
    pass


class NonFiniteValue(ParameterError):
    pass


class ZeroDecayRate(ParameterError):
    pass


class ConfigError(FunnelkitError):
    """Malformed configuration file or conflicting parameter sources."""


class InvalidSpec(FunnelkitError, ValueError):
    """Sweep specification that cannot be evaluated."""


class UnknownPreset(InvalidSpec):
    pass


class NumericalError(FunnelkitError):
    """A numerical route failed to deliver a trustworthy result."""


class HorizonNotReached(NumericalError):
    pass


class DefectiveGenerator(NumericalError):
    """Generator eigenvectors are too ill-conditioned for the spectral route."""


class NotConverged(NumericalError):
    pass


class GridMismatch(NumericalError):
    pass


class NoPhotonFlux(FunnelkitError):
    """The monitored output mode is never populated."""


class DefectiveGeneratorWarning(UserWarning):
    """Emitted when propagation falls back from the eigendecomposition route."""
