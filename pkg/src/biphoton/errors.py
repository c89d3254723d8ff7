"""Exception hierarchy.

``PhysicsError`` marks violated physical preconditions (type-I crystal,
under-resolved grid, asymmetric state, ...).  The CLI maps these to exit
code 2 and everything else to exit code 1.
"""


class DomainError(ValueError):
    """An argument lies outside the domain of a physical function."""


class PhysicsError(ValueError):
    """A physical contract of an operation is violated."""


class TypeIError(PhysicsError):
    """Signal and idler have identical group slowness."""


class DegenerateDesignError(PhysicsError):
    """The crystal-length validity window is undefined."""


class AlreadyPhaseMatchedError(PhysicsError):
    """The unpoled crystal has zero mismatch, so no grating is needed."""


class ResolutionError(PhysicsError):
    """A frequency grid does not resolve a spectral feature."""


class AsymmetricStateError(PhysicsError):
    """A two-photon amplitude is not symmetric under photon exchange."""


class NormalizationError(PhysicsError):
    """An amplitude does not carry unit L2 norm."""


class ConfigError(ValueError):
    """A run configuration cannot be parsed or validated."""
