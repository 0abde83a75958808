"""Exception types shared across the package."""


class QGalileiError(Exception):
    """Base class for all package-specific errors."""


class NonCyclicError(QGalileiError):
    """A product of displacement elements has a nonvanishing net shift or kick."""


class ArityError(QGalileiError):
    """Wrong number of particles for a named frame transformation."""


class MissingTrajectoryError(QGalileiError):
    """A named frame transformation needs a frame trajectory and none was given."""


class SingularMapError(QGalileiError):
    """The linear part of a frame transformation is not invertible."""


class UnsupportedGeneratorError(QGalileiError):
    """The generator is not a single-particle displacement element."""


class NonQuadraticError(QGalileiError):
    """A nonlinear potential enters where only quadratic dynamics is supported."""


class NonSeparableError(QGalileiError):
    """The Hamiltonian mixes position and momentum in one quadratic term."""


class PacketTooWideError(QGalileiError):
    """Requested wave packet does not fit the grid with the safety margin."""


class BoundaryBreachError(QGalileiError):
    """A propagating packet came too close to the periodic grid boundary."""


class GridMismatchError(QGalileiError):
    """Grid axes are incompatible with an exact conditional shift."""


class InsufficientSamplesError(QGalileiError):
    """Too few time samples for a finite-difference estimate."""


class DimensionError(QGalileiError):
    """Phase-space dimensions of two objects do not match."""


class ConfigError(QGalileiError):
    """A scenario configuration is malformed."""
