"""Exception hierarchy shared by the simulation modules and the CLI."""


class HawkesError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 1


class ConfigError(HawkesError, ValueError):
    exit_code = 2


class DimensionMismatch(ConfigError):
    pass


class Unstable(HawkesError, ValueError):
    """Branching matrix has spectral radius >= 1: no stationary version exists."""

    exit_code = 4


class TiltTooLarge(HawkesError, ValueError):
    """Tilt parameter at or past the integrability limit of a birth density."""

    exit_code = 3


class Infeasible(HawkesError, ValueError):
    """The cumulant fixed-point system has no finite solution at this tilt."""

    exit_code = 3


class ClusterSizeCap(HawkesError, RuntimeError):
    """A single cluster grew past the configured event cap."""

    exit_code = 4


class EmptyInput(HawkesError, ValueError):
    exit_code = 2
