"""Exception types shared across the package."""


class KreslingError(Exception):
    """Base class for all package-specific errors."""


class DegenerateGeometry(KreslingError):
    """A crease length collapsed to zero, leaving fold angles undefined."""


class NonPositiveHeight(KreslingError):
    """The cell height h0 - du dropped to zero or below."""


class ShortTrajectory(KreslingError):
    """Too few snapshots in the requested training window."""


class RankTooLarge(KreslingError):
    """A requested truncation rank exceeds the matrix dimensions."""


class ZeroReference(KreslingError):
    """Relative error is undefined against an all-zero reference."""


class Diverged(KreslingError):
    """A closed-loop prediction left the configured state bounds.

    Carries the time of blow-up in ``time`` (seconds).
    """

    def __init__(self, time: float, message: str = ""):
        self.time = time
        super().__init__(message or f"prediction diverged at t={time:.6g} s")


class Instability(KreslingError):
    """A simulated state left the configured blow-up bounds.

    Carries the time of divergence in ``time`` (seconds).
    """

    def __init__(self, time: float, message: str = ""):
        self.time = time
        super().__init__(message or f"integration diverged at t={time:.6g} s")


class GapClosure(KreslingError):
    """The two-band Wilson loop lost track of its band pair along the loop."""


class NumericalFailure(KreslingError):
    """An eigen- or least-squares solve produced an unusable result."""


class TooShort(KreslingError):
    """Input series is shorter than the operation requires."""


class InsufficientNeighbors(KreslingError):
    """Not enough temporally-separated neighbors for divergence tracking."""


class DegenerateInput(KreslingError):
    """A statistic is undefined for constant input series."""


class ConfigError(KreslingError):
    """Invalid or inconsistent experiment configuration."""


class RankDeficientWarning(UserWarning):
    """The restricted least-squares system was rank deficient."""
