"""Exception types shared across the package."""


class TailAdaptError(ValueError):
    """Base class for domain errors raised by this package."""


class UnsupportedFamilyError(TailAdaptError):
    """Requested quantity has no tractable form for this family."""


class InsufficientPositiveDataError(TailAdaptError):
    """Fewer than two strictly positive observations."""


class SampleTooSmallError(TailAdaptError):
    """Sample too short for the requested selection rule."""


class NoPivotalIndexError(TailAdaptError):
    """No index satisfies the pivotal bias-variance inequality."""


class HypothesesNotMetError(TailAdaptError):
    """Lower-bound construction hypotheses violated; names the clause."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class InsufficientRepsError(TailAdaptError):
    """Too few Monte-Carlo replicates for the requested summary."""
