"""Exception hierarchy shared across the package."""


class IetLabError(Exception):
    """Base class for all package-specific errors."""


class MixedBaseError(IetLabError):
    """Arithmetic or comparison mixing two different quadratic bases."""


class ScalarParseError(IetLabError, ValueError):
    """Text that does not denote an exact scalar (decimals are refused)."""


class InvalidIetError(IetLabError, ValueError):
    """Interval exchange data violating a construction invariant."""


class IdocFailure(IetLabError):
    """A discontinuity orbit returned to a discontinuity."""

    def __init__(self, n: int):
        super().__init__(f"discontinuity orbit hits a discontinuity at n={n}")
        self.n = n


class InvalidStepFunctionError(IetLabError, ValueError):
    """Step-function coordinates violating a construction invariant."""


class NudgeTooLargeError(IetLabError, ValueError):
    """Nudge displacement at least half the minimum piece width."""


class NudgeCollisionError(IetLabError):
    """A nudge produced equal adjacent values; caller may retry."""


class SamplingCapExceeded(IetLabError):
    """Rejection sampling exhausted its retry budget."""


class WindowEscape(IetLabError):
    """An orbit failed to return to the window within the iteration cap."""

    def __init__(self, cap: int):
        super().__init__(f"no return to the window within {cap} iterations")
        self.cap = cap


class InductionDegeneration(IetLabError):
    """A first-return map did not come back as an exchange of b intervals."""


class InductionCapExceeded(IetLabError):
    """First-return computation exhausted its iteration cap."""


class PerturbationPreconditionError(IetLabError):
    """Scale or separation requirements for a good perturbation fail."""


class ShadowMismatchError(IetLabError):
    """A shadow-orbit pair straddled more than one discontinuity."""
