"""Exception hierarchy shared by every module."""


class RHLSError(Exception):
    """Base class for all library errors."""


class NotAdmissible(RHLSError):
    """An exponent tuple violates an admissibility condition."""

    def __init__(self, condition, detail=""):
        self.condition = condition
        msg = condition if not detail else f"{condition}: {detail}"
        super().__init__(msg)


class DegenerateExponent(RHLSError):
    pass


class InvalidIndex(RHLSError):
    pass


class CenterSingularity(RHLSError):
    pass


class NotConverged(RHLSError):
    """Quadrature did not reach tolerance; carries the best estimate."""

    def __init__(self, message, value=float("nan"), error_estimate=float("inf")):
        self.value = value
        self.error_estimate = error_estimate
        super().__init__(f"{message} (best={value!r}, err={error_estimate!r})")


class NonFiniteSample(RHLSError):
    pass


class NonIntegrableTail(RHLSError):
    pass


class NonPositiveSample(RHLSError):
    pass


class CalibrationDrift(RHLSError):
    pass


class PositivityViolated(RHLSError):
    pass


class NonUniformGrid(RHLSError):
    pass


class NonPositiveValue(RHLSError):
    pass
