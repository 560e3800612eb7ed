"""Exception hierarchy shared by every module of the package."""


class FlathermError(Exception):
    """Base class for all package errors."""


class InputError(FlathermError):
    """Malformed or inconsistent input data (bad file, bad field, bad shape)."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class ExactnessError(FlathermError):
    """An exact computation would have to fall back to floating point."""


class NotAComplexStructure(FlathermError):
    """J squared is not minus the identity."""


class NotFlat(FlathermError):
    pass


class DegenerateSplitting(FlathermError):
    """The center and the derived algebra intersect nontrivially."""


class NotTwoStepSolvable(FlathermError):
    pass


class DependentFrame(FlathermError):
    pass


class SpecInvalid(FlathermError):
    pass


class OddDimension(FlathermError):
    pass
