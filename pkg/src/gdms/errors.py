"""Exception hierarchy. The CLI maps these onto exit codes."""


class GdmsError(Exception):
    exit_code = 3


class InvalidInput(GdmsError, ValueError):
    exit_code = 1


class InvalidBudget(InvalidInput):
    pass


class UnsupportedMethod(InvalidInput):
    pass


class DegenerateSystem(InvalidInput):
    pass


class ConstraintViolation(InvalidInput):
    """A builder parameter breaks one of the system assumptions.

    ``assumption`` names the violated condition (``"open-set"``,
    ``"contraction"``, ``"distortion"``, ``"transitivity"``, ...).
    """

    def __init__(self, assumption: str, message: str):
        super().__init__(f"[{assumption}] {message}")
        self.assumption = assumption


class ResourceLimit(GdmsError, RuntimeError):
    exit_code = 2


class InvariantViolation(GdmsError, AssertionError):
    exit_code = 3
