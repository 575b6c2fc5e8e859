"""Exception types shared across the package."""


class GuardError(RuntimeError):
    """A state left the flight envelope the model is valid in."""


class SingularityError(RuntimeError):
    """A control-path matrix is singular or too ill-conditioned to invert."""

    def __init__(self, stage: str, condition: float, message: str | None = None):
        self.stage = stage
        self.condition = condition
        if message is None:
            message = (
                f"{stage}: matrix condition estimate {condition:.3g} "
                f"exceeds the invertibility gate"
            )
        super().__init__(message)


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate."""
