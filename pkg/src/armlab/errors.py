"""Exception types shared across the package."""


class ArmLabError(Exception):
    """Base class for all armlab errors."""


class ConfigError(ArmLabError):
    """Invalid scenario configuration; message carries the field path."""


class ZeroLengthElementError(ArmLabError):
    """An element has coincident end nodes."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"zero-length element at index {index}")


class FrameDiscontinuityError(ArmLabError):
    """Adjacent element frames differ by a rotation angle >= pi."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"frame discontinuity at interior node {index}")


class DynamicsBlowUpError(ArmLabError):
    """Non-finite acceleration or state; carries the first offending index."""

    def __init__(self, index: int, what: str = "acceleration"):
        self.index = index
        super().__init__(f"dynamics blow-up: non-finite {what} at index {index}")
