"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand dimensions do not compose."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class GraphError(ValueError):
    """Backward-pass contract violation (e.g. non-scalar loss)."""


class ConfigError(ValueError):
    """Invalid generation, training, or attack configuration."""


class FormatError(ValueError):
    """Malformed binary file. Carries the byte offset of the failure."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class TrainingError(RuntimeError):
    """Training diverged or produced a non-finite loss."""


class OptimizationError(RuntimeError):
    """Iterative optimization produced a non-finite objective."""


class AttackError(RuntimeError):
    """Adversarial example generation failed (e.g. non-finite gradient)."""
