"""Exception types shared across the package."""


class IsotnError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(IsotnError, ValueError):
    """Tensor shapes or edge dimensions are incompatible."""


class IsometryImpossibleError(IsotnError, ValueError):
    """Input dimension exceeds output dimension: no isometry can exist.

    Deliberately distinct from ``is_isometry(...) == False``; the question
    "is this an isometry" has no answer when the shape forbids one.
    """


class SingularMatrixError(IsotnError, ValueError):
    """A matrix required to have full column rank is (numerically) singular."""

    def __init__(self, message, smallest_singular_value):
        super().__init__(f"{message} (smallest singular value {smallest_singular_value:.3e})")
        self.smallest_singular_value = smallest_singular_value


class CycleError(IsotnError, ValueError):
    """The internal edges of a quiver contain a directed cycle."""

    def __init__(self, message, cycle_edges=()):
        super().__init__(message)
        self.cycle_edges = tuple(cycle_edges)


class ZeroAmplitudeError(IsotnError, ValueError):
    """A sampled sequence has amplitude zero, so its log term is singular."""

    def __init__(self, sequence):
        super().__init__(f"zero amplitude on sequence {tuple(sequence)}")
        self.sequence = tuple(sequence)


class ConditioningError(IsotnError, ValueError):
    """A conditioning prefix has zero probability under the model."""

    def __init__(self, prefix):
        super().__init__(f"prefix {tuple(prefix)} has zero probability; cannot condition on it")
        self.prefix = tuple(prefix)


class UnsupportedTopologyError(IsotnError, ValueError):
    """The operation is only defined for a restricted class of graphs."""


class FitError(IsotnError, ValueError):
    """A decay-curve fit cannot be performed (too few usable points)."""


class ModelFileError(IsotnError, ValueError):
    """A model file is malformed, truncated, or fails its checksum."""
