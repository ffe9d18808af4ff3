"""Domain errors. The CLI maps every subclass of FixlocError to exit code 1."""


class FixlocError(Exception):
    pass


class UnsupportedPatch(FixlocError):
    pass


class OracleMissing(FixlocError):
    pass


class ShapeMismatch(FixlocError, ValueError):
    pass


class NonScalarLoss(FixlocError, ValueError):
    pass


class NonFiniteGradient(FixlocError, FloatingPointError):
    pass


class TooManyPaths(FixlocError):
    pass


class LengthMismatch(FixlocError, ValueError):
    pass


class EmptyDataset(FixlocError):
    pass


class EmptyScope(FixlocError):
    pass


class DegenerateLabels(FixlocError):
    pass


class TooFewRecords(FixlocError):
    pass


class NotFound(FixlocError):
    """No ranked entry matches the oracle; ``rank`` is the miss rank len(pred) + 1."""

    def __init__(self, rank: int):
        super().__init__(f"no entry matches the oracle (reported rank {rank})")
        self.rank = rank


class NoEligibleLeaf(FixlocError):
    pass


class InfeasibleMix(FixlocError):
    pass


class NoCandidates(FixlocError):
    pass


class ValidatorFailure(FixlocError):
    pass


class UnassessedOutcome(FixlocError):
    pass


class CheckpointError(FixlocError):
    pass
