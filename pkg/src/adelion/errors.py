"""Exception types shared by all modules.

Every error carries a stable machine-readable ``code`` so the CLI can
report failures uniformly.  Operations that are specified to *report*
rather than raise (table validation, diagram verification, sweeps)
return report objects instead and never use these.
"""

from __future__ import annotations


class AdelionError(Exception):
    """Base class; ``code`` is a stable identifier, args hold detail."""

    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class NonDivisibleError(AdelionError):
    code = "NON_DIVISIBLE"


class LevelMismatchError(AdelionError):
    code = "LEVEL_MISMATCH"


class DivisionByZeroError(AdelionError):
    code = "DIVISION_BY_ZERO"


class RamifiedError(AdelionError):
    code = "RAMIFIED"


class PrecisionError(AdelionError):
    code = "PRECISION"


class PrecisionExhaustedError(AdelionError):
    code = "PRECISION_EXHAUSTED"


class ContextMismatchError(AdelionError):
    code = "CONTEXT_MISMATCH"


class KeyMismatchError(AdelionError):
    code = "KEY_MISMATCH"


class NotLocallyConstantError(AdelionError):
    code = "NOT_LOCALLY_CONSTANT"


class TailNotIntegralError(AdelionError):
    code = "TAIL_NOT_INTEGRAL"


class FiberIncompleteError(AdelionError):
    code = "FIBER_INCOMPLETE"


class TowerMismatchError(AdelionError):
    code = "TOWER_MISMATCH"


class LevelOrderError(AdelionError):
    code = "LEVEL_ORDER"


class NotContainedError(AdelionError):
    code = "NOT_CONTAINED"


class NotACoverError(AdelionError):
    code = "NOT_A_COVER"


class InvalidDepthError(AdelionError):
    code = "INVALID_DEPTH"


class PreconditionRamifiedError(AdelionError):
    code = "PRECONDITION_RAMIFIED"


class NoSplittingError(AdelionError):
    code = "NO_SPLITTING"


class EmptySequenceError(AdelionError):
    code = "EMPTY_SEQUENCE"


class InvalidTowerError(AdelionError):
    code = "INVALID_TOWER"
