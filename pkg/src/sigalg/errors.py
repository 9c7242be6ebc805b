"""Exception types shared across the package."""


class SigalgError(Exception):
    """Base class for all package errors."""


class ShapeError(SigalgError, ValueError):
    """Operands have incompatible dimension, level or block sizes."""


class DomainError(SigalgError, ValueError):
    """An operation was applied outside its domain (e.g. log of a tensor with scalar part != 1)."""


class CapacityError(SigalgError, MemoryError):
    """A dense representation would exceed the configured coefficient budget."""


class InputError(SigalgError, ValueError):
    """Malformed external input (CSV, JSON)."""
