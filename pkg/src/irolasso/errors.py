"""Exception hierarchy shared by all modules."""


class IroLassoError(Exception):
    """Base class for package errors."""


class DimensionError(IroLassoError, ValueError):
    """Invalid or inconsistent problem dimensions."""


class RegimeError(IroLassoError, ValueError):
    """Inputs lie outside the regime where a formula is defined (poles, negative radicands)."""


class SpecError(IroLassoError, ValueError):
    """An experiment specification or input file is invalid."""


class NumericalError(IroLassoError, ArithmeticError):
    """A numerical procedure failed (degenerate draw, saddle on box boundary, ...)."""
