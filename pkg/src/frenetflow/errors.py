"""Exception types shared across the package.

Two families matter for callers: configuration problems (bad expressions,
unbound constants, invalid run parameters) and numerical failures detected
mid-computation (frame degeneracy, blow-up, near-zero denominators). The CLI
maps the first family to exit code 2 and the second to exit code 3.
"""
from __future__ import annotations


class FrenetFlowError(Exception):
    """Base class for all package errors."""


# --- configuration family -------------------------------------------------

class ConfigError(FrenetFlowError):
    """A run configuration is invalid or inconsistent."""


class FlowSyntaxError(ConfigError):
    """A coefficient expression failed to parse.

    `offset` is the byte offset into the source string at which parsing
    stopped.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnboundConstant(ConfigError):
    """An expression names a constant absent from the constants table."""


class InvalidFlowExpression(ConfigError):
    """An expression is syntactically valid but semantically out of range
    (d_s nesting too deep, fractional power of a negative base, ...)."""


class AperiodicExpression(ConfigError):
    """An expression depends on s but is not periodic on the domain."""


class NonGeometricFlow(ConfigError):
    """The wave-equation route requires coefficients built from curve
    geometry; this flow does not qualify."""


# --- numerical family -----------------------------------------------------

class NumericalError(FrenetFlowError):
    """Base class for failures detected while computing."""


class DegenerateFrame(NumericalError):
    """Curvature vanished on too many nodes to define a moving frame."""


class SelfIntersectionSuspected(NumericalError):
    """Cumulative chord length stalled; the polyline may self-intersect."""


class DivisionNearZero(NumericalError):
    """A denominator dropped below the guard threshold at some node."""


class BlowUp(NumericalError):
    """The solution grew too fast for the step size to be meaningful."""
