"""Exception types shared across the package.

``CriticalRegime`` is a control-flow signal rather than a failure: it tells
callers of :func:`~qsl_rtn.dynamics.decay_coefficients` that the two-exponential
coefficients are singular at the switching/coupling boundary and the limit
evaluation inside :func:`~qsl_rtn.dynamics.complex_decay` must be used instead.
"""


class QslRtnError(Exception):
    """Base class for all package errors."""


class BlochOutOfBall(QslRtnError):
    """Bloch vector norm exceeds 1 beyond tolerance."""


class NegativeTime(QslRtnError):
    """Evolution queried at t < 0."""


class CriticalRegime(QslRtnError):
    """Coefficient formulas are singular at g = 1; use the limit form."""


class KinkAtZero(QslRtnError):
    """Decay-factor rate queried where the factor touches zero.

    |D(t)| has a one-sided kink wherever D crosses zero, so the rate is
    undefined there; integrators must split panels at these points.
    """


class OverlapExceedsPurity(QslRtnError):
    """tr[rho0 rho_t] > tr[rho0^2] beyond tolerance: inconsistent state pair."""


class FrozenDynamics(QslRtnError):
    """All averaged generator norms vanish; the speed-limit bound is 0/0."""


class TwoPathMismatch(QslRtnError):
    """The two independent speed-limit evaluations disagree."""


class QuadratureNotConverged(QslRtnError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, value: float, achieved_error: float):
        super().__init__(message)
        self.value = value
        self.achieved_error = achieved_error


class StepUnderflow(QslRtnError):
    """ODE step-halving reached the minimum allowed step without converging."""


class DomainError(QslRtnError):
    """Argument outside the mathematical domain of a closed-form expression."""


class InvalidSpec(QslRtnError):
    """A sweep specification field is missing or out of range."""
