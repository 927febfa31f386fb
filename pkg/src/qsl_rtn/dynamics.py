"""Exact pure-dephasing dynamics of a qubit coupled to a bistable fluctuator.

The fluctuator produces random telegraph noise with switching rate ``gamma``
and coupling strength ``lam``; the ratio ``g = lam/gamma`` controls the
crossover from motional narrowing (g < 1, monotone coherence decay) to the
revival regime (g > 1, damped coherence oscillations).

The transverse Bloch components are scaled by the decay factor
``f(t) = |D(t)|`` where the complex decay function is evaluated in the
numerically stable hyperbolic form

    D(t) = exp(-u) * [cosh(x) + (1 - i*g*dp0) * u * sinh(x)/x],
    u = gamma*t/2,  x = alpha*u,  alpha = sqrt(1 - g^2),

equal to ``A exp(-gamma t (1-alpha)/2) + (1-A) exp(-gamma t (1+alpha)/2)``
with ``A = (1 + alpha - i g dp0) / (2 alpha)``.  ``sinh(x)/x`` is extended
by its limit at x = 0, which makes the same expression valid at the g = 1
branch point, where D(t) = exp(-u) (1 + (1 - i g dp0) u).

Conventions (see README): D(t) is the ensemble average of the accumulated
noise phase over telegraph paths with flip rate gamma/2 and phase amplitude
lam/2; the raw noise statistics validated by the Monte Carlo module use
flip rate gamma (autocorrelation exp(-2 gamma |dt|)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CriticalRegime, KinkAtZero, NegativeTime
from .states import BlochVector

# Half-width of the window around g = 1 treated as critical.
CRITICAL_WINDOW = 1e-6
# Below this decay-factor value the rate f'(t) is considered undefined.
EPS_ZERO = 1e-12

# |x| below which sinh(x)/x switches to its Taylor series.
_SINHC_SMALL = 1e-4
# Real part of x beyond which the shifted-exponential form is used to avoid
# overflow of cosh/sinh (only reachable for g < 1 at enormous gamma*t).
_BIG_X = 350.0


class Regime(enum.Enum):
    MARKOVIAN = "markovian"
    CRITICAL = "critical"
    NON_MARKOVIAN = "non_markovian"


@dataclass(frozen=True)
class RtnParams:
    """Physical knobs of the noise model.

    gamma: fluctuator switching rate (1/time, > 0).
    lam: qubit-noise coupling strength (rad/time, >= 0).
    delta_p0: initial fluctuator population bias in [-1, 1]; 0 is the
        equilibrium start, +-1 a definite initial noise state.
    omega: intrinsic qubit frequency (rad/time); together with ``v`` it sets
        the deterministic rotation rate ``phase_rate = omega + v/2``.
    v: extra phase-rate parameter (rad/time), kept as configuration with
        default 0.
    """

    gamma: float
    lam: float
    delta_p0: float = 0.0
    omega: float = 0.0
    v: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam!r}")
        if abs(self.delta_p0) > 1:
            raise ValueError(f"|delta_p0| must be <= 1, got {self.delta_p0!r}")

    @classmethod
    def from_g(cls, g: float, gamma: float = 1.0, **kwargs) -> "RtnParams":
        """Build parameters from the dimensionless ratio g = lam/gamma."""
        return cls(gamma=gamma, lam=g * gamma, **kwargs)

    @property
    def g(self) -> float:
        """Coupling-to-switching ratio lam/gamma, derived on demand."""
        return self.lam / self.gamma

    @property
    def phase_rate(self) -> float:
        """Deterministic rotation rate omega + v/2 of the transverse plane."""
        return self.omega + 0.5 * self.v


@dataclass(frozen=True)
class DecayCoefficients:
    """The pair (alpha, A) of the two-exponential decay representation."""

    alpha: complex
    a_coef: complex
    regime: Regime


def classify_regime(g: float) -> Regime:
    if abs(g - 1.0) < CRITICAL_WINDOW:
        return Regime.CRITICAL
    return Regime.MARKOVIAN if g < 1.0 else Regime.NON_MARKOVIAN


def _alpha(g: float) -> complex:
    # Principal branch: real >= 0 for g <= 1, +i sqrt(g^2-1) for g > 1.
    return np.sqrt(complex(1.0 - g * g))


def decay_coefficients(p: RtnParams) -> DecayCoefficients:
    """Coefficients alpha = sqrt(1-g^2) and A = (1 + alpha - i g dp0)/(2 alpha).

    Raises :class:`CriticalRegime` inside the window |g-1| < 1e-6 where A
    diverges; :func:`complex_decay` handles that window internally and does
    not need these coefficients.
    """
    g = p.g
    regime = classify_regime(g)
    if regime is Regime.CRITICAL:
        raise CriticalRegime(
            f"g = {g!r} is within {CRITICAL_WINDOW} of the g = 1 branch point; "
            "the (alpha, A) pair is singular there"
        )
    alpha = _alpha(g)
    a_coef = (1.0 + alpha - 1j * g * p.delta_p0) / (2.0 * alpha)
    return DecayCoefficients(alpha=alpha, a_coef=a_coef, regime=regime)


def _check_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime("evolution times must be >= 0")
    return t


def _sinhc(x: np.ndarray) -> np.ndarray:
    """sinh(x)/x extended by continuity to x = 0 (complex argument)."""
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < _SINHC_SMALL
    xs = np.where(small, 1.0, x)
    out = np.sinh(xs) / xs
    x2 = x * x
    series = 1.0 + x2 / 6.0 + x2 * x2 / 120.0
    return np.where(small, series, out)


def complex_decay(p: RtnParams, t) -> complex | np.ndarray:
    """Complex decay function D(t); accepts scalar or array times.

    D(0) = 1 exactly, |D(t)| <= 1, and D is real for delta_p0 = 0.
    """
    t = _check_times(t)
    scalar = t.ndim == 0
    u = 0.5 * p.gamma * np.atleast_1d(t)
    g = p.g
    alpha = _alpha(g)
    c = 1.0 - 1j * g * p.delta_p0
    x = alpha * u

    big = x.real > _BIG_X
    if np.any(big):
        # Shifted exponentials: both exponents <= 0, no overflow.  The
        # coefficient q = c/alpha is safe here (big x implies alpha away
        # from 0).
        q = c / alpha
        out = 0.5 * (1.0 + q) * np.exp(x - u) + 0.5 * (1.0 - q) * np.exp(-x - u)
        reg = ~big
        if np.any(reg):
            out[reg] = np.exp(-u[reg]) * (
                np.cosh(x[reg]) + c * u[reg] * _sinhc(x[reg])
            )
    else:
        out = np.exp(-u) * (np.cosh(x) + c * u * _sinhc(x))
    return complex(out[0]) if scalar else out


def complex_decay_rate(p: RtnParams, t) -> complex | np.ndarray:
    """Exact time derivative D'(t) of :func:`complex_decay`; finite for all t."""
    t = _check_times(t)
    scalar = t.ndim == 0
    u = 0.5 * p.gamma * np.atleast_1d(t)
    g = p.g
    alpha = _alpha(g)
    x = alpha * u

    big = x.real > _BIG_X
    if np.any(big):
        c = 1.0 - 1j * g * p.delta_p0
        q = c / alpha
        out = 0.5 * p.gamma * (
            0.5 * (1.0 + q) * (alpha - 1.0) * np.exp(x - u)
            - 0.5 * (1.0 - q) * (alpha + 1.0) * np.exp(-x - u)
        )
        reg = ~big
        if np.any(reg):
            out[reg] = (
                -0.5 * p.gamma * g * np.exp(-u[reg])
                * (
                    1j * p.delta_p0 * np.cosh(x[reg])
                    + (g - 1j * p.delta_p0) * u[reg] * _sinhc(x[reg])
                )
            )
    else:
        out = (
            -0.5 * p.gamma * g * np.exp(-u)
            * (1j * p.delta_p0 * np.cosh(x) + (g - 1j * p.delta_p0) * u * _sinhc(x))
        )
    return complex(out[0]) if scalar else out


def decay_factor(p: RtnParams, t) -> float | np.ndarray:
    """f(t) = |D(t)|, the factor multiplying the transverse Bloch components."""
    d = complex_decay(p, t)
    return abs(d) if np.ndim(d) == 0 else np.abs(d)


def decay_factor_rate(p: RtnParams, t) -> float | np.ndarray:
    """f'(t) = Re(conj(D) D') / |D|.

    Raises :class:`KinkAtZero` where f <= 1e-12: |D| has a one-sided kink
    at zeros of D and the rate is not defined there.
    """
    d = complex_decay(p, t)
    dp = complex_decay_rate(p, t)
    f = np.abs(d)
    if np.any(f <= EPS_ZERO):
        raise KinkAtZero(
            "decay factor touches zero at a queried time; f'(t) is undefined there"
        )
    out = (np.conj(d) * dp).real / f
    return float(out) if np.ndim(out) == 0 else out


def bloch_at(p: RtnParams, r0: BlochVector, t: float) -> BlochVector:
    """Bloch vector at time t: transverse rotation by phase_rate*t scaled by
    f(t); rz is carried through unchanged."""
    t = float(t)
    if t < 0:
        raise NegativeTime("evolution times must be >= 0")
    f = decay_factor(p, t)
    theta = p.phase_rate * t
    c, s = math.cos(theta), math.sin(theta)
    return BlochVector(
        rx=f * (r0.rx * c + r0.ry * s),
        ry=f * (-r0.rx * s + r0.ry * c),
        rz=r0.rz,
    )


def bloch_velocity(p: RtnParams, r0: BlochVector, t: float) -> tuple[float, float, float]:
    """Analytic d(r)/dt; vz = 0 and |v| = r_perp * sqrt(f'^2 + w^2 f^2).

    Propagates :class:`KinkAtZero` from the decay-factor rate.
    """
    t = float(t)
    if t < 0:
        raise NegativeTime("evolution times must be >= 0")
    f = decay_factor(p, t)
    fp = decay_factor_rate(p, t)
    w = p.phase_rate
    theta = w * t
    c, s = math.cos(theta), math.sin(theta)
    a = r0.rx * c + r0.ry * s
    b = -r0.rx * s + r0.ry * c
    return (fp * a + f * w * b, fp * b - f * w * a, 0.0)


def spectral_density(p: RtnParams, omega_f) -> float | np.ndarray:
    """Lorentzian spectral density lam^2 gamma / (2 (gamma^2 + omega^2)).

    Kept exactly in this normalization; note that it is not the literal
    Fourier transform of the telegraph autocorrelation exp(-2 gamma |dt|)
    validated by the Monte Carlo module (see README conventions).
    """
    omega_f = np.asarray(omega_f, dtype=float)
    out = p.lam**2 * p.gamma / (2.0 * (p.gamma**2 + omega_f**2))
    return float(out) if out.ndim == 0 else out
