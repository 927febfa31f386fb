"""Coherence backflow as a non-Markovianity measure.

Under pure dephasing the transverse rotation preserves |rho01|, so the l1
coherence evolves as C(rho_t) = C(rho_0) f(t) and the positive variation of
C reduces to a finite telescoping sum of the decay factor's increments over
its rising segments: no quadrature and no differentiation through kinks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import RtnParams, decay_factor
from .errors import DomainError
from .qsl import kink_locations
from .states import BlochVector, coherence_l1, make_state


class Direction(enum.Enum):
    RISING = "rising"
    FALLING = "falling"


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    direction: Direction


@dataclass(frozen=True)
class MonotoneSegments:
    """Ordered monotone pieces of the decay factor covering [0, horizon]."""

    segments: tuple[Segment, ...]
    horizon: float


@dataclass(frozen=True)
class NonMarkResult:
    n_coh: float
    rising_intervals: MonotoneSegments
    horizon: float
    truncation_bound: float


def monotone_segments(p: RtnParams, horizon: float) -> MonotoneSegments:
    """Split [0, horizon] into monotone pieces of f at its sign-change kinks.

    Stationary touch points of f without a sign change (the |dp0| = 1
    revival structure) do not create boundaries.  A constant f (lam = 0)
    yields a single segment, labelled falling by convention.
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon!r}")
    kinks = kink_locations(p, horizon)
    bounds = np.concatenate([[0.0], kinks, [horizon]])
    fs = decay_factor(p, bounds)
    segs = []
    for i in range(bounds.size - 1):
        # increments at rounding level (constant f, touch points) are not rises
        rising = fs[i + 1] - fs[i] > 1e-13
        direction = Direction.RISING if rising else Direction.FALLING
        segs.append(Segment(float(bounds[i]), float(bounds[i + 1]), direction))
    return MonotoneSegments(segments=tuple(segs), horizon=float(horizon))


def n_coh(p: RtnParams, r0: BlochVector, horizon: float) -> NonMarkResult:
    """Total coherence backflow over [0, horizon].

    Exactly C(rho0) times the summed increments of f over rising segments;
    zero (with no rising segments) whenever f is non-increasing.  The
    reported truncation bound C(rho0) exp(-gamma*horizon/2) estimates the
    envelope of any revivals beyond the horizon.
    """
    c0 = coherence_l1(make_state(r0))
    segs = monotone_segments(p, horizon)
    rising = tuple(s for s in segs.segments if s.direction is Direction.RISING)
    total = 0.0
    if rising and c0 > 0.0:
        starts = np.array([s.t_start for s in rising])
        ends = np.array([s.t_end for s in rising])
        total = c0 * float(np.sum(decay_factor(p, ends) - decay_factor(p, starts)))
    return NonMarkResult(
        n_coh=total,
        rising_intervals=MonotoneSegments(segments=rising, horizon=segs.horizon),
        horizon=float(horizon),
        truncation_bound=c0 * math.exp(-0.5 * p.gamma * horizon),
    )


def n_coh_closed_equilibrium(g: float, r_perp: float) -> float:
    """Infinite-horizon backflow for the equilibrium start (dp0 = 0), g > 1.

    The revival maxima form the geometric sequence exp(-k*pi/beta) with
    zeros of f between them, beta = sqrt(g^2 - 1), so the total rise is
    r_perp * exp(-pi/beta) / (1 - exp(-pi/beta)).
    """
    if g <= 1.0:
        raise DomainError(f"closed-form backflow requires g > 1, got {g!r}")
    beta = math.sqrt(g * g - 1.0)
    q = math.exp(-math.pi / beta)
    return r_perp * q / (1.0 - q)
