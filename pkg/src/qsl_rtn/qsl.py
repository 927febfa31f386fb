"""Relative-purity speed-limit time and time-averaged generator norms.

The distance between the initial and evolved state is the relative-purity
angle Theta = arccos sqrt(tr[rho0 rho_t] / tr[rho0^2]); the bound is

    tau_qsl = max{1/L_op, 1/L_tr, 1/L_hs} * sin^2(Theta) * tr[rho0^2]

with L_* the time averages of the operator/trace/Hilbert-Schmidt norms of
d(rho)/dt.  For a qubit d(rho)/dt = (v . sigma)/2 is traceless Hermitian
with eigenvalues +-|v|/2, so the three instantaneous norms are |v|/2, |v|
and |v|/sqrt(2): the averaged norms share one integral of the Bloch speed
|v(t)| = r_perp sqrt(f'^2 + w^2 f^2), and the operator-norm term always
attains the max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import RtnParams, bloch_at, complex_decay, complex_decay_rate
from .errors import FrozenDynamics, OverlapExceedsPurity, TwoPathMismatch
from .quadrature import QuadratureSettings, integrate_adaptive
from .states import BlochVector, make_state, overlap, purity

# Overshoot tolerance for tr[rho0 rho_t] vs tr[rho0^2] before raising.
_OVERLAP_SLACK = 1e-9
# Relative agreement demanded between the two tau_qsl evaluations.
_TWO_PATH_RTOL = 1e-9


@dataclass(frozen=True)
class QslResult:
    """One speed-limit evaluation: angle, averaged norms, bound, and ratio."""

    theta: float
    lambda_op: float
    lambda_tr: float
    lambda_hs: float
    tau_qsl: float
    ratio: float


def purity_angle(rho0, rho_t) -> float:
    """Relative-purity angle; not symmetric (normalized by rho0's purity)."""
    ov = overlap(rho0, rho_t)
    pu = purity(rho0)
    if ov > pu * (1.0 + _OVERLAP_SLACK):
        raise OverlapExceedsPurity(
            f"tr[rho0 rho_t] = {ov!r} exceeds tr[rho0^2] = {pu!r}; "
            "the pair cannot come from this dephasing family"
        )
    ratio = min(max(ov / pu, 0.0), 1.0)
    return math.acos(math.sqrt(ratio))


def generator_norms_instant(v) -> tuple[float, float, float]:
    """(operator, trace, Hilbert-Schmidt) norms of d(rho)/dt = (v.sigma)/2."""
    speed = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    return 0.5 * speed, speed, speed / math.sqrt(2.0)


def kink_locations(p: RtnParams, tau: float) -> np.ndarray:
    """Interior times where f' changes sign or f touches zero, sorted.

    Sign-scans h(t) = d|D|^2/dt (smooth even where f = 0) on a grid of
    max(64, 32*ceil(beta*gamma*tau/pi)) points, seeds the g > 1 revival
    structure with its analytic maxima/zero families, then bisects every
    bracket to an absolute time tolerance of 1e-12*tau.  Stationary touch
    points without a sign change (the |dp0| = 1 revivals) are correctly
    not reported.
    """
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau!r}")
    g = p.g
    n = 64
    beta = math.sqrt(g * g - 1.0) if g > 1.0 else 0.0
    if g > 1.0:
        n = max(64, 32 * math.ceil(beta * p.gamma * tau / math.pi))

    grid = np.linspace(0.0, tau, n + 1)
    if g > 1.0:
        step = tau / n
        seeds = []
        k = 1
        while True:
            t_max = 2.0 * k * math.pi / (beta * p.gamma)
            t_zero = (2.0 / (beta * p.gamma)) * (math.pi - math.atan(beta) + (k - 1) * math.pi)
            if t_max > tau and t_zero > tau:
                break
            seeds.extend([t_zero, t_max])
            k += 1
        extra = []
        for t0 in seeds:
            extra.extend([t0 - 0.5 * step, t0 + 0.5 * step])
        grid = np.unique(np.clip(np.concatenate([grid, extra]), 0.0, tau))

    def h(ts: np.ndarray) -> np.ndarray:
        d = complex_decay(p, ts)
        dp = complex_decay_rate(p, ts)
        return 2.0 * (np.conj(d) * dp).real

    hv = h(grid)
    sign = np.sign(hv)
    # h(0) = 0 identically, so leading zeros never bracket a root; an exact
    # zero at an interior grid point inherits the previous sign so a genuine
    # crossing there is still bracketed (and bisection converges onto it).
    for i in range(1, sign.size):
        if sign[i] == 0.0 and sign[i - 1] != 0.0:
            sign[i] = sign[i - 1]
    change = (sign[:-1] * sign[1:] < 0)
    lo = grid[:-1][change].copy()
    hi = grid[1:][change].copy()
    if lo.size == 0:
        return np.empty(0)

    s_lo = np.sign(h(lo))
    tol = 1e-12 * tau
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        s_mid = np.sign(h(mid))
        left = s_mid == s_lo
        lo = np.where(left, mid, lo)
        s_lo = np.where(left, s_mid, s_lo)
        hi = np.where(left, hi, mid)
    roots = 0.5 * (lo + hi)
    roots = roots[(roots > 0.0) & (roots < tau)]
    roots.sort()
    keep = np.ones(roots.size, dtype=bool)
    keep[1:] = np.diff(roots) > 2.0 * tol
    return roots[keep]


def _speed_integrand(p: RtnParams, r_perp: float, ts: np.ndarray) -> np.ndarray:
    """|v(t)| evaluated stably through D and D' (finite at zeros of f)."""
    d = complex_decay(p, ts)
    dp = complex_decay_rate(p, ts)
    f2 = (d * np.conj(d)).real
    ffp = (np.conj(d) * dp).real
    w = p.phase_rate
    tiny = f2 < 1e-26
    f2_safe = np.where(tiny, 1.0, f2)
    val2 = np.where(tiny, (dp * np.conj(dp)).real, (ffp * ffp + w * w * f2 * f2) / f2_safe)
    return r_perp * np.sqrt(np.maximum(val2, 0.0))


def averaged_norms(
    p: RtnParams,
    r0: BlochVector,
    tau: float,
    settings: QuadratureSettings | None = None,
) -> tuple[float, float, float]:
    """Time-averaged (operator, trace, Hilbert-Schmidt) generator norms.

    One kink-aware adaptive quadrature of the Bloch speed serves all three;
    the returned triple is ordered op <= hs <= tr.
    """
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau!r}")
    s = settings or QuadratureSettings()
    r_perp = r0.r_perp
    if r_perp == 0.0 or (p.lam == 0.0 and p.phase_rate == 0.0):
        return 0.0, 0.0, 0.0
    splits = kink_locations(p, tau) if s.kink_pre_split else ()
    total, _err = integrate_adaptive(
        lambda ts: _speed_integrand(p, r_perp, ts), 0.0, tau, s, splits
    )
    return 0.5 * total / tau, total / tau, total / (math.sqrt(2.0) * tau)


def qsl_time(
    p: RtnParams,
    r0: BlochVector,
    tau: float,
    settings: QuadratureSettings | None = None,
) -> QslResult:
    """Speed-limit time over the window [0, tau].

    Evaluated twice: through the angle/norm formula and through the
    algebraic reduction tau * (|r0|^2 - r0.r_tau) / integral(|v|); the two
    must agree to 1e-9 relative or :class:`TwoPathMismatch` is raised.
    Raises :class:`FrozenDynamics` when every averaged norm vanishes.
    """
    l_op, l_tr, l_hs = averaged_norms(p, r0, tau, settings)
    if l_op <= 0.0:
        raise FrozenDynamics(
            "all averaged generator norms are zero (stationary state); "
            "the speed-limit bound degenerates to 0/0"
        )
    assert l_op <= l_hs <= l_tr

    rho0 = make_state(r0)
    r_tau = bloch_at(p, r0, tau)
    rho_tau = make_state(r_tau)
    theta = purity_angle(rho0, rho_tau)

    inv = (1.0 / l_op, 1.0 / l_tr, 1.0 / l_hs)
    tau_qsl = max(inv) * math.sin(theta) ** 2 * purity(rho0)

    # Independent algebraic route through Bloch dot products only.
    dot00 = r0.rx**2 + r0.ry**2 + r0.rz**2
    dot0t = r0.rx * r_tau.rx + r0.ry * r_tau.ry + r0.rz * r_tau.rz
    speed_integral = l_tr * tau
    tau_qsl_alg = tau * (dot00 - dot0t) / speed_integral

    scale = max(abs(tau_qsl), abs(tau_qsl_alg), 1e-300)
    if abs(tau_qsl - tau_qsl_alg) > _TWO_PATH_RTOL * scale:
        raise TwoPathMismatch(
            f"angle/norm route gives {tau_qsl!r}, algebraic route {tau_qsl_alg!r}"
        )
    return QslResult(
        theta=theta,
        lambda_op=l_op,
        lambda_tr=l_tr,
        lambda_hs=l_hs,
        tau_qsl=tau_qsl,
        ratio=tau_qsl / tau,
    )
