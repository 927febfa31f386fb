"""Adaptive panel quadrature with pre-splitting at known kink locations.

Plain adaptive Simpson on panels, refined by bisection with Richardson
acceptance.  The integrand must accept a numpy array of abscissae; all
active panels of a refinement level are evaluated in one batched call.
Pre-splitting the interval at the kinks of the integrand keeps each panel
smooth, which naive global adaptivity cannot guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import QuadratureNotConverged


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_panel_depth: int = 40
    kink_pre_split: bool = True

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be > 0")
        if self.max_panel_depth < 1:
            raise ValueError("max_panel_depth must be >= 1")


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    settings: QuadratureSettings | None = None,
    split_points: Iterable[float] = (),
) -> tuple[float, float]:
    """Integrate ``f`` over [a, b], returning (value, error_bound).

    ``split_points`` are interior abscissae where panels are forced to
    break (kinks or zeros of the integrand's derivative).  Raises
    :class:`QuadratureNotConverged` if panels still fail their share of the
    tolerance at ``max_panel_depth`` halvings.
    """
    s = settings or QuadratureSettings()
    if b == a:
        return 0.0, 0.0
    if b < a:
        raise ValueError("integration interval must have b >= a")

    width = b - a
    pts = [a]
    for x in sorted(float(x) for x in split_points):
        if a < x < b and x - pts[-1] > 1e-15 * width:
            pts.append(x)
    pts.append(b)
    edges = np.asarray(pts)

    x0 = edges[:-1].copy()
    x1 = edges[1:].copy()
    xm = 0.5 * (x0 + x1)
    nodes = np.concatenate([edges, xm])
    vals = np.asarray(f(nodes), dtype=float)
    f_edges, fm = vals[: edges.size], vals[edges.size:]
    f0 = f_edges[:-1].copy()
    f1 = f_edges[1:].copy()
    S = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1)

    value = 0.0
    err_sum = 0.0

    for _depth in range(s.max_panel_depth + 1):
        if x0.size == 0:
            break
        lm = 0.5 * (x0 + xm)
        rm = 0.5 * (xm + x1)
        fv = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        flm, frm = fv[: lm.size], fv[lm.size:]
        h = x1 - x0
        S_l = h / 12.0 * (f0 + 4.0 * flm + fm)
        S_r = h / 12.0 * (fm + 4.0 * frm + f1)
        S2 = S_l + S_r
        err = (S2 - S) / 15.0

        total_est = value + float(np.sum(S2))
        scale = max(s.abs_tol, s.rel_tol * abs(total_est))
        tol = scale * h / width

        done = np.abs(err) <= tol
        if np.any(done):
            value += float(np.sum(S2[done] + err[done]))
            err_sum += float(np.sum(np.abs(err[done])))

        keep = ~done
        if not np.any(keep):
            x0 = x0[:0]
            break
        x0 = np.concatenate([x0[keep], xm[keep]])
        x1 = np.concatenate([xm[keep], x1[keep]])
        f0 = np.concatenate([f0[keep], fm[keep]])
        f1 = np.concatenate([fm[keep], f1[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        xm = np.concatenate([lm[keep], rm[keep]])
        S = np.concatenate([S_l[keep], S_r[keep]])

    if x0.size:
        achieved = err_sum + float(np.sum(np.abs((S))))  # crude bound on the rest
        raise QuadratureNotConverged(
            f"{x0.size} panel(s) not converged after {s.max_panel_depth} halvings; "
            f"achieved error estimate {achieved:.3e}",
            value=value + float(np.sum(S)),
            achieved_error=achieved,
        )
    return value, err_sum
