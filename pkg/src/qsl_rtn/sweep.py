"""Parameter sweeps, named figure presets, and CSV/JSON emission.

All emitted quantities are dimensionless (gamma*t axes, gamma*tau_qsl,
norms in units of gamma), so a preset's output depends only on the
dimensionless parameter set and is byte-stable across reruns and thread
counts.  Output files are written atomically (temp file + rename) and
numbers are formatted with 9 significant digits, locale-independent.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .dynamics import RtnParams, complex_decay, decay_factor
from .errors import InvalidSpec, TwoPathMismatch
from .nonmark import n_coh
from .oracles import mc_decay
from .qsl import qsl_time
from .states import BlochVector

PRESETS = ("fig1", "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5")
CUSTOM_KINDS = ("evolve", "qsl-vs-tau", "nonmark-vs-g", "qsl-vs-g", "qsl-vs-dp0", "mc-validate")

_DEFAULT_BLOCH = (0.5, 0.5, 0.5)
# Fraction of grid points that must fall within 4 standard errors for a
# Monte Carlo validation run to pass (binomial tolerance over the grid).
_MC_PASS_FRACTION = 0.95


@dataclass(frozen=True)
class SweepSpec:
    """Flat description of one run; mirrors the CLI flags and the JSON
    run-config keys (snake_case)."""

    kind: str
    gamma: float = 1.0
    g: float | None = None
    lam: float | None = None
    dp0: float = 0.0
    omega: float = 0.0
    v: float = 0.0
    bloch: tuple[float, float, float] = _DEFAULT_BLOCH
    tau: float | None = None
    tmax: float | None = None
    points: int | None = None
    axis_min: float | None = None
    axis_max: float | None = None
    log_axis: bool = False
    traj: int = 100_000
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    threads: int | None = None


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[tuple]
    summary: dict
    ok: bool = True


def spec_from_mapping(data: dict, base: SweepSpec | None = None) -> SweepSpec:
    """Build/override a spec from a flat mapping (e.g. a JSON config file)."""
    known = {f.name for f in fields(SweepSpec)}
    unknown = set(data) - known
    if unknown:
        raise InvalidSpec(f"unknown run-config field(s): {', '.join(sorted(unknown))}")
    if "bloch" in data and data["bloch"] is not None:
        data = dict(data)
        data["bloch"] = tuple(float(x) for x in data["bloch"])
    if base is None:
        if "kind" not in data:
            raise InvalidSpec("run-config must set the field 'kind'")
        return SweepSpec(**data)
    return replace(base, **data)


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("QSL_RTN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InvalidSpec(f"QSL_RTN_THREADS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def params_from_spec(spec: SweepSpec) -> RtnParams:
    if spec.g is not None and spec.lam is not None:
        raise InvalidSpec("fields g and lam are mutually exclusive")
    if spec.g is None and spec.lam is None:
        raise InvalidSpec("one of the fields g or lam is required")
    lam = spec.g * spec.gamma if spec.g is not None else spec.lam
    return RtnParams(
        gamma=spec.gamma, lam=lam, delta_p0=spec.dp0, omega=spec.omega, v=spec.v
    )


def bloch_from_spec(spec: SweepSpec) -> BlochVector:
    if len(spec.bloch) != 3:
        raise InvalidSpec("field bloch must have exactly three components rx,ry,rz")
    return BlochVector(*spec.bloch)


def _pmap(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _axis(spec: SweepSpec, default_min: float, default_max: float, default_points: int,
          default_log: bool = False, name: str = "axis") -> np.ndarray:
    lo = spec.axis_min if spec.axis_min is not None else default_min
    hi = spec.axis_max if spec.axis_max is not None else default_max
    pts = spec.points if spec.points is not None else default_points
    if pts < 2:
        raise InvalidSpec(f"field points must be >= 2 for sweeps, got {pts}")
    if not hi > lo:
        raise InvalidSpec(f"field axis_max must exceed axis_min for {name}")
    log = spec.log_axis or (default_log and spec.axis_min is None and spec.axis_max is None)
    if log:
        if lo <= 0:
            raise InvalidSpec(f"field axis_min must be > 0 for a log {name}")
        return np.geomspace(lo, hi, pts)
    return np.linspace(lo, hi, pts)


# -- row evaluators -----------------------------------------------------------

def _qsl_row(p: RtnParams, r0: BlochVector, gamma_tau: float) -> tuple:
    res = qsl_time(p, r0, gamma_tau / p.gamma)
    return (
        gamma_tau, p.g, p.delta_p0, res.theta,
        res.lambda_op / p.gamma, p.gamma * res.tau_qsl, res.ratio,
    )


def _nonmark_row(p: RtnParams, r0: BlochVector, gamma_horizon: float) -> tuple[float, float]:
    res = n_coh(p, r0, gamma_horizon / p.gamma)
    c0 = r0.r_perp
    return res.n_coh, (res.n_coh / c0 if c0 > 0.0 else 0.0)


def _verify_bias_sign_collapse(values_plus, values_minus, what: str):
    for a, b in zip(values_plus, values_minus):
        if abs(a - b) > 1e-12 * max(1.0, abs(a)):
            raise TwoPathMismatch(
                f"{what} differs between dp0 = +1 and dp0 = -1 ({a!r} vs {b!r}); "
                "the curves should coincide and be reported once"
            )


# -- preset builders ----------------------------------------------------------

def _build_fig1(threads: int) -> SweepResult:
    gs = np.geomspace(0.1, 6.0, 120)
    r0 = BlochVector(*_DEFAULT_BLOCH)
    rows = []
    for dp0 in (0.0, 1.0):
        vals = _pmap(
            lambda g, d=dp0: _nonmark_row(RtnParams.from_g(g, delta_p0=d), r0, 60.0),
            gs, threads,
        )
        if dp0 == 1.0:
            check = [0, len(gs) // 2, len(gs) - 1]
            minus = [
                _nonmark_row(RtnParams.from_g(gs[i], delta_p0=-1.0), r0, 60.0)[0]
                for i in check
            ]
            _verify_bias_sign_collapse([vals[i][0] for i in check], minus, "n_coh")
        rows.extend((g, dp0, v[0], v[1]) for g, v in zip(gs, vals))
    return SweepResult(["g", "dp0", "n_coh", "n_coh_over_C0"], rows, {})


def _qsl_vs_tau_rows(g_list, dp0_list, taus, r0, threads: int, verify_collapse: bool):
    rows = []
    for g in g_list:
        for dp0 in dp0_list:
            p = RtnParams.from_g(g, delta_p0=dp0)
            vals = _pmap(lambda t, pp=p: _qsl_row(pp, r0, t), taus, threads)
            if verify_collapse and dp0 == 1.0:
                check = [0, len(taus) // 2, len(taus) - 1]
                pm = RtnParams.from_g(g, delta_p0=-1.0)
                minus = [_qsl_row(pm, r0, taus[i])[5] for i in check]
                _verify_bias_sign_collapse([vals[i][5] for i in check], minus, "tau_qsl_gamma")
            rows.extend(vals)
    return rows


_QSL_COLUMNS = ["gamma_tau", "g", "dp0", "theta", "lambda_op", "tau_qsl_gamma", "ratio"]


def _build_fig2a(threads: int) -> SweepResult:
    taus = np.linspace(0.05, 10.0, 200)
    rows = _qsl_vs_tau_rows((0.4, 4.0), (0.0,), taus, BlochVector(*_DEFAULT_BLOCH), threads, False)
    return SweepResult(list(_QSL_COLUMNS), rows, {})


def _build_fig3a(threads: int) -> SweepResult:
    taus = np.linspace(0.05, 10.0, 200)
    rows = _qsl_vs_tau_rows((0.4, 4.0), (1.0,), taus, BlochVector(*_DEFAULT_BLOCH), threads, True)
    return SweepResult(list(_QSL_COLUMNS), rows, {})


def _build_fig4(threads: int) -> SweepResult:
    taus = np.linspace(0.05, 10.0, 200)
    rows = _qsl_vs_tau_rows((4.0, 0.4), (0.0, 1.0), taus, BlochVector(*_DEFAULT_BLOCH), threads, True)
    return SweepResult(list(_QSL_COLUMNS), rows, {})


def _build_fig2b(threads: int, dp0: float = 0.0) -> SweepResult:
    taus = np.linspace(0.05, 10.0, 200)
    r0 = BlochVector(*_DEFAULT_BLOCH)
    p = RtnParams.from_g(4.0, delta_p0=dp0)
    vals = _pmap(lambda t: _nonmark_row(p, r0, t)[0], taus, threads)
    rows = list(zip(taus.tolist(), vals))
    return SweepResult(["gamma_tau", "n_coh"], rows, {})


def _build_fig3b(threads: int) -> SweepResult:
    return _build_fig2b(threads, dp0=1.0)


def _build_fig5(threads: int) -> SweepResult:
    gs = np.geomspace(0.1, 6.0, 120)
    r0 = BlochVector(*_DEFAULT_BLOCH)
    rows = []
    for dp0 in (0.0, 1.0):
        vals = _pmap(
            lambda g, d=dp0: _qsl_row(RtnParams.from_g(g, delta_p0=d), r0, 5.0)[5],
            gs, threads,
        )
        if dp0 == 1.0:
            check = [0, len(gs) // 2, len(gs) - 1]
            minus = [
                _qsl_row(RtnParams.from_g(gs[i], delta_p0=-1.0), r0, 5.0)[5]
                for i in check
            ]
            _verify_bias_sign_collapse([vals[i] for i in check], minus, "tau_qsl_gamma")
        rows.extend((g, dp0, v) for g, v in zip(gs, vals))
    return SweepResult(["g", "dp0", "tau_qsl_gamma"], rows, {})


_PRESET_BUILDERS = {
    "fig1": _build_fig1,
    "fig2a": _build_fig2a,
    "fig2b": _build_fig2b,
    "fig3a": _build_fig3a,
    "fig3b": _build_fig3b,
    "fig4": _build_fig4,
    "fig5": _build_fig5,
}


# -- custom kinds -------------------------------------------------------------

def _build_evolve(spec: SweepSpec, threads: int) -> SweepResult:
    p = params_from_spec(spec)
    r0 = bloch_from_spec(spec)
    gamma_tmax = p.gamma * (spec.tmax if spec.tmax is not None else 10.0 / p.gamma)
    pts = spec.points if spec.points is not None else 200
    if pts < 2:
        raise InvalidSpec(f"field points must be >= 2, got {pts}")
    gts = np.linspace(0.0, gamma_tmax, pts)
    ts = gts / p.gamma
    f = np.atleast_1d(decay_factor(p, ts))
    theta = p.phase_rate * ts
    c, s = np.cos(theta), np.sin(theta)
    rx = f * (r0.rx * c + r0.ry * s)
    ry = f * (-r0.rx * s + r0.ry * c)
    rows = [(gt, x, y, r0.rz, fv) for gt, x, y, fv in zip(gts.tolist(), rx, ry, f)]
    return SweepResult(["gamma_t", "rx", "ry", "rz", "f"], rows, {})


def _build_qsl_vs_tau(spec: SweepSpec, threads: int) -> SweepResult:
    p = params_from_spec(spec)
    r0 = bloch_from_spec(spec)
    gamma_tmax = p.gamma * (spec.tmax if spec.tmax is not None else 10.0 / p.gamma)
    pts = spec.points if spec.points is not None else 200
    if pts < 2:
        raise InvalidSpec(f"field points must be >= 2, got {pts}")
    lo = spec.axis_min if spec.axis_min is not None else gamma_tmax / pts
    if lo <= 0:
        raise InvalidSpec("field axis_min must be > 0 (tau must be positive)")
    taus = np.geomspace(lo, gamma_tmax, pts) if spec.log_axis else np.linspace(lo, gamma_tmax, pts)
    rows = _pmap(lambda t: _qsl_row(p, r0, t), taus, threads)
    return SweepResult(list(_QSL_COLUMNS), rows, {})


def _build_nonmark_vs_g(spec: SweepSpec, threads: int) -> SweepResult:
    r0 = bloch_from_spec(spec)
    gs = _axis(spec, 0.1, 6.0, 120, default_log=True, name="g axis")
    if np.any(gs <= 0):
        raise InvalidSpec("field axis_min: the g axis must be positive")
    gamma_horizon = spec.gamma * (spec.tmax if spec.tmax is not None else 60.0 / spec.gamma)
    rows = []
    vals = _pmap(
        lambda g: _nonmark_row(
            RtnParams.from_g(g, spec.gamma, delta_p0=spec.dp0, omega=spec.omega, v=spec.v),
            r0, gamma_horizon,
        ),
        gs, threads,
    )
    rows.extend((g, spec.dp0, v[0], v[1]) for g, v in zip(gs.tolist(), vals))
    return SweepResult(["g", "dp0", "n_coh", "n_coh_over_C0"], rows, {})


def _build_qsl_vs_g(spec: SweepSpec, threads: int) -> SweepResult:
    r0 = bloch_from_spec(spec)
    if spec.tau is None:
        raise InvalidSpec("field tau is required for a qsl-vs-g sweep")
    gs = _axis(spec, 0.1, 6.0, 120, default_log=True, name="g axis")
    if np.any(gs <= 0):
        raise InvalidSpec("field axis_min: the g axis must be positive")
    gamma_tau = spec.gamma * spec.tau
    vals = _pmap(
        lambda g: _qsl_row(
            RtnParams.from_g(g, spec.gamma, delta_p0=spec.dp0, omega=spec.omega, v=spec.v),
            r0, gamma_tau,
        )[5],
        gs, threads,
    )
    rows = [(g, spec.dp0, v) for g, v in zip(gs.tolist(), vals)]
    return SweepResult(["g", "dp0", "tau_qsl_gamma"], rows, {})


def _build_qsl_vs_dp0(spec: SweepSpec, threads: int) -> SweepResult:
    p0 = params_from_spec(spec)
    r0 = bloch_from_spec(spec)
    if spec.tau is None:
        raise InvalidSpec("field tau is required for a qsl-vs-dp0 sweep")
    dps = _axis(spec, -1.0, 1.0, 81, name="dp0 axis")
    if np.any(np.abs(dps) > 1):
        raise InvalidSpec("field axis_min/axis_max: the dp0 axis must lie in [-1, 1]")
    gamma_tau = spec.gamma * spec.tau
    vals = _pmap(
        lambda d: _qsl_row(replace(p0, delta_p0=d), r0, gamma_tau)[5],
        dps, threads,
    )
    rows = [(d, p0.g, v) for d, v in zip(dps.tolist(), vals)]
    return SweepResult(["dp0", "g", "tau_qsl_gamma"], rows, {})


def _build_mc_validate(spec: SweepSpec, threads: int) -> SweepResult:
    p = params_from_spec(spec)
    if spec.traj < 1000:
        raise InvalidSpec(f"field traj must be >= 1000, got {spec.traj}")
    gamma_tmax = p.gamma * (spec.tmax if spec.tmax is not None else 5.0 / p.gamma)
    pts = spec.points if spec.points is not None else 40
    if pts < 2:
        raise InvalidSpec(f"field points must be >= 2, got {pts}")
    gts = np.linspace(gamma_tmax / pts, gamma_tmax, pts)
    ts = gts / p.gamma
    est = mc_decay(p, ts, n_traj=spec.traj, seed=spec.seed, threads=threads)
    exact = np.atleast_1d(complex_decay(p, ts))
    diff = np.abs(est.mean - exact)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(
            est.stderr > 0.0, diff / est.stderr, np.where(diff == 0.0, 0.0, np.inf)
        )
    rows = [
        (gt, m.real, m.imag, se, ex.real, ex.imag, ra)
        for gt, m, se, ex, ra in zip(gts.tolist(), est.mean, est.stderr, exact, ratio)
    ]
    frac = float(np.mean(ratio <= 4.0))
    ok = frac >= _MC_PASS_FRACTION
    return SweepResult(
        ["gamma_t", "re_mc", "im_mc", "stderr", "re_exact", "im_exact", "abs_diff_over_stderr"],
        rows,
        {"within_4_stderr_fraction": frac, "n_traj": spec.traj, "seed": spec.seed},
        ok=ok,
    )


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate one preset or custom sweep; deterministic for a fixed spec."""
    if spec.format not in ("csv", "json"):
        raise InvalidSpec(f"field format must be 'csv' or 'json', got {spec.format!r}")
    threads = resolve_threads(spec.threads)
    start = time.perf_counter()
    if spec.kind in _PRESET_BUILDERS:
        result = _PRESET_BUILDERS[spec.kind](threads)
    elif spec.kind == "evolve":
        result = _build_evolve(spec, threads)
    elif spec.kind == "qsl-vs-tau":
        result = _build_qsl_vs_tau(spec, threads)
    elif spec.kind == "nonmark-vs-g":
        result = _build_nonmark_vs_g(spec, threads)
    elif spec.kind == "qsl-vs-g":
        result = _build_qsl_vs_g(spec, threads)
    elif spec.kind == "qsl-vs-dp0":
        result = _build_qsl_vs_dp0(spec, threads)
    elif spec.kind == "mc-validate":
        result = _build_mc_validate(spec, threads)
    else:
        raise InvalidSpec(
            f"field kind: unknown sweep {spec.kind!r}; expected one of "
            f"{', '.join(PRESETS + CUSTOM_KINDS)}"
        )
    result.summary.update(
        kind=spec.kind,
        rows=len(result.rows),
        threads=threads,
        version=__version__,
        wall_time_s=round(time.perf_counter() - start, 3),
    )
    return result


# -- output -------------------------------------------------------------------

def format_number(x: float) -> str:
    """9 significant digits, '.' decimal separator, -0 normalized."""
    return format(0.0 + float(x), ".9g")


def render_csv(result: SweepResult) -> str:
    lines = [",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(result: SweepResult) -> str:
    payload = {
        "kind": result.summary.get("kind"),
        "version": __version__,
        "columns": result.columns,
        "rows": [[0.0 + float(v) for v in row] for row in result.rows],
    }
    return json.dumps(payload, separators=(",", ": "), indent=1) + "\n"


def render(result: SweepResult, fmt: str) -> str:
    return render_csv(result) if fmt == "csv" else render_json(result)


def atomic_write_text(path: str, text: str) -> None:
    """Write the full payload or nothing: temp file in place, then rename."""
    target = os.path.abspath(path)
    directory = os.path.dirname(target) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
