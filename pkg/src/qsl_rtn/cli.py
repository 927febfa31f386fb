"""Command-line front end.

Subcommands: ``evolve``, ``qsl``, ``nonmark``, ``sweep <preset|kind>`` and
``mc-validate``.  Data goes to stdout or to ``--out`` (written atomically);
every diagnostic goes to stderr.  Exit codes: 0 success, 2 invalid
arguments, 3 numerical failure, 4 I/O failure.

Times given on the command line (``--tau``, ``--tmax``) are physical and
are normalized by ``--gamma`` internally; all emitted columns use the
dimensionless gamma*t axes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__
from .errors import (
    BlochOutOfBall,
    InvalidSpec,
    NegativeTime,
    QslRtnError,
)
from .nonmark import n_coh
from .qsl import qsl_time
from .sweep import (
    CUSTOM_KINDS,
    PRESETS,
    SweepSpec,
    atomic_write_text,
    bloch_from_spec,
    format_number,
    params_from_spec,
    render,
    run_sweep,
    spec_from_mapping,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_FLAG_FIELDS = (
    "gamma", "g", "lam", "dp0", "omega", "v", "bloch", "tau", "tmax",
    "points", "traj", "seed", "out", "format", "threads",
)


def _parse_bloch(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers rx,ry,rz")
    try:
        return tuple(float(x) for x in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad Bloch component in {text!r}") from exc


def _common_flags() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--gamma", type=float, default=None, help="switching rate (default 1.0)")
    c.add_argument("--g", type=float, default=None, help="coupling ratio lam/gamma")
    c.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="coupling strength (mutually exclusive with --g)")
    c.add_argument("--dp0", type=float, default=None, help="initial noise bias in [-1, 1] (default 0)")
    c.add_argument("--omega", type=float, default=None, help="qubit frequency (default 0)")
    c.add_argument("--v", type=float, default=None, help="extra phase rate (default 0)")
    c.add_argument("--bloch", type=_parse_bloch, default=None, metavar="RX,RY,RZ",
                   help="initial Bloch vector (default 0.5,0.5,0.5)")
    c.add_argument("--tau", type=float, default=None, help="driving time (physical units)")
    c.add_argument("--tmax", type=float, default=None, help="horizon / axis end (physical units)")
    c.add_argument("--points", type=int, default=None, help="grid points")
    c.add_argument("--traj", type=int, default=None, help="Monte Carlo trajectories (default 100000)")
    c.add_argument("--seed", type=int, default=None, help="Monte Carlo master seed (default 0)")
    c.add_argument("--out", type=str, default=None, help="output file (default: stdout)")
    c.add_argument("--format", type=str, default=None, choices=("csv", "json"), help="output format")
    c.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: QSL_RTN_THREADS or machine parallelism)")
    c.add_argument("--axis-min", dest="axis_min", type=float, default=None, help="sweep axis start")
    c.add_argument("--axis-max", dest="axis_max", type=float, default=None, help="sweep axis end")
    c.add_argument("--log", dest="log_axis", action="store_const", const=True, default=None,
                   help="log-spaced sweep axis")
    c.add_argument("--config", type=str, default=None,
                   help="JSON run-config file (flat snake_case keys; flags override it)")
    return c


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsl-rtn",
        description="Dephasing under bistable telegraph noise: decay factor, "
                    "speed-limit time, coherence backflow, oracle validation.",
    )
    parser.add_argument("--version", action="version", version=f"qsl-rtn {__version__}")
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="Bloch trajectory table over a time grid")
    sub.add_parser("qsl", parents=[common], help="speed-limit time for one (params, r0, tau)")
    sub.add_parser("nonmark", parents=[common], help="coherence backflow up to a horizon")
    sp = sub.add_parser("sweep", parents=[common], help="run a named preset or a custom sweep")
    sp.add_argument("what", choices=PRESETS + CUSTOM_KINDS, help="preset or sweep kind")
    sub.add_parser("mc-validate", parents=[common], help="Monte Carlo vs closed form on a grid")
    return parser


def _spec_for(args: argparse.Namespace, kind: str) -> SweepSpec:
    spec = SweepSpec(kind=kind)
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"run-config {args.config!r} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidSpec("run-config must be a flat JSON object")
        data.pop("kind", None)
        spec = spec_from_mapping(data, base=spec)
    overrides = {}
    for name in _FLAG_FIELDS + ("axis_min", "axis_max", "log_axis"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        spec = replace(spec, **overrides)
    return spec


def _emit(spec: SweepSpec, text: str) -> None:
    if spec.out:
        atomic_write_text(spec.out, text)
    else:
        sys.stdout.write(text)


def _kv_lines(items: list[tuple[str, float]]) -> str:
    return "".join(f"{k} = {format_number(v)}\n" for k, v in items)


def _kv_json(items: list[tuple[str, float]]) -> str:
    return json.dumps({k: 0.0 + float(v) for k, v in items}, indent=1) + "\n"


def _run_single_qsl(spec: SweepSpec) -> int:
    if spec.tau is None:
        raise InvalidSpec("field tau is required for the qsl command")
    p = params_from_spec(spec)
    r0 = bloch_from_spec(spec)
    res = qsl_time(p, r0, spec.tau)
    items = [
        ("gamma_tau", p.gamma * spec.tau),
        ("theta", res.theta),
        ("lambda_op", res.lambda_op / p.gamma),
        ("lambda_tr", res.lambda_tr / p.gamma),
        ("lambda_hs", res.lambda_hs / p.gamma),
        ("tau_qsl_gamma", p.gamma * res.tau_qsl),
        ("ratio", res.ratio),
    ]
    _emit(spec, _kv_json(items) if spec.format == "json" else _kv_lines(items))
    return EXIT_OK


def _run_single_nonmark(spec: SweepSpec) -> int:
    p = params_from_spec(spec)
    r0 = bloch_from_spec(spec)
    horizon = spec.tmax if spec.tmax is not None else 60.0 / p.gamma
    res = n_coh(p, r0, horizon)
    c0 = r0.r_perp
    items = [
        ("gamma_tmax", p.gamma * horizon),
        ("n_coh", res.n_coh),
        ("n_coh_over_C0", res.n_coh / c0 if c0 > 0 else 0.0),
        ("truncation_bound", res.truncation_bound),
        ("rising_segments", float(len(res.rising_intervals.segments))),
    ]
    _emit(spec, _kv_json(items) if spec.format == "json" else _kv_lines(items))
    return EXIT_OK


def _run_table(spec: SweepSpec) -> int:
    result = run_sweep(spec)
    _emit(spec, render(result, spec.format))
    summary = " ".join(f"{k}={v}" for k, v in result.summary.items())
    print(f"# {summary}" + (f" out={spec.out}" if spec.out else ""), file=sys.stderr)
    if not result.ok:
        print("# mc-validate FAILED: too many points beyond 4 standard errors", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "qsl":
            return _run_single_qsl(_spec_for(args, "qsl"))
        if args.command == "nonmark":
            return _run_single_nonmark(_spec_for(args, "nonmark"))
        if args.command == "evolve":
            return _run_table(_spec_for(args, "evolve"))
        if args.command == "mc-validate":
            return _run_table(_spec_for(args, "mc-validate"))
        return _run_table(_spec_for(args, args.what))
    except (InvalidSpec, BlochOutOfBall, NegativeTime, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QslRtnError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


def console_entry() -> None:
    sys.exit(cli_main(sys.argv[1:]))
