"""Figure CLI.

Single figure:      render --preset fig1 --in fig1.csv --out fig1.png
Whole pipeline:     render --pipeline --workdir build   (runs the qsl-rtn
                    presets into the workdir, then renders all five figures)

Exit codes: 0 success, 2 invalid arguments, 3 bad input data (schema or
empty CSV) or a failed sweep subprocess, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import shutil
import subprocess
import sys
from pathlib import Path

from .recipes import RECIPES
from .render import EmptyInput, RenderInfo, SchemaMismatch, render

# Every preset CSV the pipeline produces; fig2/fig3 consume two files each.
PRESET_CSVS = ("fig1", "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render qsl-rtn preset CSVs into the five standard figures.",
    )
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--preset", choices=sorted(RECIPES), help="figure to render")
    mode.add_argument("--pipeline", action="store_true",
                      help="run all qsl-rtn presets, then render every figure")
    parser.add_argument("--in", dest="inputs", action="append", default=None,
                        metavar="CSV", help="input CSV (repeat for two-panel figures)")
    parser.add_argument("--out", help="output image path (.png)")
    parser.add_argument("--workdir", default="figures-build",
                        help="pipeline directory for CSVs (default figures-build)")
    parser.add_argument("--out-dir", default=None,
                        help="pipeline directory for images (default: the workdir)")
    parser.add_argument("--sweep-cmd", default="qsl-rtn",
                        help="sweep executable used by the pipeline")
    return parser


def run_pipeline(workdir: str, out_dir: str | None, sweep_cmd: str) -> list[RenderInfo]:
    exe = shutil.which(sweep_cmd)
    if exe is None:
        raise FileNotFoundError(
            f"{sweep_cmd!r} not found on PATH; install the qsl-rtn package first"
        )
    work = Path(workdir)
    work.mkdir(parents=True, exist_ok=True)
    images = Path(out_dir) if out_dir else work
    images.mkdir(parents=True, exist_ok=True)

    for preset in PRESET_CSVS:
        target = work / f"{preset}.csv"
        proc = subprocess.run(
            [exe, "sweep", preset, "--out", str(target)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
        )
        if proc.returncode != 0:
            raise RuntimeError(
                f"sweep {preset} failed with exit {proc.returncode}: {proc.stderr.strip()}"
            )

    infos = []
    for name, recipe in sorted(RECIPES.items()):
        paths = [str(work / f"{inp}.csv") for inp in recipe.inputs]
        infos.append(render(recipe, paths, str(images / f"{name}.png")))
    return infos


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.pipeline:
            infos = run_pipeline(args.workdir, args.out_dir, args.sweep_cmd)
            for info in infos:
                print(f"# wrote {info.out_path} (panels={info.panels}, series={info.series})",
                      file=sys.stderr)
            return 0
        if not args.inputs:
            print("error: --in is required with --preset", file=sys.stderr)
            return 2
        if not args.out:
            print("error: --out is required with --preset", file=sys.stderr)
            return 2
        info = render(RECIPES[args.preset], args.inputs, args.out)
        print(f"# wrote {info.out_path} (panels={info.panels}, series={info.series})",
              file=sys.stderr)
        return 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaMismatch, EmptyInput, RuntimeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4


def console_entry() -> None:
    sys.exit(cli_main(sys.argv[1:]))
