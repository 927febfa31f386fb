"""Render preset CSVs into figure images.

Rendering never recomputes physics: it reads only documented CSV columns,
and a sha256 checksum of every input file is embedded in the image metadata
so each figure is tied to the exact data it was drawn from.
"""

from __future__ import annotations

import csv
import hashlib
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .recipes import FigureRecipe, PanelSpec


class FigureError(Exception):
    """Base class for rendering failures."""


class SchemaMismatch(FigureError):
    """A referenced column is missing from the CSV header."""


class EmptyInput(FigureError):
    """The CSV has a header but no data rows."""


@dataclass(frozen=True)
class Table:
    path: str
    columns: list[str]
    data: np.ndarray  # shape (rows, columns)
    sha256: str

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


@dataclass(frozen=True)
class RenderInfo:
    out_path: str
    panels: int
    series: int
    checksums: dict[str, str]


def read_table(path: str) -> Table:
    with open(path, "rb") as handle:
        raw = handle.read()
    digest = hashlib.sha256(raw).hexdigest()
    lines = raw.decode("utf-8").splitlines()
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput(f"{path} is empty") from None
    rows = [row for row in reader if row]
    if not rows:
        raise EmptyInput(f"{path} has a header but no data rows")
    data = np.array([[float(v) for v in row] for row in rows])
    return Table(path=path, columns=header, data=data, sha256=digest)


def _check_schema(table: Table, panel: PanelSpec):
    missing = sorted(panel.columns() - set(table.columns))
    if missing:
        raise SchemaMismatch(
            f"{table.path} is missing column(s) {', '.join(missing)}; "
            f"header has {', '.join(table.columns)}"
        )


def _series_values(col: np.ndarray) -> list[float]:
    seen: dict[float, None] = {}
    for v in col:
        seen.setdefault(float(v), None)
    return list(seen)


def _draw_panel(ax, table: Table, panel: PanelSpec) -> int:
    data = table.data
    if panel.row_filter:
        name, value = panel.row_filter
        data = data[np.isclose(table.column(name), value, rtol=1e-9, atol=1e-12)]
    sub = Table(table.path, table.columns, data, table.sha256)
    n_series = 0
    if panel.series_by:
        for val in _series_values(sub.column(panel.series_by)):
            mask = sub.column(panel.series_by) == val
            ax.plot(
                sub.column(panel.x)[mask],
                sub.column(panel.y)[mask],
                label=f"{panel.series_by} = {val:g}",
            )
            n_series += 1
        ax.legend()
    else:
        ax.plot(sub.column(panel.x), sub.column(panel.y))
        n_series = 1
    if panel.logx:
        ax.set_xscale("log")
    ax.set_xlabel(panel.xlabel or panel.x)
    ax.set_ylabel(panel.ylabel or panel.y)
    if panel.title:
        ax.set_title(panel.title, fontsize=10)
    return n_series


def render(recipe: FigureRecipe, in_paths: list[str], out_path: str) -> RenderInfo:
    """Draw one figure from its input CSVs and embed the data checksums."""
    if len(in_paths) != len(recipe.inputs):
        raise ValueError(
            f"recipe {recipe.name} needs {len(recipe.inputs)} input file(s) "
            f"({', '.join(recipe.inputs)}), got {len(in_paths)}"
        )
    tables = [read_table(p) for p in in_paths]
    for panel in recipe.panels:
        _check_schema(tables[panel.source], panel)

    n = len(recipe.panels)
    shape = (n, 1) if recipe.stacked else (1, n)
    fig, axes = plt.subplots(*shape, figsize=(6.4, 3.6 * n), squeeze=False)
    total_series = 0
    for ax, panel in zip(axes.flat, recipe.panels):
        total_series += _draw_panel(ax, tables[panel.source], panel)
    fig.tight_layout()

    checksums = {os.path.basename(t.path): t.sha256 for t in tables}
    metadata = {
        "data-sha256": ",".join(f"{k}:{v}" for k, v in sorted(checksums.items())),
        "panels": str(n),
        "series": str(total_series),
    }
    try:
        fig.savefig(out_path, format="png", dpi=110, metadata=metadata)
    finally:
        plt.close(fig)
    return RenderInfo(out_path=out_path, panels=n, series=total_series, checksums=checksums)
