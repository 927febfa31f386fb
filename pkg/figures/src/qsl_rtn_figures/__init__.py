"""Figure rendering for qsl-rtn preset CSVs."""

__version__ = "0.1.0"

from .recipes import RECIPES, FigureRecipe, PanelSpec
from .render import EmptyInput, RenderInfo, SchemaMismatch, read_table, render

__all__ = [
    "RECIPES",
    "EmptyInput",
    "FigureRecipe",
    "PanelSpec",
    "RenderInfo",
    "SchemaMismatch",
    "read_table",
    "render",
]
