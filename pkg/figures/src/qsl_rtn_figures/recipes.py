"""Figure recipes: which preset CSVs feed which panels.

One recipe per figure.  Panels reference CSV columns by name; rendering
validates that every referenced column exists before touching the data.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PanelSpec:
    source: int                      # index into the recipe's inputs
    x: str
    y: str
    series_by: str | None = None     # column whose values split the curves
    row_filter: tuple[str, float] | None = None
    logx: bool = False
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""

    def columns(self) -> set[str]:
        cols = {self.x, self.y}
        if self.series_by:
            cols.add(self.series_by)
        if self.row_filter:
            cols.add(self.row_filter[0])
        return cols


@dataclass(frozen=True)
class FigureRecipe:
    name: str
    inputs: tuple[str, ...]          # logical preset names, in order
    panels: tuple[PanelSpec, ...]
    stacked: bool = True             # multi-panel figures stack vertically


RECIPES: dict[str, FigureRecipe] = {
    "fig1": FigureRecipe(
        name="fig1",
        inputs=("fig1",),
        panels=(
            PanelSpec(0, "g", "n_coh", series_by="dp0", logx=True,
                      xlabel="lambda/gamma", ylabel="N_coh",
                      title="coherence backflow vs coupling"),
        ),
    ),
    "fig2": FigureRecipe(
        name="fig2",
        inputs=("fig2a", "fig2b"),
        panels=(
            PanelSpec(0, "gamma_tau", "tau_qsl_gamma", series_by="g",
                      xlabel="gamma tau", ylabel="gamma tau_qsl",
                      title="(a) speed limit, equilibrium noise (dp0 = 0)"),
            PanelSpec(1, "gamma_tau", "n_coh",
                      xlabel="gamma tau", ylabel="N_coh",
                      title="(b) backflow, strong coupling"),
        ),
    ),
    "fig3": FigureRecipe(
        name="fig3",
        inputs=("fig3a", "fig3b"),
        panels=(
            PanelSpec(0, "gamma_tau", "tau_qsl_gamma", series_by="g",
                      xlabel="gamma tau", ylabel="gamma tau_qsl",
                      title="(a) speed limit, biased noise (dp0 = 1)"),
            PanelSpec(1, "gamma_tau", "n_coh",
                      xlabel="gamma tau", ylabel="N_coh",
                      title="(b) backflow, strong coupling"),
        ),
    ),
    "fig4": FigureRecipe(
        name="fig4",
        inputs=("fig4",),
        panels=(
            PanelSpec(0, "gamma_tau", "tau_qsl_gamma", series_by="dp0",
                      row_filter=("g", 4.0),
                      xlabel="gamma tau", ylabel="gamma tau_qsl",
                      title="(a) strong coupling (g = 4)"),
            PanelSpec(0, "gamma_tau", "tau_qsl_gamma", series_by="dp0",
                      row_filter=("g", 0.4),
                      xlabel="gamma tau", ylabel="gamma tau_qsl",
                      title="(b) weak coupling (g = 0.4)"),
        ),
    ),
    "fig5": FigureRecipe(
        name="fig5",
        inputs=("fig5",),
        panels=(
            PanelSpec(0, "g", "tau_qsl_gamma", series_by="dp0", logx=True,
                      xlabel="lambda/gamma", ylabel="gamma tau_qsl",
                      title="speed limit vs coupling (gamma tau = 5)"),
        ),
    ),
}
