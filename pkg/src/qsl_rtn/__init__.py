"""Exact qubit dephasing under bistable random telegraph noise, the
relative-purity quantum-speed-limit time, and coherence-backflow
non-Markovianity, with Monte Carlo and ODE validation oracles and a
figure-dataset sweep engine."""

__version__ = "0.1.0"

from . import errors
from .dynamics import (
    CRITICAL_WINDOW,
    EPS_ZERO,
    DecayCoefficients,
    Regime,
    RtnParams,
    bloch_at,
    bloch_velocity,
    classify_regime,
    complex_decay,
    complex_decay_rate,
    decay_coefficients,
    decay_factor,
    decay_factor_rate,
    spectral_density,
)
from .nonmark import (
    Direction,
    MonotoneSegments,
    NonMarkResult,
    Segment,
    monotone_segments,
    n_coh,
    n_coh_closed_equilibrium,
)
from .oracles import (
    AutocorrEstimate,
    McEstimate,
    TelegraphPath,
    mc_autocorrelation,
    mc_decay,
    ode_decay,
    sample_trajectory,
)
from .qsl import (
    QslResult,
    averaged_norms,
    generator_norms_instant,
    kink_locations,
    purity_angle,
    qsl_time,
)
from .quadrature import QuadratureSettings, integrate_adaptive
from .states import (
    BlochVector,
    DensityMatrix,
    coherence_l1,
    make_state,
    overlap,
    purity,
    to_bloch,
)
from .sweep import SweepSpec, SweepResult, run_sweep

__all__ = [
    "AutocorrEstimate",
    "BlochVector",
    "CRITICAL_WINDOW",
    "DecayCoefficients",
    "DensityMatrix",
    "Direction",
    "EPS_ZERO",
    "McEstimate",
    "MonotoneSegments",
    "NonMarkResult",
    "QslResult",
    "QuadratureSettings",
    "Regime",
    "RtnParams",
    "Segment",
    "SweepResult",
    "SweepSpec",
    "TelegraphPath",
    "averaged_norms",
    "bloch_at",
    "bloch_velocity",
    "classify_regime",
    "coherence_l1",
    "complex_decay",
    "complex_decay_rate",
    "decay_coefficients",
    "decay_factor",
    "decay_factor_rate",
    "errors",
    "generator_norms_instant",
    "integrate_adaptive",
    "kink_locations",
    "make_state",
    "mc_autocorrelation",
    "mc_decay",
    "monotone_segments",
    "n_coh",
    "n_coh_closed_equilibrium",
    "ode_decay",
    "overlap",
    "purity",
    "purity_angle",
    "qsl_time",
    "run_sweep",
    "sample_trajectory",
    "spectral_density",
    "to_bloch",
]
