"""Spectral-domain simulation of intra-atomic frequency-comb quantum memories."""

__version__ = "0.1.0"

from .comb import (  # noqa: E402
    FinesseError,
    FrequencyComb,
    ThermalSpec,
    Tooth,
    apply_populations,
    boltzmann_weights,
    effective_depth,
    finesse,
    perturb_depth,
    perturb_spacing,
    read_comb,
    thermal_comb,
    uniform_comb,
    write_comb,
)
from .propagation import (  # noqa: E402
    GridError,
    SpectralField,
    SpectralGrid,
    TimeField,
    echo_peak_time,
    first_echo_efficiency,
    gaussian_spectrum,
    make_grid,
    propagate_forward,
    propagator,
)
from .analytic import AfcParams, emission_probability, eta_backward, eta_forward  # noqa: E402
from .ensemble import (  # noqa: E402
    DisorderSpec,
    EfficiencyCurve,
    EnsembleResult,
    run_ensemble,
    sweep_length,
    sweep_strength,
)
from .backward import (  # noqa: E402
    FitError,
    FitResult,
    backward_efficiency,
    fit_forward_model,
    fit_quality_gate,
)
