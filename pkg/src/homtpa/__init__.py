"""Forward simulation and inverse inference for entangled two-photon
absorption read out through Hong-Ou-Mandel interferometry."""

__version__ = "0.1.0"

from .closed_form import (
    ClosedFormParams,
    GaussianReduction,
    build_params,
    calibrate_phase_matching,
    closed_form_dip_fwhm,
    closed_form_interferogram,
    closed_form_rates,
    derive_params,
    detuning_overlap,
    filter_overlap,
    joint_bandwidth,
    predicted_visibility,
)
from .hom_numeric import hom_integral, min_grid_points
from .inference import (
    ConcentrationSeries,
    FitReport,
    SeriesEntry,
    calibrate_reference,
    fit_eta,
    run_series,
)
from .interferogram import (
    DipMetrics,
    Interferogram,
    SignalFit,
    dip_metrics,
    etpa_signal,
    normalize_by_long_delay,
)
from .spectral import (
    BiphotonModel,
    FilterSpec,
    FrequencyGrid,
    PhaseMatchSpec,
    PumpSpec,
    SampleSpec,
    default_grid,
    filter_amplitude,
    filter_intensity,
    jsa,
    jsi,
    jsi_integral,
    phase_matching,
    phase_matching_expanded,
    pump_envelope,
    sample_amplitude,
    sample_transfer,
)
from .synth import NoiseSpec, ScenarioSpec, solve_eta_for_slope, synth_interferogram, synth_power_sweep
from .transmittance import (
    CrossSectionResult,
    GeometrySpec,
    PowerSweep,
    SlopeFit,
    cross_section,
    fit_slope,
    loss_correct,
)

__all__ = [name for name in dir() if not name.startswith("_")]
