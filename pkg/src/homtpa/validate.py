"""Cross-check battery: closed form versus brute-force quadrature.

Builds a deterministic family of all-Gaussian models around the laboratory
configuration, sweeping absorber efficiency, notch width relative to the dip
bandwidth, notch detuning, filter detuning and phase-matching symmetry, and
reports the worst pointwise deviation between the quadrature interferogram
and the closed-form curve derived by exact reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .closed_form import calibrate_phase_matching, closed_form_rates, derive_params
from .hom_numeric import hom_integral
from .spectral import BiphotonModel, FilterSpec, PumpSpec, SampleSpec, default_grid
from .units import omega_from_lambda_nm, sigma_radfs_from_fwhm_nm


def reference_model(
    eta: float = 0.0,
    filter_fwhm_nm: float = 40.0,
    filter_center_nm: float = 800.0,
    dip_fwhm_fs: float = 70.0,
    dip_visibility: float = 0.61,
    sample_width: float = 0.01,
    sample_detuning: float = 0.0,
) -> BiphotonModel:
    """Laboratory-style model: 403 nm pump of 1 nm bandwidth, bandpass-filtered
    degenerate pairs, group delays calibrated to a target reference dip."""
    omega_p = omega_from_lambda_nm(403.0)
    pump = PumpSpec(omega_p, sigma_radfs_from_fwhm_nm(403.0, 1.0))
    filt = FilterSpec(
        omega_p / 2.0, sigma_radfs_from_fwhm_nm(filter_center_nm, filter_fwhm_nm)
    )
    pm = calibrate_phase_matching(pump, filt, dip_fwhm_fs, dip_visibility)
    sample = SampleSpec(eta=eta, omega_H=omega_p + sample_detuning, delta_omega_H=sample_width)
    return BiphotonModel(pump, pm, filt, sample)


@dataclass(frozen=True)
class BatteryResult:
    label: str
    eta: float
    sample_width: float
    sample_detuning: float
    max_deviation: float


def build_battery() -> list[tuple[str, BiphotonModel]]:
    """Deterministic model family for the cross-check (>= 20 entries)."""
    base = reference_model()
    dwl = derive_params(base).delta_omega_lambda
    models: list[tuple[str, BiphotonModel]] = []

    widths = [0.1 * dwl, 0.3 * dwl, 1.0 * dwl, 3.0 * dwl]
    etas = [0.0, 0.1, 0.25, 0.5]
    for i, eta in enumerate(etas):
        for j, width in enumerate(widths):
            det_sigma = np.hypot(base.pump.delta_omega_p, width)
            detuning = [0.0, 1.5, 3.0][(i + j) % 3] * det_sigma
            models.append((
                f"eta={eta:.2f} width={width:.4f} det={detuning:.4f}",
                reference_model(eta=eta, sample_width=width, sample_detuning=detuning),
            ))
    # filter-detuned variants
    for eta in (0.2, 0.5):
        m = reference_model(eta=eta, sample_width=0.5 * dwl)
        filt = replace(m.filter, omega_F=m.filter.omega_F + 0.5 * m.filter.delta_omega_F)
        models.append((f"filter-detuned eta={eta}", BiphotonModel(m.pump, m.pm, filt, m.sample)))
    # symmetric phase matching (perfect reference dip)
    sym = reference_model(eta=0.3, sample_width=0.5 * dwl)
    pm = replace(sym.pm, tau_i=sym.pm.tau_s)
    models.append(("symmetric tau", BiphotonModel(sym.pump, pm, sym.filter, sym.sample)))
    # narrowband filter configuration
    models.append((
        "10nm filter",
        reference_model(eta=0.2, filter_fwhm_nm=10.0, filter_center_nm=810.0,
                        dip_fwhm_fs=181.0, dip_visibility=0.94, sample_width=0.3 * dwl),
    ))
    return models


def run_battery(n: int = 1024, delay_max: float = 500.0, n_delays: int = 101):
    """Evaluate every battery model both ways; returns per-model results."""
    delays = np.linspace(-delay_max, delay_max, n_delays)
    results = []
    for label, model in build_battery():
        grid = default_grid(model, n=n)
        numeric = hom_integral(model, grid, delays)
        analytic = closed_form_rates(derive_params(model, mode="reduction"), delays)
        dev = float(np.max(np.abs(numeric.rates - analytic)))
        results.append(
            BatteryResult(
                label=label,
                eta=model.sample.eta,
                sample_width=model.sample.delta_omega_H,
                sample_detuning=model.sample.omega_H - model.pump.omega_p,
                max_deviation=dev,
            )
        )
    return results
