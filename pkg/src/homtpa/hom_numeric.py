"""Brute-force evaluation of the coincidence-dip integral by 2D quadrature.

For each delay the coincidence rate is the difference of two integrals over
the (omega_s, omega_i) plane: the total spectral content, and the
exchange-interference term carrying the delay phase exp(-i(omega_i-omega_s)dt).
Both are evaluated with iterated trapezoid sums on a uniform grid; the
normalization constant is fixed so the long-delay asymptote equals one.

The integrand factors are smooth Gaussians, so the trapezoid sum converges
essentially spectrally in the number of grid points; the binding constraint
is sampling the delay oscillation, guarded by the aliasing precondition.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import GridAliasingError, NonConvergentError
from .interferogram import Interferogram
from .spectral import (
    BiphotonModel,
    FrequencyGrid,
    filter_intensity,
    phase_matching,
    pump_envelope,
    sample_transfer,
)

IMAG_RESIDUE_LIMIT = 1e-10
"""Largest tolerated |imag|/|real| of the interference integral."""


def min_grid_points(half_span: float, max_abs_delay: float) -> int:
    """Smallest grid size that resolves the delay oscillation."""
    return max(256, math.ceil(8.0 * half_span * max_abs_delay / math.pi))


def _integrals(model: BiphotonModel, grid: FrequencyGrid, delays: np.ndarray):
    """Total content A and interference term B(dt) on the grid."""
    ws = grid.omega_s()
    wi = grid.omega_i()
    nu_s = (ws - model.omega_0)[:, None]
    nu_i = (wi - model.omega_0)[None, :]

    envelope = (
        pump_envelope(model, ws[:, None], wi[None, :]) ** 2
        * filter_intensity(model.filter, ws)[:, None]
        * filter_intensity(model.filter, wi)[None, :]
        * sample_transfer(model.sample, ws[:, None], wi[None, :])
    )
    phi = phase_matching(model, nu_s, nu_i)
    phi_swapped = phase_matching(model, nu_i, nu_s)

    w = grid.trapezoid_weights()
    A = float(w @ (envelope * phi**2) @ w)
    W = envelope * phi * phi_swapped

    # B(dt) = sum_{s,i} W[s,i] w_s w_i exp(i omega_s dt) exp(-i omega_i dt),
    # evaluated for all delays with two real matrix products per component.
    phase_s = np.exp(1j * np.outer(ws, delays)) * w[:, None]
    phase_i = np.exp(-1j * np.outer(wi, delays)) * w[:, None]
    wr = W @ phase_i.real
    wim = W @ phase_i.imag
    b_real = np.sum(phase_s.real * wr - phase_s.imag * wim, axis=0)
    b_imag = np.sum(phase_s.real * wim + phase_s.imag * wr, axis=0)
    return A, b_real, b_imag


def hom_integral(
    model: BiphotonModel,
    grid: FrequencyGrid,
    delays,
    check_convergence: bool = False,
) -> Interferogram:
    """Normalized coincidence rate versus delay by 2D trapezoid quadrature.

    Raises GridAliasingError when the grid cannot resolve the oscillation at
    the largest requested delay.  With check_convergence=True the evaluation
    is repeated at doubled grid resolution and NonConvergentError is raised
    if any rate moves by more than 1e-4.
    """
    delays = np.asarray(delays, dtype=float)
    required = min_grid_points(grid.half_span, float(np.max(np.abs(delays), initial=0.0)))
    if grid.n < required:
        raise GridAliasingError(
            f"grid n={grid.n} cannot resolve the delay oscillation; need n >= {required} "
            f"for half_span={grid.half_span:.4g} rad/fs and max |delay| "
            f"{np.max(np.abs(delays)):.4g} fs"
        )

    A, b_real, b_imag = _integrals(model, grid, delays)
    scale = max(abs(A), float(np.max(np.abs(b_real), initial=0.0)))
    residue = float(np.max(np.abs(b_imag), initial=0.0)) / scale
    if residue > IMAG_RESIDUE_LIMIT:
        raise NonConvergentError(
            f"imaginary residue {residue:.2e} of the interference integral exceeds "
            f"{IMAG_RESIDUE_LIMIT:.0e}; grid is inadequate or asymmetric"
        )
    rates = 1.0 - b_real / A

    if check_convergence:
        fine = FrequencyGrid(grid.center_s, grid.center_i, grid.half_span, 2 * grid.n)
        A2, b2, _ = _integrals(model, fine, delays)
        drift = float(np.max(np.abs((1.0 - b2 / A2) - rates)))
        if drift > 1e-4:
            raise NonConvergentError(
                f"rates move by {drift:.2e} when doubling the grid (limit 1e-4)"
            )

    return Interferogram(
        delays=delays,
        rates=np.clip(rates, 0.0, None),
        normalized=True,
        source="numeric",
        extra={"grid_n": grid.n, "half_span": grid.half_span},
    )
