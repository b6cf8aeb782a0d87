"""Biphoton spectral model: parameter types and the component spectral functions.

The joint spectral amplitude of the filtered, sample-transmitted photon pair
factorizes into a pump envelope, a Gaussian-approximated phase-matching
function, one bandpass-filter amplitude per photon, and the sample transfer
amplitude.  All functions here are pure and vectorize over frequency arrays.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarseWarning

MIN_SAMPLE_WIDTH = 1e-6
"""Smallest accepted transition width (rad/fs); narrower notches alias any
practical frequency grid."""


@dataclass(frozen=True)
class PumpSpec:
    """CW pump spectrum: Gaussian with center omega_p and sigma delta_omega_p (rad/fs)."""

    omega_p: float
    delta_omega_p: float

    def __post_init__(self):
        if self.omega_p <= 0:
            raise ValueError(f"omega_p must be positive, got {self.omega_p}")
        if self.delta_omega_p <= 0:
            raise ValueError(f"delta_omega_p must be positive, got {self.delta_omega_p}")


@dataclass(frozen=True)
class PhaseMatchSpec:
    """Gaussian-approximated phase matching for a Type-II crystal.

    tau_s and tau_i (fs) are the group-delay mismatches of signal and idler
    against the pump over the crystal length; they are direct configuration
    inputs here.  gamma is the sinc-to-Gaussian width-matching constant.
    The quadratic-form coefficients are derived: P = gamma*tau_s^2/4,
    Q = gamma*tau_i^2/4, R = gamma*tau_s*tau_i/4, so R^2 = P*Q by
    construction.
    """

    tau_s: float
    tau_i: float
    gamma: float = 0.19

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def P(self) -> float:
        return self.gamma * self.tau_s**2 / 4.0

    @property
    def Q(self) -> float:
        return self.gamma * self.tau_i**2 / 4.0

    @property
    def R(self) -> float:
        return self.gamma * self.tau_s * self.tau_i / 4.0

    @property
    def is_asymmetric(self) -> bool:
        return self.tau_s != self.tau_i


@dataclass(frozen=True)
class FilterSpec:
    """Bandpass filter: Gaussian intensity profile, sigma width (rad/fs)."""

    omega_F: float
    delta_omega_F: float

    def __post_init__(self):
        if self.omega_F <= 0:
            raise ValueError(f"omega_F must be positive, got {self.omega_F}")
        if self.delta_omega_F <= 0:
            raise ValueError(f"delta_omega_F must be positive, got {self.delta_omega_F}")


@dataclass(frozen=True)
class SampleSpec:
    """Two-photon absorber acting as a Gaussian notch on the frequency sum.

    eta is the absorption efficiency at exact two-photon resonance, omega_H
    the transition sum-frequency (rad/fs) and delta_omega_H its sigma width
    (rad/fs) on the sum-frequency axis.
    """

    eta: float
    omega_H: float
    delta_omega_H: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.delta_omega_H < MIN_SAMPLE_WIDTH:
            raise ValueError(
                f"delta_omega_H must be >= {MIN_SAMPLE_WIDTH} rad/fs, got {self.delta_omega_H}"
            )


@dataclass(frozen=True)
class BiphotonModel:
    """Complete parameter record for the filtered biphoton interacting with a sample.

    omega_0 (degenerate center, = omega_p/2) and delta_omega_0 (intrinsic
    single-photon marginal bandwidth of the unfiltered pair) are derived at
    construction.  delta_omega_0 is infinite for symmetric phase matching
    under a narrow pump, where the anti-diagonal of the joint spectrum is
    unconstrained.
    """

    pump: PumpSpec
    pm: PhaseMatchSpec
    filter: FilterSpec
    sample: SampleSpec
    omega_0: float = field(init=False)
    delta_omega_0: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "omega_0", self.pump.omega_p / 2.0)
        object.__setattr__(self, "delta_omega_0", self._intrinsic_marginal_sigma())

    def _intrinsic_marginal_sigma(self) -> float:
        # Marginal width of |pump envelope * phase matching|^2 with no filter
        # and no sample: geometric mean of the signal and idler marginals.
        a = 1.0 / self.pump.delta_omega_p**2
        gs = self.pm.gamma * self.pm.tau_s**2 / 2.0
        gi = self.pm.gamma * self.pm.tau_i**2 / 2.0
        gsi = self.pm.gamma * self.pm.tau_s * self.pm.tau_i / 2.0
        a_ss, a_ii, a_si = a + gs, a + gi, a + gsi
        det = a_ss * a_ii - a_si**2
        if det <= 0 or not math.isfinite(det):
            return math.inf
        prec_s = det / a_ii
        prec_i = det / a_ss
        sigma_s = 1.0 / math.sqrt(2.0 * prec_s)
        sigma_i = 1.0 / math.sqrt(2.0 * prec_i)
        return math.sqrt(sigma_s * sigma_i)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform square grid over the (omega_s, omega_i) plane."""

    center_s: float
    center_i: float
    half_span: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"grid needs n >= 16, got {self.n}")
        if self.half_span <= 0:
            raise ValueError(f"half_span must be positive, got {self.half_span}")

    def omega_s(self) -> np.ndarray:
        return np.linspace(self.center_s - self.half_span, self.center_s + self.half_span, self.n)

    def omega_i(self) -> np.ndarray:
        return np.linspace(self.center_i - self.half_span, self.center_i + self.half_span, self.n)

    def trapezoid_weights(self) -> np.ndarray:
        h = 2.0 * self.half_span / (self.n - 1)
        w = np.full(self.n, h)
        w[0] = w[-1] = h / 2.0
        return w

    @property
    def step(self) -> float:
        return 2.0 * self.half_span / (self.n - 1)


def default_grid(model: BiphotonModel, n: int = 1024, n_sigmas: float = 5.0) -> FrequencyGrid:
    """Grid centered on the degenerate frequency, spanning the filtered envelope.

    The filter sets the single-photon envelope scale (the filtered marginal is
    never wider than the filter), so n_sigmas filter widths keep the
    truncation error far below quadrature tolerances.
    """
    return FrequencyGrid(model.omega_0, model.omega_0, n_sigmas * model.filter.delta_omega_F, n)


def pump_envelope(model: BiphotonModel, omega_s, omega_i):
    """Pump envelope amplitude exp(-(omega_s+omega_i-omega_p)^2 / (2 dwp^2)).

    Depends on its arguments only through the frequency sum; equals 1 exactly
    on the energy-conservation diagonal.
    """
    d = np.asarray(omega_s) + np.asarray(omega_i) - model.pump.omega_p
    return np.exp(-(d**2) / (2.0 * model.pump.delta_omega_p**2))


def phase_matching(model: BiphotonModel, nu_s, nu_i):
    """Phase-matching amplitude exp(-(P nu_s^2 + Q nu_i^2 + 2 R nu_s nu_i)).

    nu_s, nu_i are detunings from the degenerate center omega_0.  Evaluated
    through the algebraically identical square form
    exp(-gamma (tau_s nu_s + tau_i nu_i)^2 / 4), whose floating-point rounding
    is exchange-symmetric when tau_s == tau_i (the expanded polynomial is not,
    to the last ulp).
    """
    pm = model.pm
    t = pm.tau_s * np.asarray(nu_s) + pm.tau_i * np.asarray(nu_i)
    return np.exp(-pm.gamma * t**2 / 4.0)


def phase_matching_expanded(model: BiphotonModel, nu_s, nu_i):
    """Expanded quadratic form of the same function, for consistency checks."""
    pm = model.pm
    nu_s = np.asarray(nu_s)
    nu_i = np.asarray(nu_i)
    return np.exp(-(pm.P * nu_s**2 + pm.Q * nu_i**2 + 2.0 * pm.R * nu_s * nu_i))


def filter_intensity(spec: FilterSpec, omega):
    """Filter intensity transmission exp(-(omega-omega_F)^2 / (2 dwF^2))."""
    d = np.asarray(omega) - spec.omega_F
    return np.exp(-(d**2) / (2.0 * spec.delta_omega_F**2))


def filter_amplitude(spec: FilterSpec, omega):
    """Filter amplitude, the square root of the intensity profile."""
    d = np.asarray(omega) - spec.omega_F
    return np.exp(-(d**2) / (4.0 * spec.delta_omega_F**2))


def sample_transfer(spec: SampleSpec, omega_s, omega_i):
    """Sample intensity transmission: 1 - eta * Gaussian notch on the frequency sum."""
    d = np.asarray(omega_s) + np.asarray(omega_i) - spec.omega_H
    return 1.0 - spec.eta * np.exp(-(d**2) / (2.0 * spec.delta_omega_H**2))


def sample_amplitude(spec: SampleSpec, omega_s, omega_i):
    """Sample amplitude, the square root of the intensity transmission."""
    return np.sqrt(sample_transfer(spec, omega_s, omega_i))


def jsa(model: BiphotonModel, grid: FrequencyGrid) -> np.ndarray:
    """Joint spectral amplitude on the grid (signal rows, idler columns)."""
    ws = grid.omega_s()[:, None]
    wi = grid.omega_i()[None, :]
    # the two filter factors are combined first so that rounding stays
    # exchange-symmetric on a symmetric grid
    ff = np.multiply.outer(
        filter_amplitude(model.filter, grid.omega_s()),
        filter_amplitude(model.filter, grid.omega_i()),
    )
    return (
        pump_envelope(model, ws, wi)
        * phase_matching(model, ws - model.omega_0, wi - model.omega_0)
        * ff
        * sample_amplitude(model.sample, ws, wi)
    )


def jsi(model: BiphotonModel, grid: FrequencyGrid) -> np.ndarray:
    """Joint spectral intensity |JSA|^2 on the grid; entries lie in [0, 1]."""
    if grid.n < 64:
        warnings.warn(
            f"grid n={grid.n} is below the recommended floor of 64 points per axis",
            GridTooCoarseWarning,
            stacklevel=2,
        )
    ws = grid.omega_s()[:, None]
    wi = grid.omega_i()[None, :]
    ff = np.multiply.outer(
        filter_intensity(model.filter, grid.omega_s()),
        filter_intensity(model.filter, grid.omega_i()),
    )
    return (
        pump_envelope(model, ws, wi) ** 2
        * phase_matching(model, ws - model.omega_0, wi - model.omega_0) ** 2
        * ff
        * sample_transfer(model.sample, ws, wi)
    )


def jsi_integral(model: BiphotonModel, grid: FrequencyGrid) -> float:
    """Trapezoid integral of the JSI over the grid (rad^2/fs^2)."""
    w = grid.trapezoid_weights()
    return float(w @ jsi(model, grid) @ w)
