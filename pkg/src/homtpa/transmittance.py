"""Pump-power sweep reduction: linear-loss offset correction, absorption-rate
slope, and the absorption cross-section.

The sample-vs-solvent coincidence difference at long delay is delay-
independent linear loss (absorption, scattering, Fresnel); it is removed per
power point as an additive offset before the delay-zero difference is
interpreted as two-photon absorption.  The slope of that difference against
the solvent rate, through the origin, converts to a cross-section via the
interaction geometry.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import Avogadro
from scipy.stats import t as student_t

from .errors import InsufficientPointsError, NegativeOffsetWarning


@dataclass(frozen=True)
class PowerSweep:
    """Coincidence rates (counts/s) versus pump power at two fixed delays."""

    powers: np.ndarray
    r_sol_0: np.ndarray
    r_sam_0: np.ndarray
    r_sol_167: np.ndarray
    r_sam_167: np.ndarray

    def __post_init__(self):
        for name in ("powers", "r_sol_0", "r_sam_0", "r_sol_167", "r_sam_167"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.powers)
        if any(len(getattr(self, k)) != n
               for k in ("r_sol_0", "r_sam_0", "r_sol_167", "r_sam_167")):
            raise ValueError("all sweep columns must share one length")
        if not np.all(np.diff(self.powers) > 0):
            raise ValueError("powers must be strictly increasing")
        if any(np.any(getattr(self, k) < 0)
               for k in ("r_sol_0", "r_sam_0", "r_sol_167", "r_sam_167")):
            raise ValueError("rates must be non-negative")

    def __len__(self):
        return len(self.powers)


def loss_correct(sweep: PowerSweep, mode: str = "per-point") -> PowerSweep:
    """Remove delay-independent linear losses from the sample channels.

    The long-delay difference r_sol_167 - r_sam_167 is pure linear loss; it
    is added back to both sample channels, per power point by default (losses
    scale with flux) or as one global mean offset.  Idempotent: a corrected
    sweep has zero long-delay difference, so a second pass is the identity.
    """
    offset = sweep.r_sol_167 - sweep.r_sam_167
    if np.any(offset < -1e-9 * np.maximum(sweep.r_sol_167, 1.0)):
        warnings.warn(
            "sample exceeds solvent at the long delay; offset correction will "
            "subtract counts (suspect data)",
            NegativeOffsetWarning,
            stacklevel=2,
        )
    if mode == "global-mean":
        offset = np.full_like(offset, offset.mean())
    elif mode != "per-point":
        raise ValueError(f"unknown mode {mode!r}; expected 'per-point' or 'global-mean'")
    return replace(
        sweep,
        r_sam_0=sweep.r_sam_0 + offset,
        r_sam_167=sweep.r_sam_167 + offset,
    )


@dataclass(frozen=True)
class SlopeFit:
    """Through-origin regression of the absorption rate on the solvent rate."""

    m: float
    ci95_percent: float
    n_points: int
    delay_channel: str
    intercept_diagnostic: float
    sample_above_solvent_fraction: float


def fit_slope(sweep: PowerSweep, delay_channel: str) -> SlopeFit:
    """Slope of R_TPA = |R_sol - R_sam| against R_sol, through the origin.

    The regression has no intercept term (the cross-section formula has
    none); the intercept of a secondary affine fit is reported as a
    diagnostic, as is the fraction of points where the sample exceeds the
    solvent (expected at zero delay after loss correction, where absorption
    shows up as reduced dip visibility and therefore extra coincidences).
    """
    if delay_channel in ("0fs", "0"):
        r_sol, r_sam = sweep.r_sol_0, sweep.r_sam_0
    elif delay_channel in ("167fs", "167"):
        r_sol, r_sam = sweep.r_sol_167, sweep.r_sam_167
    else:
        raise ValueError(f"unknown delay channel {delay_channel!r}")
    n = len(sweep)
    if n < 5:
        raise InsufficientPointsError(f"slope fit needs >= 5 power points, got {n}")

    r_tpa = np.abs(r_sol - r_sam)
    sxx = float(r_sol @ r_sol)
    if sxx == 0:
        raise ValueError("solvent rates are all zero")
    m = float(r_sol @ r_tpa) / sxx
    resid = r_tpa - m * r_sol
    dof = n - 1
    var_m = float(resid @ resid) / dof / sxx
    half = student_t.ppf(0.975, dof) * np.sqrt(var_m)
    ci95_percent = 100.0 * half / m if m > 0 else float("inf")

    design = np.column_stack([r_sol, np.ones(n)])
    affine, *_ = np.linalg.lstsq(design, r_tpa, rcond=None)
    above = float(np.mean((r_sam - r_sol) > 0))
    return SlopeFit(
        m=m,
        ci95_percent=ci95_percent,
        n_points=n,
        delay_channel=delay_channel,
        intercept_diagnostic=float(affine[1]),
        sample_above_solvent_fraction=above,
    )


@dataclass(frozen=True)
class GeometrySpec:
    """Interaction geometry of the focused pair beam in the cuvette."""

    concentration_molar: float
    length_cm: float
    spot_diameter_um: float
    area_cm2: float = field(init=False)
    volume_cm3: float = field(init=False)

    def __post_init__(self):
        if min(self.concentration_molar, self.length_cm, self.spot_diameter_um) <= 0:
            raise ValueError("geometry values must be positive")
        radius_cm = self.spot_diameter_um * 1e-4 / 2.0
        object.__setattr__(self, "area_cm2", np.pi * radius_cm**2)
        object.__setattr__(self, "volume_cm3", self.area_cm2 * self.length_cm)

    @property
    def molecules_per_cm3(self) -> float:
        return self.concentration_molar * Avogadro / 1000.0


@dataclass(frozen=True)
class CrossSectionResult:
    """Cross-section (cm^2/molecule) implied by a sweep slope."""

    m: float
    sigma_e: float
    ci95_percent: float
    loss_corrected: bool


def cross_section(m: float, geom: GeometrySpec, ci95_percent: float = float("nan"),
                  loss_corrected: bool = True) -> CrossSectionResult:
    """Convert a through-origin slope into a cross-section.

    m = (number density) * V * sigma_e / A, and V = A * l, so
    sigma_e = m / (number density * l).  The slope's relative uncertainty
    carries through unchanged.
    """
    if m < 0:
        raise ValueError(f"slope must be non-negative, got {m}")
    sigma_e = m * geom.area_cm2 / (geom.molecules_per_cm3 * geom.volume_cm3)
    return CrossSectionResult(
        m=m, sigma_e=sigma_e, ci95_percent=ci95_percent, loss_corrected=loss_corrected
    )
