"""Synthetic coincidence data: interferograms and power sweeps with Poisson
counting noise, a constant accidental background, and injected linear losses.

Ground truth rides along in the outputs so roundtrip tests can compare
against it.  Draws use one counter-based generator stream per delay point
(Philox keyed by seed and point index), so parallel generation would produce
the same bytes as sequential.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .closed_form import ClosedFormParams, closed_form_rates, derive_params
from .interferogram import Interferogram
from .spectral import BiphotonModel
from .transmittance import PowerSweep


@dataclass(frozen=True)
class NoiseSpec:
    """Counting-noise model: bin duration, peak rate, accidentals, seed."""

    bin_seconds: float = 4.0
    peak_rate: float = 10_000.0
    background_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.bin_seconds <= 0:
            raise ValueError("bin_seconds must be positive")
        if self.peak_rate < 0 or self.background_rate < 0:
            raise ValueError("rates must be non-negative")


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to synthesize one dataset from the forward model."""

    model: BiphotonModel
    noise: NoiseSpec
    delays: np.ndarray | None = None
    powers: np.ndarray | None = None
    linear_loss_sample: float = 0.0
    closed_form_mode: str = "substitution"

    def __post_init__(self):
        if self.delays is not None:
            object.__setattr__(self, "delays", np.asarray(self.delays, dtype=float))
        if self.powers is not None:
            object.__setattr__(self, "powers", np.asarray(self.powers, dtype=float))
        if not 0.0 <= self.linear_loss_sample < 1.0:
            raise ValueError("linear_loss_sample must lie in [0, 1)")

    def params(self) -> ClosedFormParams:
        return derive_params(self.model, mode=self.closed_form_mode)


def _poisson_per_point(expected: np.ndarray, seed: int) -> np.ndarray:
    """One Poisson draw per point from an independent keyed Philox stream."""
    counts = np.empty(len(expected), dtype=float)
    for i, lam in enumerate(expected):
        key = np.array([np.uint64(seed), np.uint64(i)], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        counts[i] = rng.poisson(lam)
    return counts


def synth_interferogram(sc: ScenarioSpec) -> Interferogram:
    """Raw-count interferogram drawn from the forward model.

    Expected counts per bin are
    bin_seconds * [background + peak_rate * R(dt) * (1 - loss)].
    """
    if sc.delays is None:
        raise ValueError("scenario has no delay grid")
    params = sc.params()
    rc = closed_form_rates(params, sc.delays)
    expected = sc.noise.bin_seconds * (
        sc.noise.background_rate
        + sc.noise.peak_rate * rc * (1.0 - sc.linear_loss_sample)
    )
    counts = _poisson_per_point(expected, sc.noise.seed)
    return Interferogram(
        delays=sc.delays,
        rates=counts / sc.noise.bin_seconds,
        normalized=False,
        source="synthetic",
        counts=counts,
        bin_seconds=sc.noise.bin_seconds,
        extra={
            "truth": {
                "params": params.to_dict(),
                "eta": sc.model.sample.eta,
                "linear_loss_sample": sc.linear_loss_sample,
                "noise": {
                    "bin_seconds": sc.noise.bin_seconds,
                    "peak_rate": sc.noise.peak_rate,
                    "background_rate": sc.noise.background_rate,
                    "seed": sc.noise.seed,
                },
            }
        },
    )


def solve_eta_for_slope(params_sol: ClosedFormParams, m_target: float) -> float:
    """Sample efficiency whose zero-delay rate sits a fraction m_target above
    the solvent's (the through-origin sweep slope the pipeline should recover)."""
    r_sol0 = float(closed_form_rates(params_sol, [0.0])[0])

    def excess(eta):
        r = float(closed_form_rates(params_sol.with_eta(eta), [0.0])[0])
        return (r - r_sol0) / r_sol0 - m_target

    hi = 1.0
    if excess(hi) < 0:
        raise ValueError(f"target slope {m_target} unreachable with eta <= 1")
    return brentq(excess, params_sol.eta, hi, xtol=1e-15)


def synth_power_sweep(
    sc: ScenarioSpec,
    eta_pair: tuple[float, float],
    loss: float,
    noisy: bool = False,
) -> PowerSweep:
    """Power sweep of solvent and sample coincidence rates at delays 0 and 167 fs.

    Pair rates are linear in pump power.  The injected linear loss removes the
    same absolute rate from both sample delay channels (a delay-independent
    loss proportional to flux), sized as `loss` times the solvent long-delay
    rate, which is exactly what the offset correction removes.
    """
    if sc.powers is None:
        raise ValueError("scenario has no power grid")
    eta_sol, eta_sam = eta_pair
    params = sc.params()
    p_sol = params.with_eta(eta_sol)
    p_sam = params.with_eta(eta_sam)
    rc = {
        ("sol", dt): float(closed_form_rates(p_sol, [dt])[0]) for dt in (0.0, 167.0)
    } | {
        ("sam", dt): float(closed_form_rates(p_sam, [dt])[0]) for dt in (0.0, 167.0)
    }

    rate_per_mw = sc.noise.peak_rate / float(np.max(sc.powers))
    base = rate_per_mw * sc.powers
    loss_rate = loss * base * rc[("sol", 167.0)]
    cols = {
        "r_sol_0": base * rc[("sol", 0.0)],
        "r_sam_0": base * rc[("sam", 0.0)] - loss_rate,
        "r_sol_167": base * rc[("sol", 167.0)],
        "r_sam_167": base * rc[("sam", 167.0)] - loss_rate,
    }
    if noisy:
        flat = np.concatenate([cols[k] for k in sorted(cols)]) * sc.noise.bin_seconds
        counts = _poisson_per_point(flat, sc.noise.seed)
        n = len(sc.powers)
        for j, k in enumerate(sorted(cols)):
            cols[k] = counts[j * n:(j + 1) * n] / sc.noise.bin_seconds
    return PowerSweep(powers=sc.powers, **cols)
