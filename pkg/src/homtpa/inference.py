"""Inverse problems: fit the closed-form dip to interferograms.

The fits are damped least squares (scipy's trust-region reflective solver)
over a deterministic multi-start set, with Poisson weights whenever raw
counts are available and linearized covariance for the confidence intervals.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import least_squares

from .closed_form import (
    ClosedFormParams,
    closed_form_rates,
    detuning_overlap,
    joint_bandwidth,
    predicted_visibility,
    closed_form_dip_fwhm,
)
from .errors import IdentifiabilityWarning, MonotonicityWarning, NotConvergedError
from .interferogram import Interferogram, dip_metrics
from .units import width_from_dip_fwhm_fs

FREE_PARAMETERS = ("eta", "kappa", "delta_omega_lambda", "delta_omega_J")
ETA_STARTS = (0.01, 0.1, 0.5)


@dataclass(frozen=True)
class FitReport:
    """Result of a closed-form dip fit."""

    params: ClosedFormParams
    free_names: tuple[str, ...]
    residual_rms: float
    ci95: dict
    n_points: int
    converged: bool

    def summary(self) -> dict:
        return {
            "free": list(self.free_names),
            "residual_rms": self.residual_rms,
            "ci95": self.ci95,
            "n_points": self.n_points,
            "converged": self.converged,
            "params": self.params.to_dict(),
            "visibility": predicted_visibility(self.params),
            "dip_fwhm_fs": closed_form_dip_fwhm(self.params),
        }


def _rebuild(base: ClosedFormParams, values: dict) -> ClosedFormParams:
    """Parameter set with some of (eta, kappa, delta_omega_lambda, delta_omega_J)
    replaced, keeping the overlap identity coherent.

    When the reference width moves and the absorber width is known, the joint
    bandwidth and detuning overlap are recomputed from it; an explicitly freed
    delta_omega_J overrides that coupling.
    """
    kappa = values.get("kappa", base.kappa)
    dwl = values.get("delta_omega_lambda", base.delta_omega_lambda)
    eta = values.get("eta", base.eta)
    j0 = base.j0
    if "delta_omega_J" in values:
        dwj = min(values["delta_omega_J"], dwl)
    elif base.delta_omega_H is not None and base.mode == "substitution":
        dwj = joint_bandwidth(dwl, base.delta_omega_H)
        j0 = detuning_overlap(base.detuning or 0.0, dwl, base.delta_omega_H)
    else:
        dwj = min(base.delta_omega_J, dwl)
    eta_prime = j0 * dwj / (base.j_lambda * dwl) * eta
    return replace(
        base,
        kappa=kappa,
        delta_omega_lambda=dwl,
        delta_omega_J=dwj,
        eta=eta,
        j0=j0,
        eta_prime=eta_prime,
    )


def _weights(ig: Interferogram) -> np.ndarray:
    """Inverse standard deviation of each normalized rate.

    With raw counts available the variance is Poisson; otherwise weights are
    uniform.
    """
    if ig.counts is None:
        return np.ones_like(ig.rates)
    total = float(ig.counts.sum())
    if total <= 0:
        return np.ones_like(ig.rates)
    conv = float(ig.rates.sum()) / total  # rate units per count, global
    sigma = np.sqrt(np.maximum(ig.counts, 1.0)) * conv
    return 1.0 / np.maximum(sigma, 1e-12)


def fit_eta(
    ig: Interferogram,
    fixed: ClosedFormParams,
    free: tuple[str, ...] = ("eta",),
) -> FitReport:
    """Weighted least-squares fit of the closed-form dip to an interferogram.

    `fixed` supplies every parameter not in `free`; free names must come from
    eta, kappa, delta_omega_lambda, delta_omega_J.  The eta dimension runs a
    deterministic multi-start; the best residual wins, ties resolved toward
    smaller eta.
    """
    if not ig.normalized:
        raise ValueError("fit requires a normalized interferogram")
    bad = set(free) - set(FREE_PARAMETERS)
    if bad:
        raise ValueError(f"cannot free {sorted(bad)}; allowed: {FREE_PARAMETERS}")
    free = tuple(free)
    w = _weights(ig)
    # data normalized by its long-delay window mean rides a convention the
    # model must share, or the absorption shoulder biases every fitted depth
    tail = ig.long_delay_mask() if ig.extra.get("normalization") == "long-delay-mean" else None

    lo, hi, start0 = [], [], []
    for name in free:
        if name == "eta":
            lo.append(0.0), hi.append(1.0), start0.append(0.1)
        elif name == "kappa":
            lo.append(1e-6), hi.append(1.0), start0.append(min(max(fixed.kappa, 0.05), 0.99))
        elif name == "delta_omega_lambda":
            lo.append(1e-6), hi.append(10.0), start0.append(fixed.delta_omega_lambda)
        elif name == "delta_omega_J":
            lo.append(1e-8), hi.append(fixed.delta_omega_lambda), start0.append(fixed.delta_omega_J)

    def model_rates(theta):
        params = _rebuild(fixed, dict(zip(free, theta)))
        r = closed_form_rates(params, ig.delays)
        if tail is not None:
            r = r / r[tail].mean()
        return r

    def residuals(theta):
        return (model_rates(theta) - ig.rates) * w

    starts = []
    if "eta" in free:
        k = free.index("eta")
        for e in ETA_STARTS:
            s = list(start0)
            s[k] = e
            starts.append(s)
    else:
        starts.append(start0)

    best = None
    for s in starts:
        try:
            res = least_squares(
                residuals, s, bounds=(lo, hi), method="trf",
                xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=2000,
            )
        except Exception:
            continue
        if res.status <= 0:
            continue
        if best is None or res.cost < best.cost * (1 - 1e-12):
            best = res
        elif abs(res.cost - best.cost) <= 1e-12 * max(best.cost, 1e-300) and "eta" in free:
            k = free.index("eta")
            if res.x[k] < best.x[k]:
                best = res
    if best is None:
        raise NotConvergedError(f"dip fit failed to converge for free={free}")

    params = _rebuild(fixed, dict(zip(free, best.x)))
    n, k = len(ig), len(free)
    resid_unweighted = model_rates(best.x) - ig.rates
    rms = float(np.sqrt(np.mean(resid_unweighted**2)))

    jac = best.jac
    if np.linalg.cond(jac) > 1e8:
        warnings.warn(
            f"fit Jacobian condition number {np.linalg.cond(jac):.2e} exceeds 1e8; "
            f"parameters {free} are nearly degenerate on this curve",
            IdentifiabilityWarning,
            stacklevel=2,
        )
    dof = max(n - k, 1)
    s2 = 2.0 * best.cost / dof
    try:
        cov = np.linalg.inv(jac.T @ jac) * s2
        ci = {name: float(1.96 * math.sqrt(max(cov[i, i], 0.0))) for i, name in enumerate(free)}
    except np.linalg.LinAlgError:
        ci = {name: float("inf") for name in free}

    return FitReport(
        params=params,
        free_names=free,
        residual_rms=rms,
        ci95=ci,
        n_points=n,
        converged=True,
    )


def calibrate_reference(
    ig_ref: Interferogram,
    template: ClosedFormParams | None = None,
) -> FitReport:
    """Fit the reference (no-absorber) dip: eta pinned to zero, depth and
    width free.  The fitted pair becomes the frozen baseline for sample fits.
    """
    metrics = dip_metrics(ig_ref)  # propagates NoDip / EdgeDip
    kappa0 = 2.0 * metrics.visibility / (1.0 + metrics.visibility)
    dwl0 = width_from_dip_fwhm_fs(metrics.fwhm)
    if template is None:
        template = ClosedFormParams(
            kappa=kappa0,
            omega_lambda=0.0,
            delta_omega_lambda=dwl0,
            delta_omega_J=dwl0,
            j0=1.0,
            j_lambda=1.0,
            eta_prime=0.0,
            eta=0.0,
            mode="substitution",
            kappa_source="fitted",
        )
    base = replace(
        _rebuild(template, {"kappa": kappa0, "delta_omega_lambda": dwl0, "eta": 0.0}),
        kappa_source="fitted",
    )
    report = fit_eta(ig_ref, base, free=("kappa", "delta_omega_lambda"))
    return replace(report, params=replace(report.params, kappa_source="fitted"))


@dataclass(frozen=True)
class SeriesEntry:
    """One concentration point of a dilution series."""

    label: str
    concentration_molar: float
    interferogram: Interferogram


@dataclass(frozen=True)
class SeriesResult:
    label: str
    concentration_molar: float
    fit: FitReport | None
    error: str | None = None


@dataclass(frozen=True)
class ConcentrationSeries:
    """Per-concentration fits sharing the solvent-calibrated baseline."""

    results: tuple[SeriesResult, ...]
    baseline: FitReport

    def table(self) -> list[dict]:
        rows = []
        for r in self.results:
            if r.fit is None:
                rows.append({"label": r.label, "concentration_molar": r.concentration_molar,
                             "error": r.error})
                continue
            rows.append({
                "label": r.label,
                "concentration_molar": r.concentration_molar,
                "eta": r.fit.params.eta,
                "eta_ci95": r.fit.ci95.get("eta", float("nan")),
                "visibility": predicted_visibility(r.fit.params),
                "fwhm_fs": closed_form_dip_fwhm(r.fit.params),
                "residual_rms": r.fit.residual_rms,
            })
        return rows


def run_series(entries: list[SeriesEntry], template: ClosedFormParams) -> ConcentrationSeries:
    """Fit a dilution series with a shared apparatus baseline.

    The entry at zero concentration is the solvent; its fit frees the dip
    depth, reference width and a (weak) solvent efficiency.  Every other
    entry then fits eta alone against the frozen baseline.  Individual
    failures are recorded and do not stop the series.
    """
    entries = sorted(entries, key=lambda e: e.concentration_molar)
    if not entries:
        raise ValueError("series needs at least one entry")
    solvent = entries[0]
    if solvent.concentration_molar > 0:
        warnings.warn(
            f"no zero-concentration entry; using {solvent.label!r} as the solvent baseline",
            MonotonicityWarning,
            stacklevel=2,
        )
    baseline = fit_eta(
        solvent.interferogram, template, free=("kappa", "delta_omega_lambda", "eta")
    )
    fixed = baseline.params

    results = [SeriesResult(solvent.label, solvent.concentration_molar, baseline)]
    for entry in entries[1:]:
        try:
            fit = fit_eta(entry.interferogram, fixed, free=("eta",))
            results.append(SeriesResult(entry.label, entry.concentration_molar, fit))
        except Exception as exc:  # aggregate per-entry failures
            results.append(
                SeriesResult(entry.label, entry.concentration_molar, None, error=str(exc))
            )

    etas = [r.fit.params.eta for r in results if r.fit is not None]
    if len(etas) > 1 and any(b < a - 1e-12 for a, b in zip(etas, etas[1:])):
        warnings.warn(
            "fitted eta is not monotone in concentration; check the data",
            MonotonicityWarning,
            stacklevel=2,
        )
    return ConcentrationSeries(results=tuple(results), baseline=baseline)
