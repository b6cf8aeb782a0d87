"""Figure rendering for the CLI report paths.

Every plotting helper takes data plus an output path and writes a PNG next to
the delimited output it illustrates.  Rendering is headless (Agg).
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _new_axes(xlabel, ylabel, title=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_interferograms(curves, path, title=None):
    """curves: iterable of (label, delays, rates)."""
    fig, ax = _new_axes("delay (fs)", "normalized coincidence rate", title)
    for label, delays, rates in curves:
        ax.plot(delays, rates, lw=1.2, label=label)
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_fit(ig, fitted_rates, path, title=None):
    fig, ax = _new_axes("delay (fs)", "normalized coincidence rate", title)
    ax.plot(ig.delays, ig.rates, ".", ms=3, alpha=0.6, label="data")
    ax.plot(ig.delays, fitted_rates, "-", lw=1.5, label="fit")
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_signal(delays, quotient, fitted, path, title=None):
    fig, ax = _new_axes("delay (fs)", "(R_sol - R_sam) / R_sol", title)
    ax.plot(delays, quotient, ".", ms=3, alpha=0.6, label="quotient")
    ax.plot(delays, fitted, "-", lw=1.5, label="gaussian fit")
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_series(rows, path, title=None):
    """Fitted efficiency against concentration (solvent entry drawn at the
    lowest decade edge)."""
    fig, ax = _new_axes("concentration (mol/L)", "fitted eta", title)
    conc = np.array([r["concentration_molar"] for r in rows if "eta" in r])
    eta = np.array([r["eta"] for r in rows if "eta" in r])
    err = np.array([r.get("eta_ci95", np.nan) for r in rows if "eta" in r])
    floor = conc[conc > 0].min() / 10.0 if np.any(conc > 0) else 1e-9
    ax.errorbar(np.where(conc > 0, conc, floor), eta, yerr=err, fmt="o", capsize=3)
    ax.set_xscale("log")
    _finish(fig, path)


def plot_sweep(sweep, path, title=None, slopes=None):
    fig, axes = plt.subplots(1, 2, figsize=(9.5, 4.0), dpi=150)
    ax = axes[0]
    ax.plot(sweep.powers, sweep.r_sol_0, "o-", ms=3, label="solvent, 0 fs")
    ax.plot(sweep.powers, sweep.r_sam_0, "s-", ms=3, label="sample, 0 fs")
    ax.plot(sweep.powers, sweep.r_sol_167, "^-", ms=3, label="solvent, 167 fs")
    ax.plot(sweep.powers, sweep.r_sam_167, "v-", ms=3, label="sample, 167 fs")
    ax.set_xlabel("pump power (mW)")
    ax.set_ylabel("coincidence rate (1/s)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)

    ax = axes[1]
    for channel, sol, sam in (("0 fs", sweep.r_sol_0, sweep.r_sam_0),
                              ("167 fs", sweep.r_sol_167, sweep.r_sam_167)):
        r_tpa = np.abs(sol - sam)
        ax.plot(sol, r_tpa, "o", ms=3, label=f"R_TPA at {channel}")
        if slopes and channel in slopes:
            xs = np.linspace(0, sol.max(), 50)
            ax.plot(xs, slopes[channel] * xs, "--", lw=1)
    ax.set_xlabel("R_sol (1/s)")
    ax.set_ylabel("R_TPA (1/s)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    if title:
        fig.suptitle(title)
    _finish(fig, path)


def plot_validation(results, path):
    fig, ax = _new_axes("battery model", "max |quadrature - closed form|")
    dev = [r.max_deviation for r in results]
    ax.semilogy(range(len(dev)), dev, "o")
    ax.axhline(1e-3, color="r", ls="--", lw=1, label="tolerance")
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_jsi(matrix, omega_s, omega_i, path, title=None):
    fig, ax = _new_axes("omega_i (rad/fs)", "omega_s (rad/fs)", title)
    im = ax.contourf(omega_i, omega_s, matrix, levels=40)
    fig.colorbar(im, ax=ax, label="joint spectral intensity")
    _finish(fig, path)
