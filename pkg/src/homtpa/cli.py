"""Command-line interface.

Every command reads one JSON config file (flags override config values),
writes delimited data plus a JSON record into the output directory, and
renders a matplotlib figure next to each delimited output unless --no-figures
is given.  Commands are idempotent: identical inputs and seeds produce
identical outputs.

Exit codes: 0 success; 2 configuration/input error; 3 numerical failure
(aliasing, non-convergence, diverged fit); 4 data-quality failure (no dip,
edge dip, grid mismatch, too few points); 1 unexpected error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .closed_form import (
    ClosedFormParams,
    closed_form_interferogram,
    closed_form_rates,
    derive_params,
    predicted_visibility,
)
from .dataio import (
    config_hash,
    delays_from_config,
    dump_json,
    geometry_from_config,
    load_json,
    model_from_config,
    read_interferogram_csv,
    read_sweep_csv,
    write_interferogram_csv,
    write_jsi_csv,
    write_sweep_csv,
)
from .errors import ConfigError, HomtpaError
from .hom_numeric import hom_integral
from .inference import FitReport, SeriesEntry, calibrate_reference, fit_eta, run_series
from .interferogram import dip_metrics, etpa_signal
from .spectral import FrequencyGrid, default_grid, jsi
from .synth import NoiseSpec, ScenarioSpec, synth_interferogram, synth_power_sweep
from .transmittance import cross_section, fit_slope, loss_correct
from .validate import run_battery


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_config(args) -> dict:
    cfg = load_json(args.config) if args.config else {}
    num = cfg.setdefault("numeric", {})
    for flag, key in (("grid_n", "grid_n"), ("delay_max", "delay_max_fs"),
                      ("delay_step", "delay_step_fs")):
        value = getattr(args, flag, None)
        if value is not None:
            num[key] = value
    if getattr(args, "seed", None) is not None:
        cfg.setdefault("synth", {})["seed"] = args.seed
    if getattr(args, "eta", None) is not None:
        cfg.setdefault("sample", {})["eta"] = args.eta
    if getattr(args, "mode", None) is not None:
        cfg["closed_form_mode"] = args.mode
    return cfg


def _grid(cfg, model):
    n = int(cfg.get("numeric", {}).get("grid_n", 1024))
    return default_grid(model, n=n)


def _figures(args) -> bool:
    return not args.no_figures


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    model = model_from_config(cfg)
    tag = config_hash(cfg)
    out = _out_dir(args)
    grid = _grid(cfg, model)
    delays = delays_from_config(cfg)
    ig = hom_integral(model, grid, delays)
    write_interferogram_csv(ig, out / "interferogram.csv", tag)
    metrics = dip_metrics(ig)
    dump_json(
        {
            "config_hash": tag,
            "visibility": metrics.visibility,
            "fwhm_fs": metrics.fwhm,
            "min_rate": metrics.min_rate,
            "grid_n": grid.n,
            "half_span_radfs": grid.half_span,
        },
        out / "interferogram_metrics.json",
    )
    if args.jsi:
        mat = jsi(model, FrequencyGrid(grid.center_s, grid.center_i, grid.half_span,
                                       min(grid.n, 512)))
        gs = FrequencyGrid(grid.center_s, grid.center_i, grid.half_span, min(grid.n, 512))
        write_jsi_csv(mat, gs.omega_s(), gs.omega_i(), out / "jsi.csv", tag)
    if _figures(args):
        from . import plots

        plots.plot_interferograms(
            [("quadrature", ig.delays, ig.rates)], out / "interferogram.png",
            title=f"visibility {metrics.visibility:.3f}, FWHM {metrics.fwhm:.1f} fs",
        )
        if args.jsi:
            plots.plot_jsi(mat, gs.omega_s(), gs.omega_i(), out / "jsi.png")
    print(f"simulate: visibility {metrics.visibility:.4f}, FWHM {metrics.fwhm:.2f} fs "
          f"-> {out}")
    return 0


def cmd_closed_form(args) -> int:
    cfg = _load_config(args)
    model = model_from_config(cfg)
    tag = config_hash(cfg)
    out = _out_dir(args)
    mode = cfg.get("closed_form_mode", "substitution")
    params = derive_params(model, mode=mode)
    delays = delays_from_config(cfg)
    ig = closed_form_interferogram(params, delays)
    write_interferogram_csv(ig, out / "closed_form.csv", tag)
    dump_json({"config_hash": tag, **params.to_dict(),
               "visibility": predicted_visibility(params)},
              out / "closed_form_params.json")
    if _figures(args):
        from . import plots

        plots.plot_interferograms([(mode, ig.delays, ig.rates)], out / "closed_form.png")
    print(f"closed-form ({mode}): kappa {params.kappa:.4f}, "
          f"eta' {params.eta_prime:.5f} -> {out}")
    return 0


def _report_to_json(report: FitReport, tag: str) -> dict:
    return {"config_hash": tag, **report.summary()}


def cmd_fit(args) -> int:
    cfg = _load_config(args)
    tag = config_hash(cfg)
    out = _out_dir(args)
    ig = read_interferogram_csv(args.data)
    if args.baseline:
        fixed = ClosedFormParams.from_dict(load_json(args.baseline))
    else:
        model = model_from_config(cfg)
        fixed = derive_params(model, mode=cfg.get("closed_form_mode", "substitution"))
    free = tuple(args.free.split(","))
    if free == ("kappa", "delta_omega_lambda") and args.reference:
        report = calibrate_reference(ig, template=fixed)
    else:
        report = fit_eta(ig, fixed, free=free)
    dump_json(_report_to_json(report, tag), out / "fit_report.json")
    if _figures(args):
        from . import plots

        plots.plot_fit(ig, closed_form_rates(report.params, ig.delays), out / "fit.png")
    print(f"fit: free={args.free} eta={report.params.eta:.5f} "
          f"rms={report.residual_rms:.2e} -> {out}")
    return 0


def cmd_series(args) -> int:
    cfg = _load_config(args)
    tag = config_hash(cfg)
    out = _out_dir(args)
    manifest = load_json(args.manifest)
    root = Path(args.manifest).parent
    entries = []
    for item in manifest.get("entries", []):
        for key in ("label", "concentration_molar", "csv_path"):
            if key not in item:
                raise ConfigError(f"series manifest entry missing {key!r}: {item}")
        entries.append(
            SeriesEntry(
                label=item["label"],
                concentration_molar=float(item["concentration_molar"]),
                interferogram=read_interferogram_csv(root / item["csv_path"]),
            )
        )
    if not entries:
        raise ConfigError("series manifest has no entries")
    model = model_from_config(cfg)
    template = derive_params(model, mode=cfg.get("closed_form_mode", "substitution"))
    series = run_series(entries, template)
    rows = series.table()
    dump_json({"config_hash": tag, "baseline": series.baseline.summary(), "rows": rows},
              out / "series_report.json")
    with open(out / "series.csv", "w") as fh:
        fh.write(f"# homtpa {tag}\n")
        fh.write("label,concentration,eta,eta_ci95,visibility,fwhm_fs,residual_rms\n")
        for r in rows:
            if "error" in r:
                fh.write(f"{r['label']},{r['concentration_molar']},,,,,\n")
                continue
            fh.write(
                f"{r['label']},{r['concentration_molar']},{r['eta']:.6g},"
                f"{r['eta_ci95']:.3g},{r['visibility']:.6g},{r['fwhm_fs']:.6g},"
                f"{r['residual_rms']:.3g}\n"
            )
    if _figures(args):
        from . import plots

        plots.plot_series(rows, out / "series.png")
    fitted = [r for r in rows if "eta" in r]
    print(f"series: {len(fitted)}/{len(rows)} fits ok; "
          f"eta range {min(r['eta'] for r in fitted):.4g}"
          f"..{max(r['eta'] for r in fitted):.4g} -> {out}")
    return 0


def cmd_transmittance(args) -> int:
    cfg = _load_config(args)
    tag = config_hash(cfg)
    out = _out_dir(args)
    geom = geometry_from_config(cfg)
    sweep = read_sweep_csv(args.data)
    corrected = loss_correct(sweep, mode=cfg.get("loss_correction", "per-point"))
    record = {"config_hash": tag, "channels": {}}
    slopes = {}
    for label, sw, flag in (("uncorrected", sweep, False), ("corrected", corrected, True)):
        record["channels"][label] = {}
        for channel in ("0fs", "167fs"):
            fit = fit_slope(sw, channel)
            xs = cross_section(fit.m, geom, fit.ci95_percent, loss_corrected=flag)
            record["channels"][label][channel] = {
                "m": fit.m,
                "ci95_percent": fit.ci95_percent,
                "sigma_e_cm2": xs.sigma_e,
                "intercept_diagnostic": fit.intercept_diagnostic,
                "sample_above_solvent_fraction": fit.sample_above_solvent_fraction,
            }
            if flag:
                slopes[channel.replace("fs", " fs")] = fit.m
    dump_json(record, out / "transmittance.json")
    write_sweep_csv(corrected, out / "sweep_corrected.csv", tag)
    if _figures(args):
        from . import plots

        plots.plot_sweep(corrected, out / "sweep.png", slopes=slopes)
    sig = record["channels"]["corrected"]["0fs"]["sigma_e_cm2"]
    print(f"transmittance: corrected sigma_e(0 fs) = {sig:.4e} cm^2 -> {out}")
    return 0


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    tag = config_hash(cfg)
    out = _out_dir(args)
    model = model_from_config(cfg)
    s_cfg = cfg.get("synth", {})
    noise = NoiseSpec(
        bin_seconds=float(s_cfg.get("bin_seconds", 4.0)),
        peak_rate=float(s_cfg.get("peak_rate", 10000.0)),
        background_rate=float(s_cfg.get("background_rate", 0.0)),
        seed=int(s_cfg.get("seed", 0)),
    )
    kind = s_cfg.get("kind", "interferogram")
    loss = float(s_cfg.get("linear_loss_sample", 0.0))
    mode = cfg.get("closed_form_mode", "substitution")
    if kind == "interferogram":
        sc = ScenarioSpec(model=model, noise=noise, delays=delays_from_config(cfg),
                          linear_loss_sample=loss, closed_form_mode=mode)
        ig = synth_interferogram(sc)
        write_interferogram_csv(ig, out / "synth_interferogram.csv", tag)
        dump_json({"config_hash": tag, **ig.extra["truth"]},
                  out / "synth_interferogram_truth.json")
        if _figures(args):
            from . import plots

            plots.plot_interferograms(
                [("synthetic counts / bin / peak", ig.delays,
                  ig.rates / max(ig.rates.max(), 1e-12))],
                out / "synth_interferogram.png",
            )
        print(f"synth interferogram: {len(ig)} bins, seed {noise.seed} -> {out}")
        return 0
    if kind == "sweep":
        powers = s_cfg.get("powers_mw")
        if powers is None:
            p = s_cfg.get("power_range_mw", [0.25, 43.9])
            powers = np.linspace(float(p[0]), float(p[1]),
                                 int(s_cfg.get("n_powers", 15)))
        sc = ScenarioSpec(model=model, noise=noise, powers=np.asarray(powers, float),
                          linear_loss_sample=loss, closed_form_mode=mode)
        eta_pair = (float(s_cfg.get("eta_sol", 0.0)), float(s_cfg.get("eta_sam", 0.0)))
        sweep = synth_power_sweep(sc, eta_pair, loss, noisy=bool(s_cfg.get("noisy", False)))
        write_sweep_csv(sweep, out / "synth_sweep.csv", tag)
        dump_json({"config_hash": tag, "eta_sol": eta_pair[0], "eta_sam": eta_pair[1],
                   "linear_loss_sample": loss, "params": sc.params().to_dict()},
                  out / "synth_sweep_truth.json")
        if _figures(args):
            from . import plots

            plots.plot_sweep(sweep, out / "synth_sweep.png")
        print(f"synth sweep: {len(sweep)} powers -> {out}")
        return 0
    raise ConfigError(f"unknown synth kind {kind!r}; expected 'interferogram' or 'sweep'")


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    n = int(cfg.get("numeric", {}).get("grid_n", 1024))
    dmax = float(cfg.get("numeric", {}).get("delay_max_fs", 500.0))
    results = run_battery(n=n, delay_max=dmax)
    worst = max(r.max_deviation for r in results)
    dump_json(
        {
            "grid_n": n,
            "delay_max_fs": dmax,
            "tolerance": 1e-3,
            "max_deviation": worst,
            "models": [
                {"label": r.label, "eta": r.eta, "sample_width_radfs": r.sample_width,
                 "sample_detuning_radfs": r.sample_detuning,
                 "max_deviation": r.max_deviation}
                for r in results
            ],
        },
        out / "validation.json",
    )
    if _figures(args):
        from . import plots

        plots.plot_validation(results, out / "validation.png")
    for r in results:
        print(f"  {r.label:45s} max|dev| = {r.max_deviation:.3e}")
    print(f"validate: {len(results)} models, max deviation {worst:.3e} "
          f"(tolerance 1e-3) -> {out}")
    return 0 if worst <= 1e-3 else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homtpa",
        description="Simulate and invert two-photon-absorption signatures in "
                    "Hong-Ou-Mandel interferograms.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="JSON configuration file")
        p.add_argument("-o", "--output-dir", default="homtpa_out")
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")
        p.add_argument("--grid-n", type=int, help="points per spectral axis")
        p.add_argument("--delay-max", type=float, help="scan half-range (fs)")
        p.add_argument("--delay-step", type=float, help="scan step (fs)")

    p = sub.add_parser("simulate", help="quadrature interferogram from the model")
    common(p)
    p.add_argument("--jsi", action="store_true", help="also export the joint spectrum")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("closed-form", help="analytic dip curve and parameters")
    common(p)
    p.add_argument("--mode", choices=["reduction", "substitution"])
    p.add_argument("--eta", type=float, help="override sample efficiency")
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("fit", help="fit the dip expression to a measured curve")
    common(p)
    p.add_argument("--data", required=True, help="interferogram CSV")
    p.add_argument("--free", default="eta",
                   help="comma list from eta,kappa,delta_omega_lambda,delta_omega_J")
    p.add_argument("--baseline", help="params JSON fixing the non-free values")
    p.add_argument("--reference", action="store_true",
                   help="treat the data as the no-absorber reference")
    p.add_argument("--mode", choices=["reduction", "substitution"])
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("series", help="concentration series with shared baseline")
    common(p)
    p.add_argument("--manifest", required=True,
                   help="JSON manifest: entries of label/concentration_molar/csv_path")
    p.add_argument("--mode", choices=["reduction", "substitution"])
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("transmittance", help="power-sweep reduction to a cross-section")
    common(p)
    p.add_argument("--data", required=True, help="power sweep CSV")
    p.set_defaults(func=cmd_transmittance)

    p = sub.add_parser("synth", help="generate synthetic datasets")
    common(p)
    p.add_argument("--seed", type=int, help="override generator seed")
    p.add_argument("--eta", type=float, help="override sample efficiency")
    p.add_argument("--mode", choices=["reduction", "substitution"])
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="closed form vs quadrature battery")
    common(p, config_required=False)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HomtpaError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc),
                   "exit_code": exc.exit_code}, sys.stderr)
        sys.stderr.write("\n")
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - unexpected
        json.dump({"error": type(exc).__name__, "message": str(exc), "exit_code": 1},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
