"""File formats: interferogram and power-sweep CSV, spectral-matrix CSV,
JSON records, and the model configuration schema.

CSV files carry one comment line with the configuration hash so outputs are
traceable to the inputs that produced them.  All unit-bearing config keys
spell their unit (`_nm`, `_fs`, `_radfs`, `_mw`, `_molar`).
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .interferogram import Interferogram, normalize_by_long_delay
from .spectral import BiphotonModel, FilterSpec, PhaseMatchSpec, PumpSpec, SampleSpec
from .transmittance import GeometrySpec, PowerSweep
from .units import omega_from_lambda_nm, sigma_radfs_from_fwhm_nm


def config_hash(obj) -> str:
    """Short stable hash of a JSON-serializable object."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


# ---------------------------------------------------------------- CSV I/O

def _comment(tag: str | None) -> str:
    return f"homtpa {tag}" if tag else "homtpa"


def _read_csv(path) -> tuple[list[str], np.ndarray]:
    """Comment-tolerant CSV reader: returns column names and a 2-d data array."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"file not found: {path}")
    names = None
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if names is None:
            names = [c.strip() for c in line.split(",")]
            continue
        try:
            rows.append([float(c) for c in line.split(",")])
        except ValueError as exc:
            raise ConfigError(f"{path}: bad CSV row {line!r}") from exc
    if names is None or not rows:
        raise ConfigError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(names):
        raise ConfigError(f"{path}: {len(names)} columns in header, {data.shape[1]} in data")
    return names, data


def write_interferogram_csv(ig: Interferogram, path, tag: str | None = None) -> None:
    """Normalized curves: delay_fs,rate.  Raw counts: delay_fs,coincidences,duration_s."""
    if ig.counts is not None and ig.bin_seconds is not None:
        data = np.column_stack([ig.delays, ig.counts, np.full(len(ig), ig.bin_seconds)])
        header = "delay_fs,coincidences,duration_s"
    else:
        data = np.column_stack([ig.delays, ig.rates])
        header = "delay_fs,rate"
    with open(path, "w") as fh:
        fh.write(f"# {_comment(tag)}\n{header}\n")
        np.savetxt(fh, data, delimiter=",")


def read_interferogram_csv(path) -> Interferogram:
    """Load a curve; raw-count records are normalized by the long-delay mean."""
    cols, data = _read_csv(path)
    col = {name: data[:, k] for k, name in enumerate(cols)}
    if "rate" in col and "delay_fs" in col:
        return Interferogram(
            delays=col["delay_fs"], rates=col["rate"], normalized=True, source="measured"
        )
    if "coincidences" in col and "duration_s" in col and "delay_fs" in col:
        raw = Interferogram(
            delays=col["delay_fs"],
            rates=col["coincidences"] / col["duration_s"],
            normalized=False,
            source="measured",
            counts=col["coincidences"],
            bin_seconds=float(col["duration_s"][0]),
        )
        return normalize_by_long_delay(raw)
    raise ConfigError(f"{path}: expected columns delay_fs,rate or "
                      f"delay_fs,coincidences,duration_s; got {cols}")


def write_sweep_csv(sweep: PowerSweep, path, tag: str | None = None) -> None:
    data = np.column_stack(
        [sweep.powers, sweep.r_sol_0, sweep.r_sam_0, sweep.r_sol_167, sweep.r_sam_167]
    )
    with open(path, "w") as fh:
        fh.write(f"# {_comment(tag)}\npower_mw,r_sol_0,r_sam_0,r_sol_167,r_sam_167\n")
        np.savetxt(fh, data, delimiter=",")


def read_sweep_csv(path) -> PowerSweep:
    cols, data = _read_csv(path)
    col = {name: data[:, k] for k, name in enumerate(cols)}
    try:
        return PowerSweep(
            powers=col["power_mw"],
            r_sol_0=col["r_sol_0"],
            r_sam_0=col["r_sam_0"],
            r_sol_167=col["r_sol_167"],
            r_sam_167=col["r_sam_167"],
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: bad sweep CSV ({exc})") from exc


def write_jsi_csv(matrix: np.ndarray, omega_s: np.ndarray, omega_i: np.ndarray,
                  path, tag: str | None = None) -> None:
    """Matrix with a header row of idler frequencies and a first column of
    signal frequencies (rad/fs)."""
    n = len(omega_s)
    out = np.zeros((n + 1, n + 1))
    out[0, 1:] = omega_i
    out[1:, 0] = omega_s
    out[1:, 1:] = matrix
    np.savetxt(path, out, delimiter=",", comments="# ", header=_comment(tag))


def read_jsi_csv(path):
    data = np.genfromtxt(path, delimiter=",", comments="#")
    return data[1:, 1:], data[1:, 0], data[0, 1:]


# ------------------------------------------------------------- config schema

def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"config section {where!r} is missing key {key!r}")
    return section[key]


def _sigma_radfs(section: dict, center_radfs: float, where: str) -> float:
    """Bandwidth from either an explicit sigma or an FWHM in nm."""
    if "sigma_radfs" in section:
        return float(section["sigma_radfs"])
    if "fwhm_nm" in section:
        center_nm = 2.0 * np.pi * 299.792458 / center_radfs
        return sigma_radfs_from_fwhm_nm(center_nm, float(section["fwhm_nm"]))
    raise ConfigError(f"config section {where!r} needs 'sigma_radfs' or 'fwhm_nm'")


def model_from_config(cfg: dict) -> BiphotonModel:
    """Build the biphoton model from the JSON configuration sections
    pump / phase_matching / filter / sample."""
    pump_cfg = _require(cfg, "pump", "config")
    omega_p = omega_from_lambda_nm(float(_require(pump_cfg, "lambda_nm", "pump")))
    pump = PumpSpec(omega_p, _sigma_radfs(pump_cfg, omega_p, "pump"))

    pm_cfg = _require(cfg, "phase_matching", "config")
    pm = PhaseMatchSpec(
        tau_s=float(_require(pm_cfg, "tau_s_fs", "phase_matching")),
        tau_i=float(_require(pm_cfg, "tau_i_fs", "phase_matching")),
        gamma=float(pm_cfg.get("gamma", 0.19)),
    )

    f_cfg = _require(cfg, "filter", "config")
    if "center_nm" in f_cfg:
        omega_F = omega_from_lambda_nm(float(f_cfg["center_nm"]))
    elif "omega_radfs" in f_cfg:
        omega_F = float(f_cfg["omega_radfs"])
    else:
        raise ConfigError("config section 'filter' needs 'center_nm' or 'omega_radfs'")
    filt = FilterSpec(omega_F, _sigma_radfs(f_cfg, omega_F, "filter"))

    s_cfg = _require(cfg, "sample", "config")
    if "omega_H_radfs" in s_cfg:
        omega_H = float(s_cfg["omega_H_radfs"])
    elif "lambda_H_nm" in s_cfg:
        omega_H = omega_from_lambda_nm(float(s_cfg["lambda_H_nm"]))
    else:
        raise ConfigError("config section 'sample' needs 'omega_H_radfs' or 'lambda_H_nm'")
    if "width_radfs" in s_cfg:
        width = float(s_cfg["width_radfs"])
    elif "width_fwhm_nm" in s_cfg:
        width = sigma_radfs_from_fwhm_nm(
            2.0 * np.pi * 299.792458 / omega_H, float(s_cfg["width_fwhm_nm"])
        )
    else:
        raise ConfigError("config section 'sample' needs 'width_radfs' or 'width_fwhm_nm'")
    sample = SampleSpec(eta=float(_require(s_cfg, "eta", "sample")),
                        omega_H=omega_H, delta_omega_H=width)
    return BiphotonModel(pump, pm, filt, sample)


def geometry_from_config(cfg: dict) -> GeometrySpec:
    g = _require(cfg, "geometry", "config")
    return GeometrySpec(
        concentration_molar=float(_require(g, "concentration_molar", "geometry")),
        length_cm=float(_require(g, "length_cm", "geometry")),
        spot_diameter_um=float(_require(g, "spot_diameter_um", "geometry")),
    )


def delays_from_config(cfg: dict) -> np.ndarray:
    num = cfg.get("numeric", {})
    dmax = float(num.get("delay_max_fs", 300.0))
    step = float(num.get("delay_step_fs", 2.0))
    if step <= 0:
        raise ConfigError("numeric.delay_step_fs must be positive")
    return np.arange(-dmax, dmax + step / 2.0, step)
