import json

import numpy as np
import pytest

from homtpa import Interferogram, PowerSweep, jsi, default_grid
from homtpa.dataio import (
    config_hash,
    delays_from_config,
    geometry_from_config,
    load_json,
    model_from_config,
    read_interferogram_csv,
    read_jsi_csv,
    read_sweep_csv,
    write_interferogram_csv,
    write_jsi_csv,
    write_sweep_csv,
)
from homtpa.errors import ConfigError
from homtpa.units import omega_from_lambda_nm


def test_config_hash_stable_and_order_free():
    a = config_hash({"x": 1, "y": [1, 2]})
    b = config_hash({"y": [1, 2], "x": 1})
    assert a == b and len(a) == 12


class TestInterferogramCsv:
    def test_normalized_roundtrip(self, tmp_path):
        delays = np.arange(-100.0, 100.5, 5.0)
        rates = 1.0 - 0.7 * np.exp(-(delays**2) / (2 * 30.0**2))
        ig = Interferogram(delays, rates, normalized=True, source="closed-form")
        path = tmp_path / "curve.csv"
        write_interferogram_csv(ig, path, tag="abc123")
        again = read_interferogram_csv(path)
        assert np.allclose(again.delays, delays)
        assert np.allclose(again.rates, rates, rtol=1e-12)
        assert "abc123" in path.read_text().splitlines()[0]

    def test_raw_counts_roundtrip_normalizes(self, tmp_path):
        delays = np.arange(-100.0, 100.5, 5.0)
        counts = np.full(len(delays), 4000.0)
        counts[20] = 1000.0
        ig = Interferogram(delays, counts / 4.0, normalized=False, source="synthetic",
                           counts=counts, bin_seconds=4.0)
        path = tmp_path / "raw.csv"
        write_interferogram_csv(ig, path)
        again = read_interferogram_csv(path)
        assert again.normalized
        assert again.counts is not None
        assert abs(again.rates[again.long_delay_mask()].mean() - 1.0) < 1e-9

    def test_missing_file_raises_config_error(self, tmp_path):
        with pytest.raises(ConfigError):
            read_interferogram_csv(tmp_path / "nope.csv")


class TestSweepCsv:
    def test_roundtrip(self, tmp_path):
        p = np.linspace(1.0, 10.0, 7)
        sweep = PowerSweep(p, 2 * p, 1.9 * p, 8 * p, 7.6 * p)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(sweep, path, tag="fff")
        again = read_sweep_csv(path)
        for k in ("powers", "r_sol_0", "r_sam_0", "r_sol_167", "r_sam_167"):
            assert np.allclose(getattr(again, k), getattr(sweep, k), rtol=1e-12)


class TestJsiCsv:
    def test_header_row_and_first_column_are_axes(self, tmp_path, lab_model_40):
        grid = default_grid(lab_model_40, n=64)
        mat = jsi(lab_model_40, grid)
        path = tmp_path / "jsi.csv"
        write_jsi_csv(mat, grid.omega_s(), grid.omega_i(), path)
        back, ws, wi = read_jsi_csv(path)
        assert np.allclose(ws, grid.omega_s(), rtol=1e-9)
        assert np.allclose(wi, grid.omega_i(), rtol=1e-9)
        assert np.allclose(back, mat, rtol=1e-9)


class TestConfigSchema:
    CFG = {
        "pump": {"lambda_nm": 403.0, "fwhm_nm": 1.0},
        "phase_matching": {"tau_s_fs": 789.7, "tau_i_fs": 669.7},
        "filter": {"center_nm": 800.0, "fwhm_nm": 40.0},
        "sample": {"eta": 0.1, "omega_H_radfs": 4.674, "width_radfs": 0.0055},
        "geometry": {"concentration_molar": 0.1, "length_cm": 1.0, "spot_diameter_um": 58.0},
        "numeric": {"delay_max_fs": 100.0, "delay_step_fs": 10.0},
    }

    def test_model_construction(self):
        m = model_from_config(self.CFG)
        assert m.pump.omega_p == pytest.approx(omega_from_lambda_nm(403.0))
        assert m.pm.gamma == 0.19
        assert m.sample.eta == 0.1

    def test_wavelength_keyed_sample(self):
        cfg = json.loads(json.dumps(self.CFG))
        cfg["sample"] = {"eta": 0.2, "lambda_H_nm": 403.0, "width_radfs": 0.01}
        m = model_from_config(cfg)
        assert m.sample.omega_H == pytest.approx(omega_from_lambda_nm(403.0))

    def test_missing_section_raises(self):
        cfg = {"pump": {"lambda_nm": 403.0, "fwhm_nm": 1.0}}
        with pytest.raises(ConfigError):
            model_from_config(cfg)

    def test_missing_bandwidth_tag_raises(self):
        cfg = json.loads(json.dumps(self.CFG))
        del cfg["filter"]["fwhm_nm"]
        with pytest.raises(ConfigError):
            model_from_config(cfg)

    def test_geometry(self):
        g = geometry_from_config(self.CFG)
        assert g.length_cm == 1.0

    def test_delays(self):
        d = delays_from_config(self.CFG)
        assert d[0] == -100.0 and d[-1] == 100.0 and len(d) == 21

    def test_shipped_configs_parse(self):
        for name in ("lab_40nm", "lab_10nm", "series_scenario", "transmittance_scenario"):
            cfg = load_json(f"configs/{name}.json")
            model_from_config(cfg)


class TestShippedConfigCalibration:
    def test_40nm_config_reproduces_reference_targets(self):
        from homtpa import closed_form_dip_fwhm, derive_params, predicted_visibility

        m = model_from_config(load_json("configs/lab_40nm.json"))
        p = derive_params(m, mode="reduction")
        assert closed_form_dip_fwhm(p) == pytest.approx(70.0, abs=0.01)
        assert predicted_visibility(p) == pytest.approx(0.61, abs=1e-4)

    def test_10nm_config_reproduces_reference_targets(self):
        from homtpa import closed_form_dip_fwhm, derive_params, predicted_visibility

        m = model_from_config(load_json("configs/lab_10nm.json"))
        p = derive_params(m, mode="reduction")
        assert closed_form_dip_fwhm(p) == pytest.approx(181.0, abs=0.05)
        assert predicted_visibility(p) == pytest.approx(0.94, abs=1e-4)
