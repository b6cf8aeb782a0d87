import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from homtpa.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(args):
    return main([str(a) for a in args])


@pytest.fixture
def outdir(tmp_path):
    return tmp_path / "out"


class TestSimulate:
    def test_writes_curve_metrics_and_figure(self, outdir):
        rc = run(["simulate", "--config", CONFIGS / "lab_40nm.json", "-o", outdir,
                  "--grid-n", "512"])
        assert rc == 0
        assert (outdir / "interferogram.csv").exists()
        assert (outdir / "interferogram.png").exists()
        metrics = json.loads((outdir / "interferogram_metrics.json").read_text())
        assert abs(metrics["fwhm_fs"] - 70.0) < 3.0
        assert abs(metrics["visibility"] - 0.61) < 0.02

    def test_jsi_export(self, outdir):
        rc = run(["simulate", "--config", CONFIGS / "lab_40nm.json", "-o", outdir,
                  "--grid-n", "512", "--jsi", "--no-figures"])
        assert rc == 0
        assert (outdir / "jsi.csv").exists()
        assert not (outdir / "jsi.png").exists()

    def test_idempotent_outputs(self, outdir, tmp_path):
        args = ["simulate", "--config", CONFIGS / "lab_40nm.json", "-o", outdir,
                "--grid-n", "512", "--no-figures"]
        assert run(args) == 0
        first = (outdir / "interferogram.csv").read_bytes()
        assert run(args) == 0
        assert (outdir / "interferogram.csv").read_bytes() == first


class TestClosedForm:
    def test_params_and_curve(self, outdir):
        rc = run(["closed-form", "--config", CONFIGS / "series_scenario.json",
                  "-o", outdir])
        assert rc == 0
        params = json.loads((outdir / "closed_form_params.json").read_text())
        assert params["mode"] == "substitution"
        assert 0.0 < params["kappa"] < 1.0

    def test_reference_floor(self, outdir):
        rc = run(["closed-form", "--config", CONFIGS / "lab_40nm.json", "-o", outdir,
                  "--eta", "0.0", "--no-figures"])
        assert rc == 0
        params = json.loads((outdir / "closed_form_params.json").read_text())
        data = np.loadtxt(outdir / "closed_form.csv", delimiter=",", skiprows=2)
        delays, rates = data[:, 0], data[:, 1]
        floor = rates[np.argmin(np.abs(delays))]
        assert floor == pytest.approx(1.0 - params["kappa"], abs=1e-9)


class TestFitAndSeries:
    def _write_series(self, tmp_path):
        # synthetic curves for solvent + two concentrations from the CLI itself
        manifest = {"entries": []}
        for label, conc, eta, seed in (
            ("solvent", 0.0, 0.0069, 101),
            ("c_1uM", 1e-6, 0.0294, 102),
            ("c_100mM", 0.1, 0.1247, 103),
        ):
            out = tmp_path / f"synth_{label}"
            rc = run(["synth", "--config", CONFIGS / "series_scenario.json", "-o", out,
                      "--eta", str(eta), "--seed", str(seed), "--no-figures",
                      "--delay-max", "250", "--delay-step", "1"])
            assert rc == 0
            csv = f"{label}.csv"
            shutil.move(out / "synth_interferogram.csv", tmp_path / csv)
            manifest["entries"].append(
                {"label": label, "concentration_molar": conc, "csv_path": csv}
            )
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest))
        return path

    def test_fit_roundtrip_on_synth(self, tmp_path, outdir):
        synth_out = tmp_path / "synth"
        rc = run(["synth", "--config", CONFIGS / "series_scenario.json", "-o", synth_out,
                  "--eta", "0.1247", "--seed", "7", "--no-figures",
                  "--delay-max", "250", "--delay-step", "1"])
        assert rc == 0
        truth = json.loads((synth_out / "synth_interferogram_truth.json").read_text())
        assert truth["eta"] == 0.1247
        rc = run(["fit", "--config", CONFIGS / "series_scenario.json",
                  "--data", synth_out / "synth_interferogram.csv", "-o", outdir])
        assert rc == 0
        report = json.loads((outdir / "fit_report.json").read_text())
        # sidecar truth recovered within the reported confidence interval
        assert abs(report["params"]["eta"] - truth["eta"]) <= 2.0 * report["ci95"]["eta"]
        assert (outdir / "fit.png").exists()

    def test_series_pipeline(self, tmp_path, outdir):
        manifest = self._write_series(tmp_path)
        rc = run(["series", "--config", CONFIGS / "series_scenario.json",
                  "--manifest", manifest, "-o", outdir])
        assert rc == 0
        rows = json.loads((outdir / "series_report.json").read_text())["rows"]
        etas = [r["eta"] for r in rows]
        assert len(etas) == 3
        assert etas == sorted(etas)
        assert (outdir / "series.csv").exists()
        assert (outdir / "series.png").exists()
        header = (outdir / "series.csv").read_text().splitlines()[1]
        assert header == "label,concentration,eta,eta_ci95,visibility,fwhm_fs,residual_rms"


class TestTransmittance:
    def test_pipeline(self, tmp_path, outdir):
        synth_out = tmp_path / "sweep"
        rc = run(["synth", "--config", CONFIGS / "transmittance_scenario.json",
                  "-o", synth_out, "--no-figures"])
        assert rc == 0
        rc = run(["transmittance", "--config", CONFIGS / "transmittance_scenario.json",
                  "--data", synth_out / "synth_sweep.csv", "-o", outdir])
        assert rc == 0
        record = json.loads((outdir / "transmittance.json").read_text())
        corrected = record["channels"]["corrected"]["0fs"]["sigma_e_cm2"]
        uncorrected = record["channels"]["uncorrected"]["0fs"]["sigma_e_cm2"]
        assert corrected == pytest.approx(5.6874e-21, rel=0.02)
        assert uncorrected < corrected
        assert (outdir / "sweep.png").exists()


class TestValidate:
    def test_battery_passes(self, outdir):
        rc = run(["validate", "-o", outdir, "--grid-n", "512", "--no-figures"])
        assert rc == 0
        record = json.loads((outdir / "validation.json").read_text())
        assert record["max_deviation"] <= 1e-3
        assert len(record["models"]) >= 20


class TestErrors:
    def test_missing_config_exits_2(self, outdir, capsys):
        rc = run(["simulate", "--config", "does_not_exist.json", "-o", outdir])
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ConfigError"

    def test_aliasing_exits_3(self, outdir, tmp_path):
        cfg = json.loads((CONFIGS / "lab_40nm.json").read_text())
        cfg["numeric"] = {"grid_n": 512, "delay_max_fs": 20000.0, "delay_step_fs": 10000.0}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        rc = run(["simulate", "--config", path, "-o", outdir, "--no-figures"])
        assert rc == 3

    def test_flat_data_fit_exits_4(self, outdir, tmp_path):
        flat = tmp_path / "flat.csv"
        delays = np.arange(-200.0, 201.0, 10.0)
        body = "\n".join(f"{d},1.0" for d in delays)
        flat.write_text("delay_fs,rate\n" + body + "\n")
        rc = run(["fit", "--config", CONFIGS / "series_scenario.json", "--data", flat,
                  "-o", outdir, "--free", "kappa,delta_omega_lambda", "--reference"])
        assert rc == 4
