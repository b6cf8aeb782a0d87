import numpy as np
import pytest

from homtpa import (
    BiphotonModel,
    FilterSpec,
    PumpSpec,
    SampleSpec,
    calibrate_phase_matching,
    derive_params,
)
from homtpa.units import omega_from_lambda_nm, sigma_radfs_from_fwhm_nm

SERIES_ETAS = (0.0069, 0.0294, 0.1247)  # solvent, most dilute, most concentrated


@pytest.fixture(scope="session")
def lab_pump():
    return PumpSpec(omega_from_lambda_nm(403.0), sigma_radfs_from_fwhm_nm(403.0, 1.0))


@pytest.fixture(scope="session")
def filter_40nm(lab_pump):
    return FilterSpec(lab_pump.omega_p / 2.0, sigma_radfs_from_fwhm_nm(800.0, 40.0))


@pytest.fixture(scope="session")
def filter_10nm(lab_pump):
    return FilterSpec(lab_pump.omega_p / 2.0, sigma_radfs_from_fwhm_nm(810.0, 10.0))


@pytest.fixture(scope="session")
def lab_model_40(lab_pump, filter_40nm):
    """Free-space reference apparatus, 40 nm filter: 70 fs dip at 61% visibility."""
    pm = calibrate_phase_matching(lab_pump, filter_40nm, 70.0, 0.61)
    sample = SampleSpec(eta=0.0, omega_H=lab_pump.omega_p, delta_omega_H=0.0055)
    return BiphotonModel(lab_pump, pm, filter_40nm, sample)


@pytest.fixture(scope="session")
def lab_model_10(lab_pump, filter_10nm):
    """Free-space reference apparatus, 10 nm filter: 181 fs dip at 94% visibility."""
    pm = calibrate_phase_matching(lab_pump, filter_10nm, 181.0, 0.94)
    sample = SampleSpec(eta=0.0, omega_H=lab_pump.omega_p, delta_omega_H=0.0055)
    return BiphotonModel(lab_pump, pm, filter_10nm, sample)


@pytest.fixture(scope="session")
def series_model(lab_pump, filter_40nm):
    """Cuvette-in apparatus of the dilution series: 84 fs dip calibrated so the
    solvent curve (eta=0.0069) shows 59.7% visibility."""
    pm = calibrate_phase_matching(lab_pump, filter_40nm, 84.0, 0.5986957918881786)
    sample = SampleSpec(eta=0.0069, omega_H=lab_pump.omega_p, delta_omega_H=0.0055)
    return BiphotonModel(lab_pump, pm, filter_40nm, sample)


@pytest.fixture(scope="session")
def series_params(series_model):
    return derive_params(series_model, mode="substitution")


@pytest.fixture(scope="session")
def series_delays():
    return np.arange(-180.0, 180.1, 2.0)
