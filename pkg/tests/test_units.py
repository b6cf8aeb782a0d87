import math

from homtpa.units import (
    FWHM_PER_SIGMA,
    dip_fwhm_fs_from_width,
    fwhm_from_sigma,
    lambda_nm_from_omega,
    omega_from_lambda_nm,
    sigma_from_fwhm,
    sigma_radfs_from_fwhm_nm,
    width_from_dip_fwhm_fs,
)


def test_wavelength_roundtrip():
    for lam in (403.0, 800.0, 810.0):
        assert lambda_nm_from_omega(omega_from_lambda_nm(lam)) == lam


def test_pump_frequency_matches_hand_value():
    # 2*pi*c/lambda with c = 299.792458 nm/fs, evaluated independently
    assert math.isclose(
        omega_from_lambda_nm(403.0), 2.0 * math.pi * 299.792458 / 403.0, rel_tol=1e-15
    )
    assert abs(omega_from_lambda_nm(403.0) - 4.674) < 1e-3


def test_fwhm_sigma_ratio():
    assert math.isclose(FWHM_PER_SIGMA, 2.3548200450309493, rel_tol=1e-12)
    assert math.isclose(fwhm_from_sigma(sigma_from_fwhm(3.7)), 3.7, rel_tol=1e-15)


def test_filter_bandwidth_conversion_oracle():
    # 40 nm FWHM at 800 nm: d omega = 2*pi*c*d lambda/lambda^2, then /2sqrt(2ln2)
    hand = 2.0 * math.pi * 299.792458 * 40.0 / 800.0**2 / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    got = sigma_radfs_from_fwhm_nm(800.0, 40.0)
    assert math.isclose(got, hand, rel_tol=1e-14)
    assert math.isclose(got, 0.04999457313319076, rel_tol=1e-12)


def test_dip_width_conversion_inverts():
    # 70 fs dip <-> 0.03364 rad/fs, the calibration anchor
    w = width_from_dip_fwhm_fs(70.0)
    assert math.isclose(w, 0.033640286, rel_tol=1e-6)
    assert math.isclose(dip_fwhm_fs_from_width(w), 70.0, rel_tol=1e-15)
