"""Unit conversions.

Internal convention everywhere in this package: angular frequency in rad/fs,
time in fs, so typical optical magnitudes are O(1).  Wavelengths (nm) and
bandwidths quoted as FWHM are converted at the boundary; the internal
bandwidth parameter is always a Gaussian sigma in rad/fs.
"""
import math

C_NM_PER_FS = 299.792458
"""Speed of light in nm/fs."""

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
"""Gaussian FWHM / sigma ratio, 2*sqrt(2 ln 2)."""


def omega_from_lambda_nm(lambda_nm: float) -> float:
    """Angular frequency (rad/fs) of a vacuum wavelength (nm)."""
    if lambda_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {lambda_nm}")
    return 2.0 * math.pi * C_NM_PER_FS / lambda_nm


def lambda_nm_from_omega(omega_radfs: float) -> float:
    """Vacuum wavelength (nm) of an angular frequency (rad/fs)."""
    if omega_radfs <= 0:
        raise ValueError(f"angular frequency must be positive, got {omega_radfs}")
    return 2.0 * math.pi * C_NM_PER_FS / omega_radfs


def sigma_from_fwhm(fwhm: float) -> float:
    """Gaussian sigma from FWHM (same units)."""
    return fwhm / FWHM_PER_SIGMA


def fwhm_from_sigma(sigma: float) -> float:
    """Gaussian FWHM from sigma (same units)."""
    return sigma * FWHM_PER_SIGMA


def sigma_radfs_from_fwhm_nm(center_nm: float, fwhm_nm: float) -> float:
    """Gaussian sigma in rad/fs for a bandwidth quoted as FWHM in nm.

    Uses the local dispersion of the nm->rad/fs map at the band center,
    |domega/dlambda| = 2*pi*c/lambda^2, adequate for bandwidths much
    narrower than the center wavelength.
    """
    dw_fwhm = 2.0 * math.pi * C_NM_PER_FS * fwhm_nm / center_nm**2
    return sigma_from_fwhm(dw_fwhm)


def dip_fwhm_fs_from_width(delta_omega: float) -> float:
    """Temporal FWHM (fs) of a dip term exp(-delta_omega^2 t^2 / 2)."""
    return FWHM_PER_SIGMA / delta_omega


def width_from_dip_fwhm_fs(fwhm_fs: float) -> float:
    """Spectral width (rad/fs) whose dip term has temporal FWHM fwhm_fs."""
    return FWHM_PER_SIGMA / fwhm_fs
