//! Unit and constant layer: wavelength/frequency conversions, dBm, photon
//! energy. Internal canonical units are strict SI (m, Hz, W, W/Hz); dBm and
//! "dBm per bandwidth" are presentation views.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact values.
pub mod constants {
    /// Speed of light in vacuum, m/s.
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    /// Planck constant, J·s.
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
}

pub use constants::{ELEMENTARY_CHARGE, PLANCK, SPEED_OF_LIGHT};

/// Optical wavelength in meters. Always positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn from_meters(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::domain(format!(
                "wavelength must be positive, got {m} m"
            )));
        }
        Ok(Wavelength(m))
    }

    pub fn from_nm(nm: f64) -> Result<Self> {
        Self::from_meters(nm * 1e-9)
    }

    pub fn meters(&self) -> f64 {
        self.0
    }

    pub fn nm(&self) -> f64 {
        self.0 * 1e9
    }

    /// ν = c/λ.
    pub fn frequency(&self) -> Frequency {
        Frequency(SPEED_OF_LIGHT / self.0)
    }

    /// Photon energy hc/λ in joules.
    pub fn photon_energy(&self) -> f64 {
        PLANCK * SPEED_OF_LIGHT / self.0
    }
}

/// Optical or RF frequency in hertz. Non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_hz(hz: f64) -> Result<Self> {
        if hz < 0.0 || !hz.is_finite() {
            return Err(Error::domain(format!(
                "frequency must be >= 0, got {hz} Hz"
            )));
        }
        Ok(Frequency(hz))
    }

    pub fn hz(&self) -> f64 {
        self.0
    }

    /// λ = c/ν. Errors on ν = 0.
    pub fn wavelength(&self) -> Result<Wavelength> {
        Wavelength::from_meters(SPEED_OF_LIGHT / self.0)
    }
}

/// ν = c/λ.
pub fn wavelength_to_frequency(lambda: Wavelength) -> Frequency {
    lambda.frequency()
}

/// λ = c/ν.
pub fn frequency_to_wavelength(nu: Frequency) -> Result<Wavelength> {
    nu.wavelength()
}

/// Convert a frequency bandwidth Δν to the equivalent wavelength bandwidth
/// Δλ = λ²Δν/c at the reference wavelength λ.
pub fn bandwidth_wl_from_freq(delta_nu: Frequency, lambda: Wavelength) -> f64 {
    lambda.meters() * lambda.meters() * delta_nu.hz() / SPEED_OF_LIGHT
}

/// Convert a wavelength bandwidth Δλ (meters) to Δν = cΔλ/λ².
pub fn bandwidth_freq_from_wl(delta_lambda_m: f64, lambda: Wavelength) -> Result<Frequency> {
    if delta_lambda_m < 0.0 {
        return Err(Error::domain("bandwidth must be >= 0"));
    }
    Frequency::from_hz(SPEED_OF_LIGHT * delta_lambda_m / (lambda.meters() * lambda.meters()))
}

/// Photon energy hc/λ in joules.
pub fn photon_energy(lambda: Wavelength) -> f64 {
    lambda.photon_energy()
}

/// Optical power in watts. Non-negative; dBm is a view.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct OpticalPower(f64);

impl OpticalPower {
    pub fn from_watts(w: f64) -> Result<Self> {
        if w < 0.0 || !w.is_finite() {
            return Err(Error::domain(format!(
                "optical power must be >= 0, got {w} W"
            )));
        }
        Ok(OpticalPower(w))
    }

    pub fn from_dbm(dbm: f64) -> Self {
        OpticalPower(dbm_to_watts(dbm))
    }

    pub fn watts(&self) -> f64 {
        self.0
    }

    /// `-inf` for zero power (the explicit sentinel).
    pub fn dbm(&self) -> f64 {
        watts_to_dbm(self.0)
    }
}

/// 10^((p − 30)/10) W.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// 10·log10(W) + 30; zero watts maps to the `-inf` sentinel.
pub fn watts_to_dbm(watts: f64) -> f64 {
    if watts == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * watts.log10() + 30.0
    }
}

/// One-sided optical power spectral density in W/Hz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PowerSpectralDensity(f64);

impl PowerSpectralDensity {
    pub fn from_w_per_hz(v: f64) -> Result<Self> {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::domain(format!("PSD must be >= 0, got {v} W/Hz")));
        }
        Ok(PowerSpectralDensity(v))
    }

    /// PSD expressed as total power (dBm) in a wavelength bin Δλ at λ,
    /// e.g. "-64 dBm per 20 pm at 1550 nm".
    pub fn from_dbm_per_wl_bin(dbm: f64, bin_m: f64, lambda: Wavelength) -> Result<Self> {
        if !(bin_m > 0.0) {
            return Err(Error::domain("reference bandwidth must be > 0"));
        }
        let bin_hz = bandwidth_freq_from_wl(bin_m, lambda)?.hz();
        Self::from_w_per_hz(dbm_to_watts(dbm) / bin_hz)
    }

    pub fn w_per_hz(&self) -> f64 {
        self.0
    }

    /// Total power (dBm) collected in a wavelength bin Δλ at λ.
    pub fn dbm_per_wl_bin(&self, bin_m: f64, lambda: Wavelength) -> Result<f64> {
        if !(bin_m > 0.0) {
            return Err(Error::domain("reference bandwidth must be > 0"));
        }
        let bin_hz = bandwidth_freq_from_wl(bin_m, lambda)?.hz();
        Ok(watts_to_dbm(self.0 * bin_hz))
    }
}
