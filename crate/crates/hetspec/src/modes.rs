//! Spectral-temporal mode accounting: mode counting, the shot-noise detection
//! limit, photons per mode, SNR, and the quadrature-variance <-> photon-number
//! dictionary.
//!
//! The central quantities: a bandwidth Δν observed for a time Δt contains
//! N = Δν·Δt modes per polarization; a shot-noise-limited heterodyne receiver
//! carries one noise photon per mode, so the SNR equals the mean detected
//! photon number per mode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{
    bandwidth_freq_from_wl, Frequency, OpticalPower, PowerSpectralDensity, Wavelength, PLANCK,
};

/// A bandwidth × integration-time window over which modes are counted.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModeWindow {
    pub bandwidth: Frequency,
    /// Integration time in seconds. Must be positive.
    pub duration_s: f64,
    /// 1 (default) or 2.
    pub polarizations: u8,
}

impl ModeWindow {
    pub fn new(bandwidth: Frequency, duration_s: f64) -> Result<Self> {
        Self::with_polarizations(bandwidth, duration_s, 1)
    }

    pub fn with_polarizations(
        bandwidth: Frequency,
        duration_s: f64,
        polarizations: u8,
    ) -> Result<Self> {
        if !(duration_s > 0.0) {
            return Err(Error::domain(format!(
                "integration time must be > 0, got {duration_s} s"
            )));
        }
        if polarizations != 1 && polarizations != 2 {
            return Err(Error::domain("polarizations must be 1 or 2"));
        }
        Ok(ModeWindow {
            bandwidth,
            duration_s,
            polarizations,
        })
    }

    /// Window specified as a wavelength bandwidth Δλ at reference λ.
    pub fn from_wavelength_band(
        delta_lambda_m: f64,
        lambda: Wavelength,
        duration_s: f64,
    ) -> Result<Self> {
        Self::new(bandwidth_freq_from_wl(delta_lambda_m, lambda)?, duration_s)
    }
}

/// Mean photon number per spectral-temporal mode (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PhotonsPerMode(f64);

impl PhotonsPerMode {
    pub fn new(value: f64) -> Result<Self> {
        if value < 0.0 || !value.is_finite() {
            return Err(Error::domain(format!(
                "photons per mode must be >= 0, got {value}"
            )));
        }
        Ok(PhotonsPerMode(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// N = Δν·Δt per polarization. Real-valued: N is a large-number budget, not a
/// discrete count.
pub fn mode_count(window: &ModeWindow) -> f64 {
    window.bandwidth.hz() * window.duration_s * f64::from(window.polarizations)
}

/// Round to one significant digit, the precision at which back-of-envelope
/// mode budgets are usually quoted (1.2478e11 -> 1e11).
pub fn round_to_sig_figs(x: f64, figs: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor();
    let scale = 10f64.powf(magnitude - (figs as f64 - 1.0));
    (x / scale).round() * scale
}

/// Shot-noise detection limit P_min = hνΔν: one photon of energy hν within the
/// resolution time Δν⁻¹.
pub fn quantum_limit_power(nu: Frequency, delta_nu: Frequency) -> Result<OpticalPower> {
    if nu.hz() <= 0.0 {
        return Err(Error::domain("optical frequency must be > 0"));
    }
    OpticalPower::from_watts(PLANCK * nu.hz() * delta_nu.hz())
}

/// Mean detected photon number per mode: ⟨n⟩ = S_in·η/(hν).
pub fn photons_per_mode(
    s_in: PowerSpectralDensity,
    nu: Frequency,
    efficiency: f64,
) -> Result<PhotonsPerMode> {
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::domain(format!(
            "detection efficiency must be in [0, 1], got {efficiency}"
        )));
    }
    if nu.hz() <= 0.0 {
        return Err(Error::domain("optical frequency must be > 0"));
    }
    PhotonsPerMode::new(s_in.w_per_hz() * efficiency / (PLANCK * nu.hz()))
}

/// SNR against the one-photon-per-mode shot noise: SNR = ⟨n⟩/1.
pub fn snr_from_photons_per_mode(n: PhotonsPerMode) -> f64 {
    n.value()
}

/// Qualitative regime of an SNR value, for report text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrRegime {
    /// SNR < 0.1.
    MuchLessThanUnity,
    /// 0.1 <= SNR < 1.
    BelowUnity,
    /// SNR == 1 (to within 1e-12).
    AtUnity,
    /// SNR > 1.
    AboveUnity,
}

pub fn classify_snr(snr: f64) -> SnrRegime {
    if (snr - 1.0).abs() < 1e-12 {
        SnrRegime::AtUnity
    } else if snr > 1.0 {
        SnrRegime::AboveUnity
    } else if snr < 0.1 {
        SnrRegime::MuchLessThanUnity
    } else {
        SnrRegime::BelowUnity
    }
}

/// First and second moments of the two measured field quadratures.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureStats {
    pub var_x: f64,
    pub var_p: f64,
    pub mean_x: f64,
    pub mean_p: f64,
}

impl QuadratureStats {
    /// Symmetric zero-mean stats: var_x = var_p = var.
    pub fn symmetric(var: f64) -> Self {
        QuadratureStats {
            var_x: var,
            var_p: var,
            mean_x: 0.0,
            mean_p: 0.0,
        }
    }
}

/// Tolerances for the symmetric, zero-mean assumptions behind the
/// variance -> photon-number conversion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VarianceTolerances {
    /// Max allowed |var_x − var_p| / max(var_x, var_p).
    pub symmetry: f64,
    /// Max allowed |mean| in quadrature units.
    pub mean_bias: f64,
    /// |n| below this clamps to zero; more negative raises an error.
    pub negative_clamp: f64,
}

impl Default for VarianceTolerances {
    fn default() -> Self {
        VarianceTolerances {
            symmetry: 1e-6,
            mean_bias: 1e-6,
            negative_clamp: 1e-6,
        }
    }
}

/// ⟨n⟩ = 2⟨ΔX²⟩ − 1. Valid for symmetric zero-mean quadrature statistics;
/// vacuum (⟨ΔX²⟩ = 1/2) maps to zero photons.
pub fn photons_from_variance(
    stats: &QuadratureStats,
    tol: &VarianceTolerances,
) -> Result<PhotonsPerMode> {
    if stats.var_x < 0.0 || stats.var_p < 0.0 {
        return Err(Error::domain("variances must be >= 0"));
    }
    let scale = stats.var_x.max(stats.var_p).max(f64::MIN_POSITIVE);
    if (stats.var_x - stats.var_p).abs() / scale > tol.symmetry {
        return Err(Error::assumption(format!(
            "quadrature variances are asymmetric (var_x = {}, var_p = {}); \
             the photon-number relation assumes ⟨ΔX²⟩ = ⟨ΔP²⟩",
            stats.var_x, stats.var_p
        )));
    }
    if stats.mean_x.abs() > tol.mean_bias || stats.mean_p.abs() > tol.mean_bias {
        return Err(Error::assumption(format!(
            "quadrature means are biased (mean_x = {}, mean_p = {}); \
             the photon-number relation assumes zero-mean quadratures",
            stats.mean_x, stats.mean_p
        )));
    }
    let n = 2.0 * stats.var_x - 1.0;
    if n < 0.0 {
        if n.abs() <= tol.negative_clamp {
            return PhotonsPerMode::new(0.0);
        }
        return Err(Error::assumption(format!(
            "variance {} is below the shot-noise floor by more than the clamp tolerance \
             (derived n = {n})",
            stats.var_x
        )));
    }
    PhotonsPerMode::new(n)
}

/// Inverse of [`photons_from_variance`]: ⟨ΔX²⟩ = (n + 1)/2.
pub fn variance_from_photons(n: PhotonsPerMode) -> f64 {
    (n.value() + 1.0) / 2.0
}

/// Measured noise variance relative to the shot-noise floor, in dB:
/// 10·log10(n + 1). One photon per mode sits 3 dB above shot noise.
pub fn db_above_shot(n: PhotonsPerMode) -> f64 {
    10.0 * (n.value() + 1.0).log10()
}

/// Inverse of [`db_above_shot`]: n = 10^(dB/10) − 1 (clamped at 0).
pub fn photons_from_db_above_shot(db: f64) -> f64 {
    (10f64.powf(db / 10.0) - 1.0).max(0.0)
}

/// Re-express a "dBm per bandwidth" sensitivity on a different reference
/// bandwidth: adds 10·log10(bw_to/bw_from). Pure PSD re-expression; both
/// bandwidths must be in the same unit (both Hz or both meters).
pub fn rescale_sensitivity(dbm: f64, bw_from: f64, bw_to: f64) -> Result<f64> {
    if !(bw_from > 0.0) || !(bw_to > 0.0) {
        return Err(Error::domain("bandwidths must be > 0"));
    }
    Ok(dbm + 10.0 * (bw_to / bw_from).log10())
}
