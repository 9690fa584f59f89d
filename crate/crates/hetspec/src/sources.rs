//! Modal-brightness models of dim light sources (SPDC, Raman scattering,
//! SFWM, quantum dots), noise-per-mode models of candidate detectors, and the
//! detectability-verdict engine that pairs them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{
    classify_snr, mode_count, photons_per_mode, round_to_sig_figs, snr_from_photons_per_mode,
    ModeWindow, PhotonsPerMode, SnrRegime,
};
use crate::units::{
    bandwidth_freq_from_wl, dbm_to_watts, photon_energy, wavelength_to_frequency,
    PowerSpectralDensity, Wavelength,
};

/// Waveguide SPDC source described by an aggregate pair-rate density.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpdcSource {
    /// Pairs per second, per mW of pump, per nm of bandwidth.
    pub pair_rate_density: f64,
    /// Pump power, mW.
    pub pump_mw: f64,
    /// Emission bandwidth, nm. The per-nm rate is treated as flat across it.
    pub bandwidth_nm: f64,
    pub center: Wavelength,
}

impl SpdcSource {
    fn validate(&self) -> Result<()> {
        if self.pair_rate_density < 0.0 || self.pump_mw < 0.0 || self.bandwidth_nm < 0.0 {
            return Err(Error::domain("SPDC parameters must be >= 0"));
        }
        Ok(())
    }

    /// Total photon rate into the stated band, photons/s.
    pub fn photon_rate(&self) -> f64 {
        self.pair_rate_density * self.pump_mw * self.bandwidth_nm
    }
}

/// Per-mode brightness of an SPDC source over an integration time, computed
/// with the exact mode count alongside the one-significant-digit mode budget
/// usually quoted for such estimates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PerModeBrightness {
    /// Rate divided by the exact mode count.
    pub exact: f64,
    /// Rate divided by the mode count rounded to one significant digit
    /// (e.g. 1.248e11 -> 1e11).
    pub rounded_modes: f64,
}

pub fn spdc_photons_per_mode(source: &SpdcSource, integration_s: f64) -> Result<PerModeBrightness> {
    source.validate()?;
    if !(source.bandwidth_nm > 0.0) {
        return Err(Error::domain("SPDC bandwidth must be > 0"));
    }
    let window =
        ModeWindow::from_wavelength_band(source.bandwidth_nm * 1e-9, source.center, integration_s)?;
    let modes = mode_count(&window);
    let photons = source.photon_rate() * integration_s;
    Ok(PerModeBrightness {
        exact: photons / modes,
        rounded_modes: photons / round_to_sig_figs(modes, 1),
    })
}

/// Sign convention for the Raman attenuation factor 10^(±αL/10).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttenuationSign {
    /// 10^(+αL/10), as the output-power expression is usually quoted for this
    /// estimate. Default.
    #[default]
    AsPrinted,
    /// 10^(−αL/10), net loss over the span.
    Loss,
}

/// Spontaneous Raman scattering produced by a classical channel in fiber.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RamanChannel {
    /// Launch power, W.
    pub pump_w: f64,
    /// Fiber length, km.
    pub length_km: f64,
    /// Scattering cross-section ρ(λ), nm⁻¹·km⁻¹.
    pub cross_section: f64,
    /// Fiber attenuation α, dB/km.
    pub attenuation_db_per_km: f64,
    pub center: Wavelength,
    #[serde(default)]
    pub attenuation_sign: AttenuationSign,
}

/// Raman output in its three equivalent views.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RamanOutput {
    /// P₀·L·ρ(λ)·10^(±αL/10), W/nm.
    pub psd_w_per_nm: f64,
    /// PSD divided by the photon energy, photons/s/nm.
    pub photon_rate_per_nm: f64,
    /// Photons per spectral-temporal mode for the given integration time.
    pub per_mode: PerModeBrightness,
}

pub fn raman_output_psd(channel: &RamanChannel, integration_s: f64) -> Result<RamanOutput> {
    if channel.pump_w < 0.0
        || channel.length_km < 0.0
        || channel.cross_section < 0.0
        || channel.attenuation_db_per_km < 0.0
    {
        return Err(Error::domain("Raman channel parameters must be >= 0"));
    }
    let alpha_l = channel.attenuation_db_per_km * channel.length_km;
    let atten = match channel.attenuation_sign {
        AttenuationSign::AsPrinted => 10f64.powf(alpha_l / 10.0),
        AttenuationSign::Loss => 10f64.powf(-alpha_l / 10.0),
    };
    let psd = channel.pump_w * channel.length_km * channel.cross_section * atten;
    let rate = psd / photon_energy(channel.center);
    // Modes per second in a 1-nm slice at the centre wavelength.
    let modes_per_s_per_nm = mode_count(&ModeWindow::from_wavelength_band(
        1e-9,
        channel.center,
        1.0,
    )?);
    let photons_per_nm = rate * integration_s;
    let modes_per_nm = modes_per_s_per_nm * integration_s;
    Ok(RamanOutput {
        psd_w_per_nm: psd,
        photon_rate_per_nm: rate,
        per_mode: PerModeBrightness {
            exact: photons_per_nm / modes_per_nm,
            rounded_modes: photons_per_nm / round_to_sig_figs(modes_per_nm, 1),
        },
    })
}

/// Spontaneous four-wave mixing in fiber.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SfwmSource {
    /// Nonlinear coefficient γ, W⁻¹·km⁻¹.
    pub gamma: f64,
    /// Pump power, W.
    pub pump_w: f64,
    /// Fiber length, km.
    pub length_km: f64,
}

/// |γ·P₀·L|² photons per mode in the signal (or idler) beam.
pub fn sfwm_photons_per_mode(source: &SfwmSource) -> Result<PhotonsPerMode> {
    if source.gamma < 0.0 || source.pump_w < 0.0 || source.length_km < 0.0 {
        return Err(Error::domain("SFWM parameters must be >= 0"));
    }
    let x = source.gamma * source.pump_w * source.length_km;
    PhotonsPerMode::new(x * x)
}

/// Dark counts per spectral-temporal mode for a filtered single-photon
/// counter: dark_rate / (modes per second in the filter band) =
/// dark_rate·λ²/(c·Δλ).
pub fn snspd_noise_per_mode(
    dark_rate_cps: f64,
    filter_bw_m: f64,
    lambda: Wavelength,
) -> Result<f64> {
    if dark_rate_cps < 0.0 {
        return Err(Error::domain("dark rate must be >= 0"));
    }
    if !(filter_bw_m > 0.0) {
        return Err(Error::domain("filter bandwidth must be > 0"));
    }
    let modes_per_s = bandwidth_freq_from_wl(filter_bw_m, lambda)?.hz();
    Ok(dark_rate_cps / modes_per_s)
}

/// Noise floor of a grating OSA expressed as photons per mode: the
/// "sensitivity dBm per resolution bin" PSD pushed through the photon-number
/// relation at λ.
pub fn grating_osa_noise_per_mode(
    sensitivity_dbm: f64,
    resolution_m: f64,
    lambda: Wavelength,
) -> Result<f64> {
    if !(resolution_m > 0.0) {
        return Err(Error::domain("resolution must be > 0"));
    }
    let psd = PowerSpectralDensity::from_dbm_per_wl_bin(sensitivity_dbm, resolution_m, lambda)?;
    Ok(photons_per_mode(psd, wavelength_to_frequency(lambda), 1.0)?.value())
}

/// Detector noise model for detectability verdicts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectorNoiseModel {
    /// Shot-noise-limited heterodyne receiver: exactly one noise photon per
    /// mode, by construction.
    Heterodyne,
    /// Grating OSA with a fixed displayed floor.
    GratingOsa {
        sensitivity_dbm: f64,
        resolution_m: f64,
    },
    /// Single-photon counter behind a tunable filter.
    SnspdFiltered {
        dark_rate_cps: f64,
        filter_bw_m: f64,
    },
}

impl DetectorNoiseModel {
    /// Noise photons (or counts) per spectral-temporal mode at λ.
    pub fn noise_per_mode(&self, lambda: Wavelength) -> Result<f64> {
        match *self {
            DetectorNoiseModel::Heterodyne => Ok(1.0),
            DetectorNoiseModel::GratingOsa {
                sensitivity_dbm,
                resolution_m,
            } => grating_osa_noise_per_mode(sensitivity_dbm, resolution_m, lambda),
            DetectorNoiseModel::SnspdFiltered {
                dark_rate_cps,
                filter_bw_m,
            } => snspd_noise_per_mode(dark_rate_cps, filter_bw_m, lambda),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DetectorNoiseModel::Heterodyne => "heterodyne",
            DetectorNoiseModel::GratingOsa { .. } => "grating-osa",
            DetectorNoiseModel::SnspdFiltered { .. } => "snspd-filtered",
        }
    }
}

/// Detectability threshold for counting detectors: source must exceed noise
/// per mode by this ratio. The heterodyne criterion is always SNR >= 1.
pub const DEFAULT_COUNTING_THRESHOLD: f64 = 10.0;

/// A detectability judgment: source brightness against detector noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub source_photons_per_mode: f64,
    pub detector_noise_per_mode: f64,
    /// Source/noise ratio; for heterodyne this is the SNR against shot noise.
    pub snr: f64,
    pub detectable: bool,
    pub rationale: String,
}

/// Judge a source's per-mode brightness against a detector's noise.
pub fn verdict(
    source_n: PhotonsPerMode,
    detector: &DetectorNoiseModel,
    lambda: Wavelength,
) -> Result<Verdict> {
    verdict_with_threshold(source_n, detector, lambda, DEFAULT_COUNTING_THRESHOLD)
}

pub fn verdict_with_threshold(
    source_n: PhotonsPerMode,
    detector: &DetectorNoiseModel,
    lambda: Wavelength,
    counting_threshold: f64,
) -> Result<Verdict> {
    let noise = detector.noise_per_mode(lambda)?;
    match detector {
        DetectorNoiseModel::Heterodyne => {
            let snr = snr_from_photons_per_mode(source_n);
            let detectable = snr >= 1.0;
            let rationale = match classify_snr(snr) {
                SnrRegime::MuchLessThanUnity => format!(
                    "SNR {snr:.3e} against the one-photon-per-mode shot noise is much less than \
                     one; not practically detectable with a heterodyne spectrometer"
                ),
                SnrRegime::BelowUnity => format!(
                    "SNR {snr:.3} is below the one-photon-per-mode shot noise; \
                     not detectable with a heterodyne spectrometer"
                ),
                SnrRegime::AtUnity => {
                    "SNR 1: exactly at the one-photon-per-mode shot-noise limit (marginal)".into()
                }
                SnrRegime::AboveUnity => {
                    format!("SNR {snr:.3} exceeds the one-photon-per-mode shot noise; detectable")
                }
            };
            Ok(Verdict {
                source_photons_per_mode: source_n.value(),
                detector_noise_per_mode: noise,
                snr,
                detectable,
                rationale,
            })
        }
        _ => {
            let ratio = if noise > 0.0 {
                source_n.value() / noise
            } else {
                f64::INFINITY
            };
            let detectable = ratio >= counting_threshold;
            let rationale = if detectable {
                format!(
                    "source/noise ratio {ratio:.3e} exceeds the x{counting_threshold} threshold on \
                     the {} floor of {noise:.3e} per mode",
                    detector.label()
                )
            } else {
                format!(
                    "source/noise ratio {ratio:.3e} is under the x{counting_threshold} threshold; \
                     limited by the {} floor of {noise:.3e} per mode",
                    detector.label()
                )
            };
            Ok(Verdict {
                source_photons_per_mode: source_n.value(),
                detector_noise_per_mode: noise,
                snr: ratio,
                detectable,
                rationale,
            })
        }
    }
}

/// Heterodyne verdict for deterministic single-photon emitters. "Single"
/// photon sources emit at most one photon per mode, so they sit at or below
/// the shot-noise limit unless the caller overrides the brightness.
pub fn quantum_dot_assessment(brightness: Option<f64>) -> Result<Verdict> {
    let n = brightness.unwrap_or(1.0);
    let n = PhotonsPerMode::new(n)?;
    let snr = snr_from_photons_per_mode(n);
    let detectable = snr > 1.0;
    let rationale = if (snr - 1.0).abs() < 1e-12 {
        "single-photon emitter at one photon per mode: SNR 1, exactly at the shot-noise \
         boundary; marginal, not practically detectable"
            .to_string()
    } else if detectable {
        format!("brightness override {snr:.3} photons per mode exceeds the shot noise; detectable")
    } else {
        format!(
            "single-photon emitter at {snr:.3} photons per mode is below the \
             one-photon-per-mode shot noise; not practically detectable"
        )
    };
    Ok(Verdict {
        source_photons_per_mode: n.value(),
        detector_noise_per_mode: 1.0,
        snr,
        detectable,
        rationale,
    })
}

/// Convenience: the grating-OSA floor as an equivalent PSD in W/Hz.
pub fn osa_floor_psd(sensitivity_dbm: f64, resolution_m: f64, lambda: Wavelength) -> Result<f64> {
    let bin_hz = bandwidth_freq_from_wl(resolution_m, lambda)?.hz();
    Ok(dbm_to_watts(sensitivity_dbm) / bin_hz)
}
