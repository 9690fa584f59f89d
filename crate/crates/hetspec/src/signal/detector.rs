//! Balanced photodetection: subtracted photocurrent with shot and electronics
//! noise, transimpedance/voltage gain stages, and an optional single-pole
//! output low-pass.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::signal::{seeds, FieldTrace};
use crate::units::{Wavelength, ELEMENTARY_CHARGE};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectorSpec {
    /// Detection efficiency on top of the responsivity, 0..1.
    pub quantum_efficiency: f64,
    /// Photodiode responsivity, A/W.
    pub responsivity_a_per_w: f64,
    /// First stage is transimpedance (V/A), later stages are voltage gains.
    pub gain_stages: Vec<f64>,
    /// Single-pole output low-pass corner, Hz. None disables.
    pub output_lowpass_hz: Option<f64>,
    /// Input-referred current noise density, A/√Hz.
    pub electronics_noise_a_per_rthz: f64,
    /// RF bandwidth of the receiver, Hz (validation bound for the ESA tune).
    pub detection_bandwidth_hz: f64,
    /// Diagnostic switch: disable shot-noise injection to expose the bare
    /// transduction. On for every physical configuration.
    #[serde(default = "default_true")]
    pub include_shot_noise: bool,
}

fn default_true() -> bool {
    true
}

impl DetectorSpec {
    /// Quantum-limited receiver at λ: unit efficiency, responsivity q/(hν),
    /// no electronics noise, no output filter.
    pub fn ideal(lambda: Wavelength) -> Self {
        DetectorSpec {
            quantum_efficiency: 1.0,
            responsivity_a_per_w: ideal_responsivity(lambda),
            gain_stages: vec![1e4],
            output_lowpass_hz: None,
            electronics_noise_a_per_rthz: 0.0,
            detection_bandwidth_hz: 350e6,
            include_shot_noise: true,
        }
    }

    /// Amplified balanced pair rebuilt for low noise: one 10^4 transimpedance
    /// stage and a 10-MHz output low-pass.
    pub fn modified_low_noise(lambda: Wavelength) -> Self {
        DetectorSpec {
            gain_stages: vec![1e4],
            output_lowpass_hz: Some(10e6),
            detection_bandwidth_hz: 10e6,
            ..DetectorSpec::ideal(lambda)
        }
    }

    /// Stock amplified balanced pair: 10^3 transimpedance then 10x voltage.
    pub fn stock(lambda: Wavelength) -> Self {
        DetectorSpec {
            gain_stages: vec![1e3, 10.0],
            output_lowpass_hz: None,
            detection_bandwidth_hz: 350e6,
            ..DetectorSpec::ideal(lambda)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.quantum_efficiency) {
            return Err(Error::domain("quantum efficiency must be in [0, 1]"));
        }
        if self.responsivity_a_per_w <= 0.0 {
            return Err(Error::domain("responsivity must be > 0"));
        }
        if self.gain_stages.is_empty() || self.gain_stages.iter().any(|&g| g <= 0.0) {
            return Err(Error::domain("gain stages must be positive and non-empty"));
        }
        if self.electronics_noise_a_per_rthz < 0.0 {
            return Err(Error::domain("electronics noise must be >= 0"));
        }
        Ok(())
    }

    /// Responsivity × efficiency: the optical-power → current transduction.
    pub fn effective_responsivity(&self) -> f64 {
        self.responsivity_a_per_w * self.quantum_efficiency
    }

    /// Overall quantum efficiency including the responsivity deficit against
    /// the ideal q/(hν) photodiode.
    pub fn total_quantum_efficiency(&self, lambda: Wavelength) -> f64 {
        (self.effective_responsivity() / ideal_responsivity(lambda)).min(1.0)
    }

    /// Net volts-per-amp through all gain stages.
    pub fn total_gain_v_per_a(&self) -> f64 {
        self.gain_stages.iter().product()
    }

    /// One-sided shot-noise current PSD for a total detected optical power:
    /// 2·q·R·η·P, A²/Hz.
    pub fn shot_psd(&self, total_power_w: f64) -> f64 {
        2.0 * ELEMENTARY_CHARGE * self.effective_responsivity() * total_power_w
    }

    /// One-sided electronics-noise current PSD, A²/Hz.
    pub fn electronics_psd(&self) -> f64 {
        self.electronics_noise_a_per_rthz * self.electronics_noise_a_per_rthz
    }

    /// Input-referred electronics noise density that puts the LO shot floor
    /// `margin_db` above the electronics floor.
    pub fn electronics_noise_for_shot_margin(&self, lo_power_w: f64, margin_db: f64) -> f64 {
        (self.shot_psd(lo_power_w) / 10f64.powf(margin_db / 10.0)).sqrt()
    }

    /// Power response of the discrete single-pole output filter at `f_hz`.
    pub fn lowpass_power_response(&self, f_hz: f64, sample_rate: f64) -> f64 {
        match self.output_lowpass_hz {
            None => 1.0,
            Some(corner) => {
                let alpha = lowpass_alpha(corner, sample_rate);
                let omega = TAU * f_hz / sample_rate;
                let one_m = 1.0 - alpha;
                alpha * alpha / (1.0 - 2.0 * one_m * omega.cos() + one_m * one_m)
            }
        }
    }
}

/// q/(hν): responsivity of a loss-free photodiode at λ (≈1.25 A/W at 1550 nm).
pub fn ideal_responsivity(lambda: Wavelength) -> f64 {
    ELEMENTARY_CHARGE / lambda.photon_energy()
}

fn lowpass_alpha(corner_hz: f64, sample_rate: f64) -> f64 {
    1.0 - (-TAU * corner_hz / sample_rate).exp()
}

/// Detector output: real voltage samples after gains and filtering.
#[derive(Debug, Clone)]
pub struct DetectedTrace {
    pub volts: Vec<f64>,
    pub sample_rate: f64,
}

impl DetectedTrace {
    pub fn len(&self) -> usize {
        self.volts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volts.is_empty()
    }

    pub fn variance(&self) -> f64 {
        if self.volts.is_empty() {
            return 0.0;
        }
        let mean = self.volts.iter().sum::<f64>() / self.volts.len() as f64;
        self.volts
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / self.volts.len() as f64
    }
}

/// Balanced detection of the two splitter arms:
/// i(t) = R·η·(|a₁|² − |a₂|²) + shot + electronics, then gains and low-pass.
/// Shot noise is white Gaussian with one-sided PSD 2·q·R·η·(P₁+P₂) evaluated
/// per sample; at LO photon fluxes ~10¹⁶/s the Gaussian limit is exact far
/// below measurement tolerance.
pub fn balanced_detect(
    arm1: &FieldTrace,
    arm2: &FieldTrace,
    det: &DetectorSpec,
    seed: u64,
) -> Result<DetectedTrace> {
    arm1.check_compatible(arm2)?;
    det.validate()?;

    let fs = arm1.sample_rate;
    let resp = det.effective_responsivity();
    let gain = det.total_gain_v_per_a();
    let nyquist = fs / 2.0;
    let elec_sigma = det.electronics_noise_a_per_rthz * nyquist.sqrt();
    let shot_scale = if det.include_shot_noise {
        (2.0 * ELEMENTARY_CHARGE * resp * nyquist).sqrt()
    } else {
        0.0
    };

    let mut rng = seeds::rng(seed);
    let mut volts = Vec::with_capacity(arm1.len());
    for (a, b) in arm1.samples.iter().zip(&arm2.samples) {
        let p1 = a.norm_sqr();
        let p2 = b.norm_sqr();
        let mut i = resp * (p1 - p2);
        if shot_scale > 0.0 {
            let g: f64 = rng.sample(StandardNormal);
            i += shot_scale * (p1 + p2).sqrt() * g;
        }
        if elec_sigma > 0.0 {
            let g: f64 = rng.sample(StandardNormal);
            i += elec_sigma * g;
        }
        volts.push(i * gain);
    }

    if let Some(corner) = det.output_lowpass_hz {
        let alpha = lowpass_alpha(corner, fs);
        let mut state = 0.0;
        for v in volts.iter_mut() {
            state += alpha * (*v - state);
            *v = state;
        }
    }

    Ok(DetectedTrace {
        volts,
        sample_rate: fs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::laser::{synth_laser, LaserSpec};
    use crate::signal::mixer::mix_50_50;
    use approx::assert_relative_eq;

    fn lam1550() -> Wavelength {
        Wavelength::from_nm(1550.0).unwrap()
    }

    #[test]
    fn ideal_responsivity_at_1550() {
        assert_relative_eq!(
            ideal_responsivity(lam1550()),
            1.2501593102891278,
            max_relative = 1e-12
        );
    }

    #[test]
    fn dark_input_shows_only_electronics_noise() {
        let mut det = DetectorSpec::ideal(lam1550());
        det.electronics_noise_a_per_rthz = 10e-12;
        let fs = 4e7;
        let dark = FieldTrace::zeros(40_000, fs);
        let out = balanced_detect(&dark, &dark, &det, 5).unwrap();
        let expected = det.electronics_psd() * fs / 2.0 * det.total_gain_v_per_a().powi(2);
        assert_relative_eq!(out.variance(), expected, max_relative = 0.05);
    }

    #[test]
    fn all_dark_and_no_noise_gives_zero() {
        let det = DetectorSpec::ideal(lam1550());
        let dark = FieldTrace::zeros(1000, 4e7);
        let out = balanced_detect(&dark, &dark, &det, 5).unwrap();
        assert!(out.volts.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cw_beat_matches_analytic_form() {
        // CW signal at detuning δ against a CW LO: the subtracted photocurrent
        // is exactly 2Rη√(Ps·Plo)·cos(2πδt + φ0).
        let fs = 4e7;
        let delta = 5e6;
        let p_s = 1e-6;
        let p_lo = 1e-3;
        let sig = synth_laser(&LaserSpec::cw(p_s, delta), 1e-4, fs, 21).unwrap();
        let lo = synth_laser(&LaserSpec::cw(p_lo, 0.0), 1e-4, fs, 22).unwrap();
        let (a, b) = mix_50_50(&sig, &lo).unwrap();
        let mut det = DetectorSpec::ideal(lam1550());
        det.include_shot_noise = false;
        let out = balanced_detect(&a, &b, &det, 23).unwrap();

        let resp = det.effective_responsivity();
        let gain = det.total_gain_v_per_a();
        let phi0 = sig.samples[0].arg() - lo.samples[0].arg();
        let amp = 2.0 * resp * (p_s * p_lo).sqrt() * gain;
        for (k, v) in out.volts.iter().enumerate() {
            let t = k as f64 / fs;
            let expected = amp * (TAU * delta * t + phi0).cos();
            assert_relative_eq!(*v, expected, epsilon = amp * 1e-9);
        }
    }

    #[test]
    fn shot_noise_variance_tracks_lo_power() {
        let fs = 4e7;
        let det = DetectorSpec::ideal(lam1550());
        let gain2 = det.total_gain_v_per_a().powi(2);
        for p_lo in [1e-4, 1e-3] {
            let lo = synth_laser(&LaserSpec::cw(p_lo, 0.0), 2e-3, fs, 31).unwrap();
            let dark = FieldTrace::zeros(lo.len(), fs);
            let (a, b) = mix_50_50(&dark, &lo).unwrap();
            let out = balanced_detect(&a, &b, &det, 37).unwrap();
            let expected = det.shot_psd(p_lo) * fs / 2.0 * gain2;
            assert_relative_eq!(out.variance(), expected, max_relative = 0.05);
        }
    }

    #[test]
    fn lowpass_attenuates_beat() {
        let fs = 8e7;
        let mut det = DetectorSpec::ideal(lam1550());
        det.output_lowpass_hz = Some(1e6);
        let sig = synth_laser(&LaserSpec::cw(1e-6, 2e7), 1e-4, fs, 41).unwrap();
        let lo = synth_laser(&LaserSpec::cw(1e-3, 0.0), 1e-4, fs, 42).unwrap();
        let (a, b) = mix_50_50(&sig, &lo).unwrap();
        let filtered = balanced_detect(&a, &b, &det, 43).unwrap();
        det.output_lowpass_hz = None;
        let raw = balanced_detect(&a, &b, &det, 43).unwrap();
        // Beat sits 20 MHz above a 1-MHz corner: expect strong attenuation.
        assert!(filtered.variance() < raw.variance() * 0.01);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut det = DetectorSpec::ideal(lam1550());
        det.quantum_efficiency = 1.5;
        assert!(det.validate().is_err());
        let mut det = DetectorSpec::ideal(lam1550());
        det.gain_stages = vec![];
        assert!(det.validate().is_err());
    }
}
