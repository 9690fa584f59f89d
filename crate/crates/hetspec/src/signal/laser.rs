//! Laser field synthesis: constant-amplitude envelope with detuning, Wiener
//! phase noise (Lorentzian line of FWHM = linewidth), sinusoidal frequency
//! dither, and optional white relative-intensity noise.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::signal::{seeds, trace_len, FieldTrace};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LaserSpec {
    pub power_w: f64,
    /// Offset from the global optical reference, Hz. May be negative.
    pub detuning_hz: f64,
    /// Lorentzian FWHM of the intrinsic line, Hz.
    pub linewidth_hz: f64,
    /// Peak-to-peak span of the frequency dither, Hz (0 disables).
    pub dither_span_hz: f64,
    pub dither_rate_hz: f64,
    /// White relative intensity noise, dBc/Hz (must be <= 0). None disables.
    pub rin_dbc_per_hz: Option<f64>,
}

impl LaserSpec {
    /// Clean continuous-wave line at a given power and detuning.
    pub fn cw(power_w: f64, detuning_hz: f64) -> Self {
        LaserSpec {
            power_w,
            detuning_hz,
            linewidth_hz: 0.0,
            dither_span_hz: 0.0,
            dither_rate_hz: 0.0,
            rin_dbc_per_hz: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.power_w < 0.0 || !self.power_w.is_finite() {
            return Err(Error::domain("laser power must be >= 0"));
        }
        if self.linewidth_hz < 0.0 || self.dither_span_hz < 0.0 || self.dither_rate_hz < 0.0 {
            return Err(Error::domain(
                "linewidth and dither parameters must be >= 0",
            ));
        }
        if self.dither_span_hz > 0.0 && self.dither_rate_hz <= 0.0 {
            return Err(Error::domain("dither span given without a dither rate"));
        }
        if let Some(rin) = self.rin_dbc_per_hz {
            if rin > 0.0 {
                return Err(Error::domain("RIN must be <= 0 dBc/Hz"));
            }
        }
        Ok(())
    }

    /// Highest instantaneous offset frequency the envelope will reach.
    pub fn max_offset_hz(&self) -> f64 {
        self.detuning_hz.abs() + self.dither_span_hz / 2.0
    }
}

/// Synthesize a laser envelope √P·exp(iφ(t)) from a random initial phase,
/// where φ accumulates 2π·detuning·t, a Wiener phase walk with increment
/// variance 2π·linewidth·dt, and a sinusoidal FM of peak-to-peak span at the
/// dither rate.
pub fn synth_laser(
    spec: &LaserSpec,
    duration_s: f64,
    sample_rate: f64,
    seed: u64,
) -> Result<FieldTrace> {
    spec.validate()?;
    let n = trace_len(duration_s, sample_rate)?;
    if spec.max_offset_hz() >= sample_rate / 2.0 {
        return Err(Error::config(format!(
            "laser reaches {:.3e} Hz offset but Nyquist is {:.3e} Hz",
            spec.max_offset_hz(),
            sample_rate / 2.0
        )));
    }

    let dt = 1.0 / sample_rate;
    let amp = spec.power_w.sqrt();
    let mut rng = seeds::rng(seed);
    let start_phase: f64 = rng.gen::<f64>() * TAU;

    // Wiener phase increments giving a Lorentzian line of FWHM = linewidth.
    let walk_sigma = (TAU * spec.linewidth_hz * dt).sqrt();
    // Phase of a sinusoidal FM with peak frequency deviation span/2.
    let fm_depth = if spec.dither_span_hz > 0.0 {
        spec.dither_span_hz / 2.0 / spec.dither_rate_hz
    } else {
        0.0
    };
    let rin_sigma = spec
        .rin_dbc_per_hz
        .map(|dbc| (10f64.powf(dbc / 10.0) * sample_rate / 2.0).sqrt())
        .unwrap_or(0.0);

    let mut samples = Vec::with_capacity(n);
    let mut walk = 0.0;
    for k in 0..n {
        let t = k as f64 * dt;
        if walk_sigma > 0.0 {
            let g: f64 = rng.sample(StandardNormal);
            walk += walk_sigma * g;
        }
        let dither = if fm_depth > 0.0 {
            -fm_depth * (TAU * spec.dither_rate_hz * t).cos()
        } else {
            0.0
        };
        let phase = start_phase + TAU * spec.detuning_hz * t + walk + dither;
        let a = if rin_sigma > 0.0 {
            let g: f64 = rng.sample(StandardNormal);
            amp * (1.0 + rin_sigma * g).max(0.0).sqrt()
        } else {
            amp
        };
        samples.push(Complex64::from_polar(a, phase));
    }

    Ok(FieldTrace {
        samples,
        sample_rate,
        center_offset_hz: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn noiseless_laser_is_constant_envelope() {
        let spec = LaserSpec::cw(2e-3, 0.0);
        let trace = synth_laser(&spec, 1e-4, 1e7, 7).unwrap();
        let first = trace.samples[0];
        for s in &trace.samples {
            assert_relative_eq!(s.re, first.re, max_relative = 1e-12, epsilon = 1e-15);
            assert_relative_eq!(s.im, first.im, max_relative = 1e-12, epsilon = 1e-15);
        }
        assert_relative_eq!(trace.mean_power(), 2e-3, max_relative = 1e-12);
    }

    #[test]
    fn detuned_laser_rotates_at_detuning() {
        let spec = LaserSpec::cw(1e-3, 250e3);
        let trace = synth_laser(&spec, 1e-4, 1e7, 3).unwrap();
        // Phase advance per sample is 2π·detuning/fs.
        let step = trace.samples[1] * trace.samples[0].conj();
        let expected = TAU * 250e3 / 1e7;
        assert_relative_eq!(step.arg(), expected, max_relative = 1e-9);
    }

    #[test]
    fn mean_power_matches_spec_with_phase_noise() {
        let spec = LaserSpec {
            linewidth_hz: 2e5,
            ..LaserSpec::cw(1e-3, 0.0)
        };
        let trace = synth_laser(&spec, 1e-3, 2e7, 11).unwrap();
        assert_relative_eq!(trace.mean_power(), 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn aliasing_is_rejected() {
        let spec = LaserSpec::cw(1e-3, 6e6);
        assert!(synth_laser(&spec, 1e-4, 1e7, 0).is_err());
        let spec = LaserSpec {
            dither_span_hz: 100e6,
            dither_rate_hz: 900.0,
            ..LaserSpec::cw(1e-3, 0.0)
        };
        assert!(synth_laser(&spec, 1e-4, 5e7, 0).is_err());
    }

    #[test]
    fn same_seed_reproduces_bit_identically() {
        let spec = LaserSpec {
            linewidth_hz: 1e5,
            rin_dbc_per_hz: Some(-120.0),
            ..LaserSpec::cw(1e-3, 1e6)
        };
        let a = synth_laser(&spec, 1e-4, 2e7, 99).unwrap();
        let b = synth_laser(&spec, 1e-4, 2e7, 99).unwrap();
        assert_eq!(a.samples, b.samples);
    }
}
