//! Amplified-spontaneous-emission synthesis: circular complex Gaussian noise
//! spectrally shaped to a target PSD. Shaping happens in the frequency
//! domain, so the realized spectrum converges to the spec as the trace grows.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{seeds, trace_len, FieldTrace};
use crate::spectrum::Spectrum;
use crate::units::Frequency;

/// Broadband incoherent light described by its one-sided PSD over absolute
/// optical frequency. Anything outside the simulated baseband window is
/// truncated: only the slice around the reference contributes to detection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AseSpec {
    pub shape: Spectrum,
}

impl AseSpec {
    pub fn new(shape: Spectrum) -> Self {
        AseSpec { shape }
    }

    /// Fraction of the total PSD-integrated power that falls inside the
    /// simulated window ±fs/2 around the reference. 1.0 means no truncation.
    pub fn in_band_fraction(&self, reference: Frequency, sample_rate: f64) -> f64 {
        self.shape
            .fraction_within(reference.hz(), sample_rate / 2.0)
    }
}

/// Synthesize an ASE envelope relative to `reference`. Frequency-domain
/// construction: each FFT bin gets an independent circular Gaussian with
/// variance matching the target PSD at that absolute frequency.
pub fn synth_ase(
    spec: &AseSpec,
    duration_s: f64,
    sample_rate: f64,
    reference: Frequency,
    seed: u64,
) -> Result<FieldTrace> {
    let n = trace_len(duration_s, sample_rate)?;
    let nu0 = reference.hz();

    let total = spec.shape.total_power();
    if total > 0.0 && spec.in_band_fraction(reference, sample_rate) == 0.0 {
        return Err(Error::config(
            "input band lies entirely outside the simulated window",
        ));
    }

    let mut rng = seeds::rng(seed);
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    let df = sample_rate / n as f64;
    for (k, bin) in bins.iter_mut().enumerate() {
        // FFT bin k maps to offset frequency in [-fs/2, fs/2).
        let f_off = if k <= n / 2 {
            k as f64 * df
        } else {
            (k as f64 - n as f64) * df
        };
        let psd = spec.shape.psd_at(nu0 + f_off);
        if psd > 0.0 {
            let sigma = (psd * sample_rate * n as f64 / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *bin = Complex64::new(sigma * re, sigma * im);
        }
    }

    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut bins);
    let scale = 1.0 / n as f64;
    for b in bins.iter_mut() {
        *b *= scale;
    }

    Ok(FieldTrace {
        samples: bins,
        sample_rate,
        center_offset_hz: 0.0,
    })
}
