//! Electronic spectrum analyzer emulation: swept Gaussian bandpass power
//! estimates with video-bandwidth averaging, reported as dBm into 50 Ω.
//!
//! Conventions (recorded in the output metadata): the RBW filter is Gaussian
//! with the stated −3 dB width; the video filter is a single-pole low-pass of
//! linear power; the displayed value per point is the linear-power average
//! over that point's dwell ("average" detector mode).

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::detector::DetectedTrace;
use crate::units::watts_to_dbm;

/// ENBW of a Gaussian filter whose −3 dB width is the RBW: √(π/(4·ln2))·RBW.
pub const GAUSSIAN_ENBW_FACTOR: f64 = 1.0644670194312262;

/// Display load convention.
pub const LOAD_OHMS: f64 = 50.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EsaSpec {
    /// Sweep centre, Hz.
    pub center_rf_hz: f64,
    /// Sweep span, Hz. Zero collapses the sweep to a single point.
    pub span_hz: f64,
    /// Resolution bandwidth (−3 dB width of the Gaussian bandpass), Hz.
    pub rbw_hz: f64,
    /// Video bandwidth, Hz. None disables video filtering.
    pub vbw_hz: Option<f64>,
    pub sweep_points: usize,
    /// Integration time per swept point, s.
    pub per_point_s: f64,
}

impl EsaSpec {
    /// Single-point measurement at the detection frequency.
    pub fn single_point(center_rf_hz: f64, rbw_hz: f64, vbw_hz: Option<f64>, dwell_s: f64) -> Self {
        EsaSpec {
            center_rf_hz,
            span_hz: 0.0,
            rbw_hz,
            vbw_hz,
            sweep_points: 1,
            per_point_s: dwell_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_rf_hz > 0.0) {
            return Err(Error::config("ESA centre frequency must be > 0"));
        }
        if !(self.rbw_hz > 0.0) {
            return Err(Error::config("RBW must be > 0"));
        }
        if let Some(vbw) = self.vbw_hz {
            if !(vbw > 0.0) {
                return Err(Error::config("VBW must be > 0 when given"));
            }
        }
        if self.sweep_points == 0 {
            return Err(Error::config("sweep needs at least one point"));
        }
        if self.sweep_points > 1 {
            if !(self.span_hz > 0.0) {
                return Err(Error::config("multi-point sweep needs a positive span"));
            }
            if self.rbw_hz > self.span_hz {
                return Err(Error::config(format!(
                    "RBW {:.3e} Hz is wider than the span {:.3e} Hz",
                    self.rbw_hz, self.span_hz
                )));
            }
        }
        if !(self.per_point_s > 0.0) {
            return Err(Error::config("per-point integration time must be > 0"));
        }
        Ok(())
    }

    pub fn sweep_time_s(&self) -> f64 {
        self.per_point_s * self.sweep_points as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        if self.sweep_points == 1 {
            return vec![self.center_rf_hz];
        }
        let start = self.center_rf_hz - self.span_hz / 2.0;
        let step = self.span_hz / (self.sweep_points - 1) as f64;
        (0..self.sweep_points)
            .map(|i| start + i as f64 * step)
            .collect()
    }

    pub fn enbw_hz(&self) -> f64 {
        GAUSSIAN_ENBW_FACTOR * self.rbw_hz
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EsaMetadata {
    pub center_rf_hz: f64,
    pub span_hz: f64,
    pub rbw_hz: f64,
    pub vbw_hz: Option<f64>,
    pub sweep_points: usize,
    pub per_point_s: f64,
    pub enbw_hz: f64,
    pub load_ohms: f64,
    pub detector_mode: String,
    pub seed: Option<u64>,
}

/// Electrical spectrum on an RF grid, dBm into the 50-Ω convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RfSpectrum {
    pub frequency_hz: Vec<f64>,
    pub power_dbm: Vec<f64>,
    pub metadata: EsaMetadata,
}

impl RfSpectrum {
    pub fn power_watts(&self, idx: usize) -> f64 {
        10f64.powf((self.power_dbm[idx] - 30.0) / 10.0)
    }

    /// Linear power at the grid point nearest to `f_hz`.
    pub fn power_watts_at(&self, f_hz: f64) -> f64 {
        let idx = self
            .frequency_hz
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - f_hz).abs().partial_cmp(&(b.1 - f_hz).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.power_watts(idx)
    }

    /// Point-wise linear-power average of several spectra on the same grid.
    pub fn average(spectra: &[RfSpectrum]) -> RfSpectrum {
        assert!(!spectra.is_empty());
        let n = spectra[0].frequency_hz.len();
        let mut acc = vec![0.0; n];
        for s in spectra {
            assert_eq!(s.frequency_hz.len(), n);
            for (a, i) in acc.iter_mut().zip(0..n) {
                *a += s.power_watts(i);
            }
        }
        let count = spectra.len() as f64;
        RfSpectrum {
            frequency_hz: spectra[0].frequency_hz.clone(),
            power_dbm: acc.iter().map(|&w| watts_to_dbm(w / count)).collect(),
            metadata: spectra[0].metadata.clone(),
        }
    }
}

/// Measure the detector output on the emulated ESA. Each swept point consumes
/// its own dwell segment of the trace, in time order, like a real swept
/// analyzer; the video-filter state carries across points.
pub fn esa_measure(trace: &DetectedTrace, esa: &EsaSpec) -> Result<RfSpectrum> {
    esa.validate()?;
    let fs = trace.sample_rate;
    if esa.center_rf_hz + esa.span_hz / 2.0 + 3.0 * esa.rbw_hz > fs / 2.0 {
        return Err(Error::config(format!(
            "sweep reaches beyond Nyquist ({:.3e} Hz)",
            fs / 2.0
        )));
    }
    let n_pt = (esa.per_point_s * fs).round() as usize;
    if n_pt < 8 {
        return Err(Error::config("per-point dwell is under 8 samples"));
    }
    let needed = n_pt * esa.sweep_points;
    if trace.len() < needed {
        return Err(Error::config(format!(
            "trace has {} samples but the sweep needs {}",
            trace.len(),
            needed
        )));
    }

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_pt);
    let ifft = planner.plan_fft_inverse(n_pt);
    let df = fs / n_pt as f64;
    let half = n_pt / 2;

    let alpha_v = esa
        .vbw_hz
        .map(|vbw| 1.0 - (-std::f64::consts::TAU * vbw / fs).exp());
    let mut video_state = 0.0;

    let freqs = esa.frequencies();
    let mut power_dbm = Vec::with_capacity(freqs.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); n_pt];

    for (pt, &f_k) in freqs.iter().enumerate() {
        let seg = &trace.volts[pt * n_pt..(pt + 1) * n_pt];
        for (b, &v) in buf.iter_mut().zip(seg) {
            *b = Complex64::new(v, 0.0);
        }
        fft.process(&mut buf);

        // Analytic-signal bandpass: keep positive frequencies weighted by the
        // Gaussian amplitude response centred on f_k, drop the rest.
        for (m, b) in buf.iter_mut().enumerate() {
            if m > half {
                *b = Complex64::new(0.0, 0.0);
                continue;
            }
            let f_m = m as f64 * df;
            let x = (f_m - f_k) / esa.rbw_hz;
            let w = (-2.0 * std::f64::consts::LN_2 * x * x).exp();
            *b *= w;
        }
        ifft.process(&mut buf);
        let scale = 1.0 / n_pt as f64;

        // Instantaneous power into the load, then video averaging.
        let mut acc = 0.0;
        for b in buf.iter() {
            let y = *b * scale;
            let p = 2.0 * y.norm_sqr() / LOAD_OHMS;
            let filtered = match alpha_v {
                Some(a) => {
                    video_state += a * (p - video_state);
                    video_state
                }
                None => p,
            };
            acc += filtered;
        }
        power_dbm.push(watts_to_dbm(acc / n_pt as f64));
    }

    Ok(RfSpectrum {
        frequency_hz: freqs,
        power_dbm,
        metadata: EsaMetadata {
            center_rf_hz: esa.center_rf_hz,
            span_hz: esa.span_hz,
            rbw_hz: esa.rbw_hz,
            vbw_hz: esa.vbw_hz,
            sweep_points: esa.sweep_points,
            per_point_s: esa.per_point_s,
            enbw_hz: esa.enbw_hz(),
            load_ohms: LOAD_OHMS,
            detector_mode: "average".into(),
            seed: None,
        },
    })
}
