//! Optical power-spectral-density over a frequency grid — the common currency
//! between source models, the time-domain simulator, and instrument emulations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{watts_to_dbm, Frequency, Wavelength, SPEED_OF_LIGHT};

/// One-sided optical PSD sampled on a monotone absolute-frequency grid.
/// Piecewise linear between nodes, zero outside the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    /// Absolute optical frequency, Hz, strictly increasing.
    pub frequency_hz: Vec<f64>,
    /// PSD, W/Hz, non-negative.
    pub psd_w_per_hz: Vec<f64>,
}

impl Spectrum {
    pub fn new(frequency_hz: Vec<f64>, psd_w_per_hz: Vec<f64>) -> Result<Self> {
        if frequency_hz.len() != psd_w_per_hz.len() {
            return Err(Error::domain(
                "frequency and PSD grids must have equal length",
            ));
        }
        if frequency_hz.len() < 2 {
            return Err(Error::domain("spectrum needs at least two grid points"));
        }
        if !frequency_hz.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("frequency grid must be strictly increasing"));
        }
        if psd_w_per_hz.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::domain("PSD values must be finite and >= 0"));
        }
        Ok(Spectrum {
            frequency_hz,
            psd_w_per_hz,
        })
    }

    /// Top-hat band centred at `center` with full width `width_hz` and linear
    /// ramp edges of width `edge_hz` (10–90% width is 0.8·edge_hz).
    pub fn top_hat(center: Wavelength, width_hz: f64, edge_hz: f64, psd: f64) -> Result<Self> {
        if !(width_hz > 0.0) {
            return Err(Error::domain("top-hat width must be > 0"));
        }
        if !(edge_hz > 0.0) || edge_hz >= width_hz {
            return Err(Error::domain(
                "edge width must be > 0 and smaller than the band",
            ));
        }
        let nu0 = center.frequency().hz();
        let half = width_hz / 2.0;
        Spectrum::new(
            vec![
                nu0 - half - edge_hz / 2.0,
                nu0 - half + edge_hz / 2.0,
                nu0 + half - edge_hz / 2.0,
                nu0 + half + edge_hz / 2.0,
            ],
            vec![0.0, psd, psd, 0.0],
        )
    }

    /// Top-hat specified by a wavelength width (e.g. a 1-nm bandpass filter).
    pub fn top_hat_wl(center: Wavelength, width_m: f64, edge_hz: f64, psd: f64) -> Result<Self> {
        let width_hz = SPEED_OF_LIGHT * width_m / (center.meters() * center.meters());
        Self::top_hat(center, width_hz, edge_hz, psd)
    }

    /// A narrow line of total power `power_w` at `center`, represented as a
    /// top-hat of the given full width.
    pub fn line(center: Wavelength, linewidth_hz: f64, power_w: f64) -> Result<Self> {
        if !(linewidth_hz > 0.0) {
            return Err(Error::domain("linewidth must be > 0"));
        }
        Self::top_hat(
            center,
            linewidth_hz,
            linewidth_hz * 1e-3,
            power_w / linewidth_hz,
        )
    }

    /// PSD at an absolute frequency (linear interpolation, zero outside).
    pub fn psd_at(&self, nu_hz: f64) -> f64 {
        let grid = &self.frequency_hz;
        if nu_hz < grid[0] || nu_hz > *grid.last().unwrap() {
            return 0.0;
        }
        let idx = match grid.binary_search_by(|v| v.partial_cmp(&nu_hz).unwrap()) {
            Ok(i) => return self.psd_w_per_hz[i],
            Err(i) => i,
        };
        let (f0, f1) = (grid[idx - 1], grid[idx]);
        let (p0, p1) = (self.psd_w_per_hz[idx - 1], self.psd_w_per_hz[idx]);
        p0 + (p1 - p0) * (nu_hz - f0) / (f1 - f0)
    }

    /// Total power by trapezoidal integration, W.
    pub fn total_power(&self) -> f64 {
        self.frequency_hz
            .windows(2)
            .zip(self.psd_w_per_hz.windows(2))
            .map(|(f, p)| (f[1] - f[0]) * (p[0] + p[1]) / 2.0)
            .sum()
    }

    /// Frequency span carrying nonzero PSD, Hz (0 for an all-dark spectrum).
    /// A segment counts if either endpoint is lit, so ramp edges are included.
    pub fn support_width_hz(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.frequency_hz.len() - 1 {
            if self.psd_w_per_hz[i] > 0.0 || self.psd_w_per_hz[i + 1] > 0.0 {
                lo = lo.min(self.frequency_hz[i]);
                hi = hi.max(self.frequency_hz[i + 1]);
            }
        }
        if hi > lo {
            hi - lo
        } else {
            0.0
        }
    }

    /// Fraction of total power within ±half_window_hz of `nu_center`.
    pub fn fraction_within(&self, nu_center: f64, half_window_hz: f64) -> f64 {
        let total = self.total_power();
        if total == 0.0 {
            return 1.0;
        }
        // Integrate the clipped band on a refined grid to keep edges honest.
        let lo = nu_center - half_window_hz;
        let hi = nu_center + half_window_hz;
        let n = 2048;
        let step = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let f0 = lo + i as f64 * step;
            acc += (self.psd_at(f0) + self.psd_at(f0 + step)) / 2.0 * step;
        }
        (acc / total).min(1.0)
    }

    /// Peak reading in "dBm per bin" terms: PSD maximum times `bin_hz`.
    pub fn peak_dbm_per_bin(&self, bin_hz: f64) -> f64 {
        let peak = self.psd_w_per_hz.iter().cloned().fold(0.0, f64::max);
        watts_to_dbm(peak * bin_hz)
    }

    /// Grid expressed as wavelengths (descending frequency = ascending λ).
    pub fn wavelengths(&self) -> Vec<f64> {
        self.frequency_hz
            .iter()
            .map(|&f| SPEED_OF_LIGHT / f)
            .collect()
    }

    /// Evaluate PSD at a wavelength.
    pub fn psd_at_wavelength(&self, lambda: Wavelength) -> f64 {
        self.psd_at(lambda.frequency().hz())
    }

    pub fn min_frequency(&self) -> Frequency {
        Frequency::from_hz(self.frequency_hz[0]).unwrap()
    }

    pub fn max_frequency(&self) -> Frequency {
        Frequency::from_hz(*self.frequency_hz.last().unwrap()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lam1550() -> Wavelength {
        Wavelength::from_nm(1550.0).unwrap()
    }

    #[test]
    fn top_hat_power_is_psd_times_width() {
        let s = Spectrum::top_hat(lam1550(), 10e6, 1e5, 2e-19).unwrap();
        // Trapezoid of the ramps contributes exactly one edge width total.
        assert_relative_eq!(s.total_power(), 2e-19 * 10e6, max_relative = 1e-9);
    }

    #[test]
    fn interpolation_and_support() {
        let s = Spectrum::top_hat(lam1550(), 10e6, 1e5, 1e-19).unwrap();
        let nu0 = lam1550().frequency().hz();
        assert_relative_eq!(s.psd_at(nu0), 1e-19, max_relative = 1e-12);
        assert_eq!(s.psd_at(nu0 + 1e9), 0.0);
        assert_relative_eq!(s.support_width_hz(), 10e6 + 1e5, max_relative = 1e-6);
    }

    #[test]
    fn line_total_power() {
        let s = Spectrum::line(lam1550(), 1e5, 1.26e-12).unwrap();
        assert_relative_eq!(s.total_power(), 1.26e-12, max_relative = 1e-9);
    }

    #[test]
    fn fraction_within_window() {
        let s = Spectrum::top_hat(lam1550(), 10e6, 1e4, 1e-19).unwrap();
        let nu0 = lam1550().frequency().hz();
        assert_relative_eq!(s.fraction_within(nu0, 20e6), 1.0, epsilon = 1e-6);
        let half = s.fraction_within(nu0 + 2.5e6, 2.5e6);
        assert_relative_eq!(half, 0.5, epsilon = 0.01);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Spectrum::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0], vec![0.0, -1.0]).is_err());
        assert!(Spectrum::new(vec![1.0], vec![0.0]).is_err());
    }
}
