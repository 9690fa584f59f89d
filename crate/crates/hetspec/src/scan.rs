//! LO-sweep spectrometer: step the simulated LO across a wavelength range,
//! record the RF power at the detection frequency per step, and assemble an
//! optical-referred spectrum. Includes a grating-OSA emulation and a
//! sensitivity comparison across instrument types.
//!
//! Calibration convention: the electrical reading at the detection frequency
//! f is converted to optical PSD assuming a single occupied sideband, which
//! pins the LO-only floor at exactly one photon per mode. A broadband input
//! occupying both sidebands therefore reads up to 3 dB high — the image
//! ambiguity intrinsic to heterodyne detection without image rejection. Each
//! reading is assigned to the optical frequency ν_LO + f.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::parallel::indexed_map;
use crate::signal::ase::AseSpec;
use crate::signal::detector::DetectorSpec;
use crate::signal::esa::EsaSpec;
use crate::signal::laser::LaserSpec;
use crate::signal::measure::{run_trial, InputSpec, SimulationConfig};
use crate::signal::seeds;
use crate::spectrum::Spectrum;
use crate::units::{
    dbm_to_watts, watts_to_dbm, wavelength_to_frequency, Wavelength, PLANCK, SPEED_OF_LIGHT,
};

/// Plan for one LO sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPlan {
    pub lambda_start: Wavelength,
    pub lambda_stop: Wavelength,
    /// Wavelength increment per step, m.
    pub step_m: f64,
    /// LO template; its detuning field is ignored (the sweep sets the LO).
    pub lo: LaserSpec,
    pub detector: DetectorSpec,
    /// Per-step measurement: centre RF, RBW, VBW, dwell. Single point.
    pub esa: EsaSpec,
    pub sample_rate_hz: f64,
    /// Monte-Carlo trials averaged per step.
    pub trials_per_step: usize,
}

impl ScanPlan {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_start.meters() >= self.lambda_stop.meters() {
            return Err(Error::config("scan start must be below scan stop"));
        }
        if !(self.step_m > 0.0) {
            return Err(Error::config("scan step must be > 0"));
        }
        if self.steps() < 2 {
            return Err(Error::config("scan range covers fewer than two steps"));
        }
        self.esa.validate()?;
        self.detector.validate()?;
        self.lo.validate()?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        let span = self.lambda_stop.meters() - self.lambda_start.meters();
        // Tolerate float dust when the span is an integer number of steps.
        (span / self.step_m * (1.0 + 1e-9)).floor() as usize + 1
    }

    fn lambda_at(&self, step: usize) -> f64 {
        self.lambda_start.meters() + step as f64 * self.step_m
    }
}

/// What the spectrometer looks at during a scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ScanInput {
    Ase(AseSpec),
    /// Narrowband laser at an absolute centre wavelength.
    Laser {
        center: Wavelength,
        spec: LaserSpec,
    },
}

impl ScanInput {
    /// True spectrum of the input, for instrument emulation and comparison.
    pub fn true_spectrum(&self) -> Spectrum {
        match self {
            ScanInput::Ase(ase) => ase.shape.clone(),
            ScanInput::Laser { center, spec } => {
                let lw = spec.linewidth_hz.max(1.0);
                Spectrum::line(*center, lw, spec.power_w).expect("line spectrum")
            }
        }
    }

    /// Width of the narrowest spectral feature, Hz.
    pub fn feature_width_hz(&self) -> f64 {
        match self {
            ScanInput::Ase(ase) => ase.shape.support_width_hz(),
            ScanInput::Laser { spec, .. } => spec.linewidth_hz.max(1.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub lambda_start_m: f64,
    pub lambda_stop_m: f64,
    pub step_m: f64,
    pub trials_per_step: usize,
    pub rbw_hz: f64,
    pub vbw_hz: Option<f64>,
    pub dwell_s: f64,
    pub lo_power_w: f64,
    pub sideband_convention: String,
    pub lineshape: String,
}

/// Optical spectrum assembled from a scan (or an instrument emulation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpticalSpectrumResult {
    /// Ascending wavelength grid, m.
    pub wavelength_m: Vec<f64>,
    /// Optical-referred power per effective resolution bin, dBm.
    pub power_dbm: Vec<f64>,
    pub effective_resolution_m: f64,
    pub effective_resolution_hz: f64,
    pub seed: u64,
    pub warnings: Vec<String>,
    pub metadata: ScanMetadata,
}

impl OpticalSpectrumResult {
    pub fn power_watts(&self, idx: usize) -> f64 {
        dbm_to_watts(self.power_dbm[idx])
    }

    /// Floor estimate: 5th percentile of the linear bin powers.
    pub fn floor_dbm(&self) -> f64 {
        let mut lin: Vec<f64> = self.power_dbm.iter().map(|&p| dbm_to_watts(p)).collect();
        lin.sort_by(|a, b| a.partial_cmp(b).unwrap());
        watts_to_dbm(lin[lin.len() / 20])
    }
}

/// Sweep the LO per the plan and assemble the optical spectrum.
///
/// Per step: the LO parks at λ_k, the chain runs `trials_per_step` trials,
/// and the mean RF power at the detection frequency is converted to an
/// optical-referred PSD through the known LO power and detector constants:
///
/// S_opt = P_rf · 50 / (ENBW · G² · |H_lp(f)|² · 2·(R·η)² · P_lo)
pub fn run_scan(
    plan: &ScanPlan,
    input: &ScanInput,
    master_seed: u64,
) -> Result<OpticalSpectrumResult> {
    plan.validate()?;
    let steps = plan.steps();
    let f_det = plan.esa.center_rf_hz;
    let fs = plan.sample_rate_hz;
    let trials = plan.trials_per_step.max(1);

    let mut warnings = Vec::new();
    let step_hz =
        SPEED_OF_LIGHT * plan.step_m / (plan.lambda_start.meters() * plan.lambda_start.meters());
    if step_hz < plan.lo.linewidth_hz {
        warnings.push(format!(
            "scan step ({step_hz:.3e} Hz) is finer than the LO linewidth \
             ({:.3e} Hz); adjacent points are correlated",
            plan.lo.linewidth_hz
        ));
    }
    let feature = input.feature_width_hz();
    if feature < step_hz {
        warnings.push(format!(
            "step aliasing: input features ({feature:.3e} Hz) are narrower than the scan \
             step ({step_hz:.3e} Hz)"
        ));
    }
    if let Some(vbw) = plan.esa.vbw_hz {
        if vbw * plan.esa.per_point_s < 1.0 {
            warnings.push(format!(
                "video filter ({vbw} Hz) does not settle within the {} s dwell; \
                 absolute calibration degraded",
                plan.esa.per_point_s
            ));
        }
    }
    if let ScanInput::Ase(ase) = input {
        let mid = Wavelength::from_meters(
            (plan.lambda_start.meters() + plan.lambda_stop.meters()) / 2.0,
        )?;
        let frac = ase.in_band_fraction(mid.frequency(), fs);
        if frac < 0.999 {
            warnings.push(format!(
                "input band wider than the simulated window; each step sees a \
                 {:.2e} slice of its power",
                frac
            ));
        }
    }

    // Calibration constants shared by every step.
    let r_eff = plan.detector.effective_responsivity();
    let gain2 = plan.detector.total_gain_v_per_a().powi(2);
    let h_lp2 = plan.detector.lowpass_power_response(f_det, fs);
    let enbw = plan.esa.enbw_hz();
    let p_lo = plan.lo.power_w;
    if !(p_lo > 0.0) {
        return Err(Error::config("scan needs a nonzero LO power"));
    }
    let cal = crate::signal::esa::LOAD_OHMS / (enbw * gain2 * h_lp2 * 2.0 * r_eff * r_eff * p_lo);

    let step_results = indexed_map(steps, |k| -> Result<(f64, f64)> {
        let lambda_k = Wavelength::from_meters(plan.lambda_at(k))?;
        let nu_lo = lambda_k.frequency().hz();

        // Per-step input relative to this LO position; an input with nothing
        // in this step's window is simply dark here.
        let step_input = match input {
            ScanInput::Ase(ase) => {
                if ase.in_band_fraction(lambda_k.frequency(), fs) > 0.0 {
                    InputSpec::Ase(ase.clone())
                } else {
                    InputSpec::Dark
                }
            }
            ScanInput::Laser { center, spec } => {
                let detuning = center.frequency().hz() - nu_lo;
                if detuning.abs() >= 0.45 * fs {
                    InputSpec::Dark
                } else {
                    InputSpec::Laser(LaserSpec {
                        detuning_hz: detuning,
                        ..*spec
                    })
                }
            }
        };

        let cfg = SimulationConfig {
            reference: lambda_k,
            sample_rate_hz: fs,
            input: step_input,
            lo: LaserSpec {
                detuning_hz: 0.0,
                ..plan.lo
            },
            detector: plan.detector.clone(),
            esa: plan.esa,
            trials: 1,
        };

        let step_seed = seeds::derive(master_seed, k as u64);
        let mut p_rf = 0.0;
        for t in 0..trials {
            let spec = run_trial(&cfg, seeds::derive(step_seed, t as u64))?;
            p_rf += spec.power_watts_at(f_det);
        }
        p_rf /= trials as f64;

        // Reading assigned to ν_LO + f_det.
        Ok((nu_lo + f_det, p_rf * cal))
    });

    let resolution_hz = plan.lo.linewidth_hz.max(2.0 * plan.esa.rbw_hz);
    let lambda_mid = (plan.lambda_start.meters() + plan.lambda_stop.meters()) / 2.0;
    let resolution_m = lambda_mid * lambda_mid * resolution_hz / SPEED_OF_LIGHT;

    let mut rows = Vec::with_capacity(steps);
    for r in step_results {
        rows.push(r?);
    }
    // ν descends as λ ascends; scan order is ascending λ already.
    let wavelength_m: Vec<f64> = rows.iter().map(|(nu, _)| SPEED_OF_LIGHT / nu).collect();
    let power_dbm: Vec<f64> = rows
        .iter()
        .map(|(_, s_opt)| watts_to_dbm(s_opt * resolution_hz))
        .collect();

    Ok(OpticalSpectrumResult {
        wavelength_m,
        power_dbm,
        effective_resolution_m: resolution_m,
        effective_resolution_hz: resolution_hz,
        seed: master_seed,
        warnings,
        metadata: ScanMetadata {
            lambda_start_m: plan.lambda_start.meters(),
            lambda_stop_m: plan.lambda_stop.meters(),
            step_m: plan.step_m,
            trials_per_step: trials,
            rbw_hz: plan.esa.rbw_hz,
            vbw_hz: plan.esa.vbw_hz,
            dwell_s: plan.esa.per_point_s,
            lo_power_w: plan.lo.power_w,
            sideband_convention: "single".into(),
            lineshape: "heterodyne".into(),
        },
    })
}

/// Emulate a grating OSA: convolve the true spectrum with a Gaussian of FWHM
/// equal to the resolution, bin onto a resolution-pitch grid, and add the
/// fixed displayed floor.
pub fn grating_osa_emulate(
    true_spectrum: &Spectrum,
    resolution_m: f64,
    floor_dbm_per_resolution: f64,
) -> Result<OpticalSpectrumResult> {
    if !(resolution_m > 0.0) {
        return Err(Error::config("OSA resolution must be > 0"));
    }
    // Input nodes as ascending wavelength.
    let mut nodes: Vec<(f64, f64)> = true_spectrum
        .frequency_hz
        .iter()
        .zip(&true_spectrum.psd_w_per_hz)
        .map(|(&f, &p)| (SPEED_OF_LIGHT / f, p))
        .collect();
    nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let lam_lo = nodes.first().unwrap().0 - 4.0 * resolution_m;
    let lam_hi = nodes.last().unwrap().0 + 4.0 * resolution_m;
    let bins = ((lam_hi - lam_lo) / resolution_m).ceil() as usize + 1;
    let sigma = resolution_m / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
    let floor_w = dbm_to_watts(floor_dbm_per_resolution);

    let mut wavelength_m = Vec::with_capacity(bins);
    let mut power_dbm = Vec::with_capacity(bins);
    for i in 0..bins {
        let lam = lam_lo + i as f64 * resolution_m;
        let smoothed = convolve_gaussian_at(&nodes, lam, sigma);
        // PSD (W/Hz) collected over the resolution bin at this wavelength.
        let bin_hz = SPEED_OF_LIGHT * resolution_m / (lam * lam);
        wavelength_m.push(lam);
        power_dbm.push(watts_to_dbm(smoothed * bin_hz + floor_w));
    }

    Ok(OpticalSpectrumResult {
        wavelength_m,
        power_dbm,
        effective_resolution_m: resolution_m,
        effective_resolution_hz: SPEED_OF_LIGHT * resolution_m / (nodes[0].0 * nodes[0].0),
        seed: 0,
        warnings: Vec::new(),
        metadata: ScanMetadata {
            lambda_start_m: lam_lo,
            lambda_stop_m: lam_hi,
            step_m: resolution_m,
            trials_per_step: 1,
            rbw_hz: 0.0,
            vbw_hz: None,
            dwell_s: 0.0,
            lo_power_w: 0.0,
            sideband_convention: "direct-detection".into(),
            lineshape: "gaussian".into(),
        },
    })
}

/// Exact convolution of a piecewise-linear PSD with a normalized Gaussian,
/// evaluated at one point.
fn convolve_gaussian_at(nodes: &[(f64, f64)], x0: f64, sigma: f64) -> f64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let mut acc = 0.0;
    for pair in nodes.windows(2) {
        let (x1, p1) = pair[0];
        let (x2, p2) = pair[1];
        if x2 <= x1 {
            continue;
        }
        // Linear segment p(x) = a + b·x over [x1, x2].
        let b = (p2 - p1) / (x2 - x1);
        let a = p1 - b * x1;
        // ∫ (a + b·x)·N(x; x0, σ) dx over the segment, via the Gaussian CDF
        // and PDF antiderivatives.
        let z1 = (x1 - x0) / (sqrt2 * sigma);
        let z2 = (x2 - x0) / (sqrt2 * sigma);
        let cdf = 0.5 * (erf(z2) - erf(z1));
        let pdf1 = norm * (-((x1 - x0) * (x1 - x0)) / (2.0 * sigma * sigma)).exp();
        let pdf2 = norm * (-((x2 - x0) * (x2 - x0)) / (2.0 * sigma * sigma)).exp();
        acc += (a + b * x0) * cdf - b * sigma * sigma * (pdf2 - pdf1);
    }
    acc.max(0.0)
}

/// 10–90% rise width of the lowest-wavelength edge, and the full width at
/// half maximum of the highest peak, both by linear interpolation between
/// grid points. Levels are measured between the floor (5th percentile) and
/// the plateau (95th percentile).
pub fn edge_width_10_90(result: &OpticalSpectrumResult) -> Option<f64> {
    let lin: Vec<f64> = (0..result.power_dbm.len())
        .map(|i| result.power_watts(i))
        .collect();
    let mut sorted = lin.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let floor = sorted[sorted.len() / 20];
    let plateau = sorted[sorted.len() * 19 / 20];
    if plateau <= floor * 2.0 {
        return None;
    }
    let lo_level = floor + 0.1 * (plateau - floor);
    let hi_level = floor + 0.9 * (plateau - floor);
    let cross = |level: f64| -> Option<f64> {
        for i in 1..lin.len() {
            if lin[i - 1] < level && lin[i] >= level {
                let t = (level - lin[i - 1]) / (lin[i] - lin[i - 1]);
                return Some(
                    result.wavelength_m[i - 1]
                        + t * (result.wavelength_m[i] - result.wavelength_m[i - 1]),
                );
            }
        }
        None
    };
    let lo_x = cross(lo_level)?;
    let hi_x = cross(hi_level)?;
    Some((hi_x - lo_x).abs())
}

/// FWHM of the highest peak above the floor, m.
pub fn peak_fwhm(result: &OpticalSpectrumResult) -> Option<f64> {
    let lin: Vec<f64> = (0..result.power_dbm.len())
        .map(|i| result.power_watts(i))
        .collect();
    let (peak_idx, &peak) = lin
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    let mut sorted = lin.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let floor = sorted[sorted.len() / 20];
    if peak <= floor * 4.0 {
        return None;
    }
    let half = floor + (peak - floor) / 2.0;

    let mut left = None;
    for i in (1..=peak_idx).rev() {
        if lin[i - 1] < half && lin[i] >= half {
            let t = (half - lin[i - 1]) / (lin[i] - lin[i - 1]);
            left = Some(
                result.wavelength_m[i - 1]
                    + t * (result.wavelength_m[i] - result.wavelength_m[i - 1]),
            );
            break;
        }
    }
    let mut right = None;
    for i in peak_idx..lin.len() - 1 {
        if lin[i] >= half && lin[i + 1] < half {
            let t = (lin[i] - half) / (lin[i] - lin[i + 1]);
            right = Some(
                result.wavelength_m[i] + t * (result.wavelength_m[i + 1] - result.wavelength_m[i]),
            );
            break;
        }
    }
    Some((right? - left?).abs())
}

/// Scenario description for the instrument comparison: a signal of known
/// bandwidth and in-band PSD.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalScenario {
    pub center: Wavelength,
    /// The signal's own bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// In-band PSD, W/Hz.
    pub psd_w_per_hz: f64,
}

impl SignalScenario {
    pub fn from_input(input: &ScanInput) -> Self {
        match input {
            ScanInput::Ase(ase) => {
                let spectrum = &ase.shape;
                let bw = spectrum.support_width_hz().max(1.0);
                let center = Wavelength::from_meters(
                    SPEED_OF_LIGHT
                        / ((spectrum.min_frequency().hz() + spectrum.max_frequency().hz()) / 2.0),
                )
                .expect("positive centre");
                SignalScenario {
                    center,
                    bandwidth_hz: bw,
                    psd_w_per_hz: spectrum.total_power() / bw,
                }
            }
            ScanInput::Laser { center, spec } => {
                let bw = spec.linewidth_hz.max(1.0);
                SignalScenario {
                    center: *center,
                    bandwidth_hz: bw,
                    psd_w_per_hz: spec.power_w / bw,
                }
            }
        }
    }

    pub fn total_power_w(&self) -> f64 {
        self.psd_w_per_hz * self.bandwidth_hz
    }
}

/// Fixed-floor instruments (grating OSA) can average or subtract their
/// displayed floor, so a signal within 3 dB below it still counts as
/// detectable.
pub const OSA_DETECT_MARGIN_DB: f64 = -3.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub instrument: String,
    /// Smallest PSD the instrument resolves, expressed as dBm per the
    /// scenario's signal bandwidth.
    pub min_detectable_dbm: f64,
    /// Signal over noise in the instrument's own terms, dB.
    pub margin_db: f64,
    pub detectable: bool,
    pub note: String,
}

/// Edge and linewidth metrics measured off the two reconstructions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionMetrics {
    pub scan_edge_10_90_m: Option<f64>,
    pub osa_edge_10_90_m: Option<f64>,
    pub scan_fwhm_m: Option<f64>,
    pub osa_fwhm_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario_bandwidth_hz: f64,
    pub scenario_power_dbm: f64,
    pub rows: Vec<ComparisonRow>,
    pub resolution: ResolutionMetrics,
    pub winner: String,
}

/// Compare minimum detectable PSD per instrument for one scenario. The
/// heterodyne spectrometer wins only when the signal is much narrower than
/// the grating resolution and carries at least one photon per mode;
/// otherwise the lowest-noise counting detector that sees the signal wins.
pub fn compare_sensitivity(
    scan_result: &OpticalSpectrumResult,
    osa_result: &OpticalSpectrumResult,
    snspd_dark_rate_cps: f64,
    snspd_filter_bw_m: f64,
    scenario: &SignalScenario,
) -> Result<ComparisonReport> {
    let lambda = scenario.center;
    let nu = wavelength_to_frequency(lambda).hz();
    let h_nu = PLANCK * nu;
    let sig_power = scenario.total_power_w();

    // Heterodyne: one photon per mode over the signal's own bandwidth,
    // assuming a matched resolution bandwidth.
    let n_het = scenario.psd_w_per_hz / h_nu;
    let het_min_w = h_nu * scenario.bandwidth_hz;
    let het_row = ComparisonRow {
        instrument: "heterodyne".into(),
        min_detectable_dbm: watts_to_dbm(het_min_w),
        margin_db: if n_het > 0.0 {
            10.0 * n_het.log10()
        } else {
            f64::NEG_INFINITY
        },
        detectable: n_het >= 1.0,
        note: format!(
            "{n_het:.3e} photons per mode against the one-photon shot floor; \
             scan floor estimate {:.1} dBm per resolution bin",
            scan_result.floor_dbm()
        ),
    };

    // Grating OSA: power collected into one resolution cell against its
    // fixed floor.
    let res_hz = osa_result.effective_resolution_hz;
    let cell_w = scenario.psd_w_per_hz * scenario.bandwidth_hz.min(res_hz);
    let floor_w = dbm_to_watts(osa_result.floor_dbm());
    let osa_margin = if cell_w > 0.0 {
        10.0 * (cell_w / floor_w).log10()
    } else {
        f64::NEG_INFINITY
    };
    let osa_row = ComparisonRow {
        instrument: "grating-osa".into(),
        min_detectable_dbm: watts_to_dbm(
            floor_w
                * 10f64.powf(OSA_DETECT_MARGIN_DB / 10.0)
                * (scenario.bandwidth_hz / scenario.bandwidth_hz.min(res_hz)),
        ),
        margin_db: osa_margin,
        detectable: osa_margin >= OSA_DETECT_MARGIN_DB,
        note: format!(
            "fixed floor {:.1} dBm per {:.3e}-m bin; signal cell reads {osa_margin:+.1} dB \
             against it",
            osa_result.floor_dbm(),
            osa_result.effective_resolution_m
        ),
    };

    // Filtered SNSPD: photon rate against dark counts.
    let filter_hz = SPEED_OF_LIGHT * snspd_filter_bw_m / (lambda.meters() * lambda.meters());
    let rate = scenario.psd_w_per_hz * scenario.bandwidth_hz.min(filter_hz) / h_nu;
    let snspd_margin = if rate > 0.0 && snspd_dark_rate_cps > 0.0 {
        10.0 * (rate / snspd_dark_rate_cps).log10()
    } else if rate > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    let snspd_min_w = h_nu
        * snspd_dark_rate_cps
        * crate::sources::DEFAULT_COUNTING_THRESHOLD
        * (scenario.bandwidth_hz / scenario.bandwidth_hz.min(filter_hz));
    let snspd_row = ComparisonRow {
        instrument: "snspd-filtered".into(),
        min_detectable_dbm: watts_to_dbm(snspd_min_w),
        margin_db: snspd_margin,
        detectable: rate >= snspd_dark_rate_cps * crate::sources::DEFAULT_COUNTING_THRESHOLD,
        note: format!(
            "{rate:.3e} counts/s in the filter band against {snspd_dark_rate_cps:.1} dark \
             counts/s"
        ),
    };

    let narrow = scenario.bandwidth_hz <= res_hz / 10.0;
    let winner = if het_row.detectable && narrow {
        "heterodyne"
    } else if snspd_row.detectable {
        "snspd-filtered"
    } else if osa_row.detectable {
        "grating-osa"
    } else {
        "none"
    }
    .to_string();

    Ok(ComparisonReport {
        scenario_bandwidth_hz: scenario.bandwidth_hz,
        scenario_power_dbm: watts_to_dbm(sig_power),
        rows: vec![het_row, osa_row, snspd_row],
        resolution: ResolutionMetrics {
            scan_edge_10_90_m: edge_width_10_90(scan_result),
            osa_edge_10_90_m: edge_width_10_90(osa_result),
            scan_fwhm_m: peak_fwhm(scan_result),
            osa_fwhm_m: peak_fwhm(osa_result),
        },
        winner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lam1550() -> Wavelength {
        Wavelength::from_nm(1550.0).unwrap()
    }

    #[test]
    fn gaussian_convolution_preserves_broad_plateau() {
        // A plateau much wider than the kernel passes through unchanged.
        let nodes = vec![(0.0, 0.0), (1e-12, 5.0), (100e-12, 5.0), (101e-12, 0.0)];
        let mid = convolve_gaussian_at(&nodes, 50e-12, 3e-12);
        assert_relative_eq!(mid, 5.0, max_relative = 1e-6);
    }

    #[test]
    fn gaussian_convolution_halves_at_step() {
        let nodes = vec![(-1.0, 0.0), (-1e-9, 0.0), (1e-9, 4.0), (1.0, 4.0)];
        let at_step = convolve_gaussian_at(&nodes, 0.0, 1e-3);
        assert_relative_eq!(at_step, 2.0, max_relative = 1e-3);
    }

    #[test]
    fn osa_emulation_rounds_a_sharp_edge_to_its_resolution() {
        let spectrum = Spectrum::top_hat_wl(lam1550(), 1e-9, 50e6, 1e-16).unwrap();
        let osa = grating_osa_emulate(&spectrum, 20e-12, -90.0).unwrap();
        let edge = edge_width_10_90(&osa).unwrap();
        // Gaussian FWHM w smears a step to a 10–90 width of 1.812·σ·… ≈ 1.088·w;
        // on a w-pitch grid the interpolated estimate lands in [w, 2w].
        assert!(
            (20e-12..=40e-12).contains(&edge),
            "edge width {edge:.3e} m outside [20, 40] pm"
        );
    }

    #[test]
    fn osa_emulation_floor_is_the_stated_sensitivity() {
        let spectrum = Spectrum::new(
            vec![
                lam1550().frequency().hz() - 1e9,
                lam1550().frequency().hz() + 1e9,
            ],
            vec![0.0, 0.0],
        )
        .unwrap();
        let osa = grating_osa_emulate(&spectrum, 20e-12, -90.0).unwrap();
        for p in &osa.power_dbm {
            assert!((p + 90.0).abs() < 1e-9);
        }
    }

    #[test]
    fn osa_emulation_broadens_narrow_line_to_resolution() {
        // A 100-kHz line is delta-like against a 20-pm instrument.
        let spectrum = Spectrum::line(lam1550(), 1e5, 1e-9).unwrap();
        let osa = grating_osa_emulate(&spectrum, 20e-12, -90.0).unwrap();
        let fwhm = peak_fwhm(&osa).unwrap();
        assert!(
            (15e-12..=45e-12).contains(&fwhm),
            "expected ~20 pm FWHM, got {fwhm:.3e} m"
        );
    }

    #[test]
    fn comparison_narrowband_laser_case() {
        // 100-kHz-wide laser at −89 dBm: heterodyne sees ~100 photons/mode,
        // the OSA margin over its −90 dBm floor is about +1 dB.
        let input = ScanInput::Laser {
            center: lam1550(),
            spec: LaserSpec {
                linewidth_hz: 1e5,
                ..LaserSpec::cw(dbm_to_watts(-89.0), 0.0)
            },
        };
        let scenario = SignalScenario::from_input(&input);
        let osa = grating_osa_emulate(&input.true_spectrum(), 20e-12, -90.0).unwrap();
        let fake_scan = osa.clone();
        let report = compare_sensitivity(&fake_scan, &osa, 100.0, 20e-12, &scenario).unwrap();
        let het = &report.rows[0];
        assert!(het.detectable, "heterodyne should detect: {}", het.note);
        let osa_row = &report.rows[1];
        assert!(osa_row.detectable);
        assert!(
            (osa_row.margin_db - 1.0).abs() < 0.3,
            "OSA margin {} dB, expected about 1 dB",
            osa_row.margin_db
        );
        assert_eq!(report.winner, "heterodyne");
    }

    #[test]
    fn comparison_dim_broadband_case() {
        // 1-nm ASE at 0.003 photons per mode: OSA and SNSPD see it, the
        // heterodyne spectrometer does not.
        let psd = 0.003 * PLANCK * lam1550().frequency().hz();
        let input = ScanInput::Ase(AseSpec::new(
            Spectrum::top_hat_wl(lam1550(), 1e-9, 50e6, psd).unwrap(),
        ));
        let scenario = SignalScenario::from_input(&input);
        let osa = grating_osa_emulate(&input.true_spectrum(), 20e-12, -90.0).unwrap();
        let report = compare_sensitivity(&osa, &osa, 100.0, 20e-12, &scenario).unwrap();
        assert!(
            !report.rows[0].detectable,
            "heterodyne must not detect 0.003/mode"
        );
        assert!(
            report.rows[1].detectable,
            "OSA should detect: {}",
            report.rows[1].note
        );
        assert!(
            report.rows[2].detectable,
            "SNSPD should detect: {}",
            report.rows[2].note
        );
        assert_eq!(report.winner, "snspd-filtered");
    }

    #[test]
    fn comparison_zero_power_case() {
        let input = ScanInput::Laser {
            center: lam1550(),
            spec: LaserSpec {
                linewidth_hz: 1e5,
                ..LaserSpec::cw(0.0, 0.0)
            },
        };
        let scenario = SignalScenario::from_input(&input);
        let spectrum = Spectrum::line(lam1550(), 1e5, 1e-30).unwrap();
        let osa = grating_osa_emulate(&spectrum, 20e-12, -90.0).unwrap();
        let report = compare_sensitivity(&osa, &osa, 100.0, 20e-12, &scenario).unwrap();
        assert!(report.rows.iter().all(|r| !r.detectable));
        assert_eq!(report.winner, "none");
    }
}
