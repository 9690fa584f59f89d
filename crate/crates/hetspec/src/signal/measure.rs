//! Whole-chain simulation runs: a configured input + LO + detector + ESA per
//! trial, trial averaging, and the photons-per-mode measurement procedure
//! (attenuated input against an LO-only shot baseline).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::modes::photons_from_db_above_shot;
use crate::parallel::indexed_map;
use crate::signal::ase::{synth_ase, AseSpec};
use crate::signal::detector::{balanced_detect, DetectorSpec};
use crate::signal::esa::{esa_measure, EsaSpec, RfSpectrum};
use crate::signal::laser::{synth_laser, LaserSpec};
use crate::signal::mixer::mix_50_50;
use crate::signal::{seeds, FieldTrace};
use crate::spectrum::Spectrum;
use crate::units::{watts_to_dbm, Wavelength, PLANCK};

/// What enters the signal port.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum InputSpec {
    /// Nothing: LO-only baseline.
    Dark,
    Laser(LaserSpec),
    Ase(AseSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Global optical reference; envelope offsets are relative to this.
    pub reference: Wavelength,
    pub sample_rate_hz: f64,
    pub input: InputSpec,
    pub lo: LaserSpec,
    pub detector: DetectorSpec,
    pub esa: EsaSpec,
    /// Trials averaged into the output spectrum.
    pub trials: usize,
}

impl SimulationConfig {
    /// Per-trial trace duration: the full ESA sweep.
    pub fn duration_s(&self) -> f64 {
        self.esa.sweep_time_s()
    }

    /// Non-fatal conditions worth recording next to the outputs.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let InputSpec::Ase(ase) = &self.input {
            let frac = ase.in_band_fraction(self.reference.frequency(), self.sample_rate_hz);
            if frac < 0.999 {
                out.push(format!(
                    "input band wider than the simulated window: {:.2e} of its power is in band",
                    frac
                ));
            }
        }
        if self.esa.center_rf_hz > self.detector.detection_bandwidth_hz {
            out.push(format!(
                "ESA tuned to {:.3e} Hz, beyond the detector bandwidth {:.3e} Hz",
                self.esa.center_rf_hz, self.detector.detection_bandwidth_hz
            ));
        }
        if let Some(vbw) = self.esa.vbw_hz {
            if vbw * self.esa.per_point_s < 1.0 {
                out.push(format!(
                    "video filter ({vbw} Hz) does not settle within the {} s dwell; \
                     absolute levels read low",
                    self.esa.per_point_s
                ));
            }
        }
        out
    }
}

fn synth_input(
    input: &InputSpec,
    duration_s: f64,
    sample_rate: f64,
    reference: Wavelength,
    seed: u64,
) -> Result<FieldTrace> {
    match input {
        InputSpec::Dark => {
            let n = crate::signal::trace_len(duration_s, sample_rate)?;
            Ok(FieldTrace::zeros(n, sample_rate))
        }
        InputSpec::Laser(spec) => synth_laser(spec, duration_s, sample_rate, seed),
        InputSpec::Ase(spec) => {
            synth_ase(spec, duration_s, sample_rate, reference.frequency(), seed)
        }
    }
}

fn run_trial_with_input(
    cfg: &SimulationConfig,
    input: &InputSpec,
    trial_seed: u64,
) -> Result<RfSpectrum> {
    let duration = cfg.duration_s();
    let lo = synth_laser(
        &cfg.lo,
        duration,
        cfg.sample_rate_hz,
        seeds::derive(trial_seed, seeds::STAGE_LO),
    )?;
    let sig = synth_input(
        input,
        duration,
        cfg.sample_rate_hz,
        cfg.reference,
        seeds::derive(trial_seed, seeds::STAGE_SIGNAL),
    )?;
    let (arm1, arm2) = mix_50_50(&sig, &lo)?;
    let detected = balanced_detect(
        &arm1,
        &arm2,
        &cfg.detector,
        seeds::derive(trial_seed, seeds::STAGE_DETECTOR),
    )?;
    let mut spectrum = esa_measure(&detected, &cfg.esa)?;
    spectrum.metadata.seed = Some(trial_seed);
    Ok(spectrum)
}

/// One full pass through the chain for one trial seed.
pub fn run_trial(cfg: &SimulationConfig, trial_seed: u64) -> Result<RfSpectrum> {
    run_trial_with_input(cfg, &cfg.input, trial_seed)
}

/// Run `cfg.trials` independent trials (substreams of `master_seed`) and
/// average their linear power point-wise.
pub fn simulate_spectrum(cfg: &SimulationConfig, master_seed: u64) -> Result<RfSpectrum> {
    let trials = cfg.trials.max(1);
    let results = indexed_map(trials, |i| {
        run_trial(cfg, seeds::derive(master_seed, i as u64))
    });
    let mut spectra = Vec::with_capacity(trials);
    for r in results {
        spectra.push(r?);
    }
    let mut avg = RfSpectrum::average(&spectra);
    avg.metadata.seed = Some(master_seed);
    Ok(avg)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub sim: SimulationConfig,
    /// Required shot-over-electronics margin (dB) before the run counts as
    /// shot-noise limited.
    pub min_shot_margin_db: f64,
}

impl MeasureConfig {
    pub fn new(sim: SimulationConfig) -> Self {
        MeasureConfig {
            sim,
            min_shot_margin_db: 10.0,
        }
    }
}

/// Outcome of a photons-per-mode measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureResult {
    /// Variance-ratio estimate: power(input on)/power(LO only) − 1.
    pub measured_n: f64,
    /// Photon-number prediction from the configured input PSD folded across
    /// both detection sidebands, times the detector's total efficiency.
    pub predicted_n: f64,
    /// 10·log10 of the measured power ratio at the detection frequency.
    pub db_above_shot: f64,
    pub shot_limited: bool,
    /// Shot floor over electronics floor, dB (infinite for zero electronics
    /// noise).
    pub shot_margin_db: f64,
    pub signal_dbm: f64,
    pub baseline_dbm: f64,
    pub trials: usize,
    pub warnings: Vec<String>,
}

/// Photon number the configured scenario should measure. The RF bin at f
/// sees the optical PSD at reference ± f, so the prediction folds both
/// sidebands and applies the detector's total quantum efficiency.
pub fn predicted_photons_per_mode(cfg: &SimulationConfig) -> f64 {
    let nu0 = cfg.reference.frequency().hz();
    let f_c = cfg.esa.center_rf_hz;
    let eta = cfg.detector.total_quantum_efficiency(cfg.reference);
    let h_nu = PLANCK * nu0;
    match &cfg.input {
        InputSpec::Dark => 0.0,
        InputSpec::Ase(ase) => {
            let folded = ase.shape.psd_at(nu0 + f_c) + ase.shape.psd_at(nu0 - f_c);
            eta * folded / h_nu
        }
        InputSpec::Laser(laser) => {
            // A narrow line contributes only when its beat lands in the RBW;
            // weight by the Gaussian response and spread over the ENBW.
            let beat = (laser.detuning_hz - cfg.lo.detuning_hz).abs();
            let x = (beat - f_c) / cfg.esa.rbw_hz;
            let w = (-4.0 * std::f64::consts::LN_2 * x * x).exp();
            eta * laser.power_w * w / (h_nu * cfg.esa.enbw_hz())
        }
    }
}

/// Measure photons per mode: run the configured input against an LO-only
/// baseline (same per-trial seeds, paired for variance reduction), take the
/// linear power ratio at the detection frequency, and convert through the
/// 10·log10(n+1) dictionary.
pub fn measure_photons_per_mode(cfg: &MeasureConfig, master_seed: u64) -> Result<MeasureResult> {
    let sim = &cfg.sim;
    let trials = sim.trials.max(1);
    let f_c = sim.esa.center_rf_hz;

    let results = indexed_map(trials, |i| {
        let trial_seed = seeds::derive(master_seed, i as u64);
        let on = run_trial_with_input(sim, &sim.input, trial_seed)?;
        let off = run_trial_with_input(sim, &InputSpec::Dark, trial_seed)?;
        Ok::<(f64, f64), crate::error::Error>((on.power_watts_at(f_c), off.power_watts_at(f_c)))
    });

    let mut p_on = 0.0;
    let mut p_off = 0.0;
    for r in results {
        let (on, off) = r?;
        p_on += on;
        p_off += off;
    }
    p_on /= trials as f64;
    p_off /= trials as f64;

    let ratio = p_on / p_off;
    let db = 10.0 * ratio.log10();
    let measured_n = photons_from_db_above_shot(db);

    let shot = sim.detector.shot_psd(sim.lo.power_w);
    let elec = sim.detector.electronics_psd();
    let shot_margin_db = if elec > 0.0 {
        10.0 * (shot / elec).log10()
    } else {
        f64::INFINITY
    };
    let shot_limited = shot_margin_db >= cfg.min_shot_margin_db;

    let mut warnings = sim.warnings();
    if !shot_limited {
        warnings.push(format!(
            "not shot-noise limited: shot floor is only {shot_margin_db:.1} dB above the \
             electronics floor (need {:.1} dB)",
            cfg.min_shot_margin_db
        ));
    }

    Ok(MeasureResult {
        measured_n,
        predicted_n: predicted_photons_per_mode(sim),
        db_above_shot: db,
        shot_limited,
        shot_margin_db,
        signal_dbm: watts_to_dbm(p_on),
        baseline_dbm: watts_to_dbm(p_off),
        trials,
        warnings,
    })
}

/// Canonical shot-limit scenario: a single-sideband ASE top-hat spanning the
/// detection frequency, tuned so the input carries `n_target` photons per
/// mode, against a clean 1-mW CW LO on an ideal receiver with `efficiency`.
pub fn shot_limit_scenario(
    lambda: Wavelength,
    n_target: f64,
    efficiency: f64,
    trials: usize,
) -> MeasureConfig {
    let nu0 = lambda.frequency().hz();
    let psd = n_target * PLANCK * nu0;
    let input = if psd > 0.0 {
        // Band on one side of the LO only: [2, 14] MHz offsets, flat across
        // the 6-MHz detection frequency, dark at the −6 MHz image.
        InputSpec::Ase(AseSpec::new(
            Spectrum::new(
                vec![nu0 + 2.0e6, nu0 + 2.2e6, nu0 + 13.8e6, nu0 + 14.0e6],
                vec![0.0, psd, psd, 0.0],
            )
            .expect("static grid"),
        ))
    } else {
        InputSpec::Dark
    };
    let mut detector = DetectorSpec::ideal(lambda);
    detector.quantum_efficiency = efficiency;
    MeasureConfig::new(SimulationConfig {
        reference: lambda,
        sample_rate_hz: 40e6,
        input,
        lo: LaserSpec::cw(1e-3, 0.0),
        detector,
        esa: EsaSpec::single_point(6e6, 1e6, None, 1.2e-4),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam1550() -> Wavelength {
        Wavelength::from_nm(1550.0).unwrap()
    }

    #[test]
    fn predicted_matches_target_for_scenario() {
        for (n, eta) in [(1.0, 1.0), (0.5, 1.0), (1.0, 0.8), (0.0, 1.0)] {
            let cfg = shot_limit_scenario(lam1550(), n, eta, 1);
            let pred = predicted_photons_per_mode(&cfg.sim);
            assert!(
                (pred - n * eta).abs() < 1e-9,
                "target {n} eta {eta}: predicted {pred}"
            );
        }
    }

    #[test]
    fn dark_scenario_measures_zero_db() {
        let cfg = shot_limit_scenario(lam1550(), 0.0, 1.0, 24);
        let res = measure_photons_per_mode(&cfg, 12345).unwrap();
        assert!(
            res.db_above_shot.abs() < 0.2,
            "dark input measured {} dB above shot",
            res.db_above_shot
        );
        assert!(res.shot_limited);
    }

    #[test]
    fn unity_photon_per_mode_measures_three_db() {
        let cfg = shot_limit_scenario(lam1550(), 1.0, 1.0, 40);
        let res = measure_photons_per_mode(&cfg, 999).unwrap();
        assert!(
            (res.db_above_shot - 3.0103).abs() < 0.3,
            "measured {} dB, expected 3.0",
            res.db_above_shot
        );
        assert!((res.predicted_n - 1.0).abs() < 1e-9);
    }

    #[test]
    fn not_shot_limited_flagged() {
        let mut cfg = shot_limit_scenario(lam1550(), 1.0, 1.0, 4);
        // Electronics floor only 3 dB under shot.
        cfg.sim.detector.electronics_noise_a_per_rthz = cfg
            .sim
            .detector
            .electronics_noise_for_shot_margin(1e-3, 3.0);
        let res = measure_photons_per_mode(&cfg, 5).unwrap();
        assert!(!res.shot_limited);
        assert!((res.shot_margin_db - 3.0).abs() < 0.1);
        assert!(res
            .warnings
            .iter()
            .any(|w| w.contains("not shot-noise limited")));
    }

    #[test]
    fn simulate_spectrum_is_deterministic_per_seed() {
        let mut cfg = shot_limit_scenario(lam1550(), 1.0, 1.0, 3).sim;
        cfg.esa = EsaSpec {
            center_rf_hz: 6e6,
            span_hz: 8e6,
            rbw_hz: 1e6,
            vbw_hz: None,
            sweep_points: 9,
            per_point_s: 5e-5,
        };
        let a = simulate_spectrum(&cfg, 42).unwrap();
        let b = simulate_spectrum(&cfg, 42).unwrap();
        assert_eq!(a.power_dbm, b.power_dbm);
        let c = simulate_spectrum(&cfg, 43).unwrap();
        assert_ne!(a.power_dbm, c.power_dbm);
    }
}
