//! Result persistence: CSV emission with a metadata header block, verdict
//! tables in CSV/JSON/pretty form, and the per-run record that makes every
//! output reproducible from its config and seed.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ScenarioRow, ScenarioTable};
use crate::error::Result;
use crate::scan::{ComparisonReport, OpticalSpectrumResult};
use crate::signal::esa::RfSpectrum;

/// Version stamp for the CSV/JSON schemas this module writes.
pub const SCHEMA_VERSION: &str = "1";

fn header_block(command: &str, seed: Option<u64>, extra: &[(String, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# hetspec-csv v{SCHEMA_VERSION}");
    let _ = writeln!(out, "# command: {command}");
    if let Some(seed) = seed {
        let _ = writeln!(out, "# seed: {seed}");
    }
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out
}

/// RF spectrum as CSV: metadata header block, then frequency_hz,power_dbm.
pub fn rf_spectrum_csv(spectrum: &RfSpectrum, command: &str) -> String {
    let meta = &spectrum.metadata;
    let mut extra = vec![
        ("rbw_hz".to_string(), format!("{}", meta.rbw_hz)),
        (
            "vbw_hz".to_string(),
            meta.vbw_hz
                .map(|v| format!("{v}"))
                .unwrap_or_else(|| "none".into()),
        ),
        ("enbw_hz".to_string(), format!("{}", meta.enbw_hz)),
        ("per_point_s".to_string(), format!("{}", meta.per_point_s)),
        ("detector_mode".to_string(), meta.detector_mode.clone()),
        ("load_ohms".to_string(), format!("{}", meta.load_ohms)),
    ];
    extra.sort();
    let mut out = header_block(command, meta.seed, &extra);
    out.push_str("frequency_hz,power_dbm\n");
    for (f, p) in spectrum.frequency_hz.iter().zip(&spectrum.power_dbm) {
        let _ = writeln!(out, "{f:.6},{p:.6}");
    }
    out
}

/// Optical spectrum as CSV: metadata header block, then
/// wavelength_nm,power_dbm.
pub fn optical_spectrum_csv(result: &OpticalSpectrumResult, command: &str) -> String {
    let mut extra = vec![
        (
            "effective_resolution_m".to_string(),
            format!("{:.6e}", result.effective_resolution_m),
        ),
        (
            "effective_resolution_hz".to_string(),
            format!("{:.6e}", result.effective_resolution_hz),
        ),
        (
            "sideband_convention".to_string(),
            result.metadata.sideband_convention.clone(),
        ),
        ("lineshape".to_string(), result.metadata.lineshape.clone()),
        (
            "trials_per_step".to_string(),
            format!("{}", result.metadata.trials_per_step),
        ),
    ];
    for (i, w) in result.warnings.iter().enumerate() {
        extra.push((format!("warning_{i}"), w.clone()));
    }
    extra.sort();
    let mut out = header_block(command, Some(result.seed), &extra);
    out.push_str("wavelength_nm,power_dbm\n");
    for (w, p) in result.wavelength_m.iter().zip(&result.power_dbm) {
        let _ = writeln!(out, "{:.9},{p:.6}", w * 1e9);
    }
    out
}

/// Verdict table as CSV.
pub fn scenario_csv(table: &ScenarioTable, command: &str) -> String {
    let extra = vec![
        (
            "wavelength_nm".to_string(),
            format!("{}", table.wavelength_nm),
        ),
        (
            "integration_s".to_string(),
            format!("{}", table.integration_s),
        ),
    ];
    let mut out = header_block(command, None, &extra);
    out.push_str(
        "source,photons_per_mode,photons_per_mode_rounded,detector,noise_per_mode,snr,detectable\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{:.6e},{:.6e},{},{:.6e},{:.6e},{}",
            r.source,
            r.photons_per_mode,
            r.photons_per_mode_rounded,
            r.detector,
            r.noise_per_mode,
            r.snr,
            r.detectable
        );
    }
    out
}

/// Verdict table as an aligned text table.
pub fn scenario_pretty(table: &ScenarioTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario at {:.3} nm, {:.3} s integration",
        table.wavelength_nm, table.integration_s
    );
    let _ = writeln!(
        out,
        "{:<14} {:>14} {:>14} {:<16} {:>14} {:>12}  verdict",
        "source", "photons/mode", "(rounded N)", "detector", "noise/mode", "snr"
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:<14} {:>14.3e} {:>14.3e} {:<16} {:>14.3e} {:>12.3e}  {}",
            r.source,
            r.photons_per_mode,
            r.photons_per_mode_rounded,
            r.detector,
            r.noise_per_mode,
            r.snr,
            if r.detectable {
                "detectable"
            } else {
                "not detectable"
            }
        );
    }
    out
}

pub fn scenario_json(table: &ScenarioTable) -> String {
    serde_json::to_string_pretty(table).expect("table serializes")
}

pub fn comparison_json(report: &ComparisonReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn comparison_pretty(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "signal: {:.3e} Hz bandwidth, {:.2} dBm total",
        report.scenario_bandwidth_hz, report.scenario_power_dbm
    );
    let _ = writeln!(
        out,
        "{:<16} {:>20} {:>12}  verdict",
        "instrument", "min detectable dBm", "margin dB"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<16} {:>20.2} {:>12.2}  {}  ({})",
            r.instrument,
            r.min_detectable_dbm,
            r.margin_db,
            if r.detectable { "detects" } else { "blind" },
            r.note
        );
    }
    let pm = |v: Option<f64>| match v {
        Some(m) => format!("{:.3} pm", m * 1e12),
        None => "n/a".to_string(),
    };
    let _ = writeln!(
        out,
        "10-90% edge width: scan {}, grating {}",
        pm(report.resolution.scan_edge_10_90_m),
        pm(report.resolution.osa_edge_10_90_m)
    );
    let _ = writeln!(
        out,
        "peak FWHM: scan {}, grating {}",
        pm(report.resolution.scan_fwhm_m),
        pm(report.resolution.osa_fwhm_m)
    );
    let _ = writeln!(out, "winner: {}", report.winner);
    out
}

/// Record of a run that wrote outputs: re-running the recorded command with
/// the recorded config and seed reproduces the outputs byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub config_echo: String,
    pub master_seed: u64,
    pub toolkit_version: String,
    pub outputs: Vec<String>,
    pub wall_clock_s: f64,
}

impl RunRecord {
    pub fn new(command: String, config_echo: String, master_seed: u64) -> Self {
        RunRecord {
            command,
            config_echo,
            master_seed,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(
            path,
            serde_json::to_string_pretty(self).expect("record serializes"),
        )?;
        Ok(())
    }
}

/// Verdict rows for machine consumption.
pub fn scenario_rows_json(rows: &[ScenarioRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ScenarioFile, PAPER_SEC4_SCENARIO};
    use crate::signal::esa::{EsaMetadata, RfSpectrum};

    fn sample_spectrum() -> RfSpectrum {
        RfSpectrum {
            frequency_hz: vec![1e6, 2e6, 3e6],
            power_dbm: vec![-70.0, -65.5, -70.2],
            metadata: EsaMetadata {
                center_rf_hz: 2e6,
                span_hz: 2e6,
                rbw_hz: 1e5,
                vbw_hz: Some(1e3),
                sweep_points: 3,
                per_point_s: 1e-4,
                enbw_hz: 1.0644670194312262e5,
                load_ohms: 50.0,
                detector_mode: "average".into(),
                seed: Some(7),
            },
        }
    }

    #[test]
    fn csv_has_header_block_and_rows() {
        let csv = rf_spectrum_csv(&sample_spectrum(), "hetspec simulate cfg.toml --seed 7");
        assert!(csv.starts_with("# hetspec-csv v1\n"));
        assert!(csv.contains("# seed: 7\n"));
        assert!(csv.contains("# rbw_hz: 100000\n"));
        assert!(csv.contains("frequency_hz,power_dbm\n"));
        assert!(csv.trim_end().lines().count() > 10);
        assert!(csv.contains("2000000.000000,-65.500000"));
    }

    #[test]
    fn csv_is_byte_stable() {
        let a = rf_spectrum_csv(&sample_spectrum(), "cmd");
        let b = rf_spectrum_csv(&sample_spectrum(), "cmd");
        assert_eq!(a, b);
    }

    #[test]
    fn scenario_formats_render() {
        let table = ScenarioFile::parse(PAPER_SEC4_SCENARIO)
            .unwrap()
            .evaluate()
            .unwrap();
        let csv = scenario_csv(&table, "hetspec sources paper_sec4");
        assert!(csv.contains("spdc"));
        assert!(csv.contains("snspd-filtered"));
        let pretty = scenario_pretty(&table);
        assert!(pretty.contains("not detectable"));
        let json = scenario_json(&table);
        assert!(json.contains("\"detectable\""));
    }
}
