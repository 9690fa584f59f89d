//! Configuration ingestion: a strict suffixed-unit grammar ("1550nm",
//! "-64dBm", "120us") and the TOML schemas for scenario, simulation, and scan
//! files. Unknown keys are hard errors; quantities are strings parsed by the
//! grammar, so magnitude typos fail loudly instead of silently.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::modes::PhotonsPerMode;
use crate::scan::{ScanInput, ScanPlan};
use crate::signal::ase::AseSpec;
use crate::signal::detector::DetectorSpec;
use crate::signal::esa::EsaSpec;
use crate::signal::laser::LaserSpec;
use crate::signal::measure::{InputSpec, MeasureConfig, SimulationConfig};
use crate::sources::{
    quantum_dot_assessment, raman_output_psd, sfwm_photons_per_mode, spdc_photons_per_mode,
    verdict_with_threshold, AttenuationSign, DetectorNoiseModel, RamanChannel, SfwmSource,
    SpdcSource, Verdict, DEFAULT_COUNTING_THRESHOLD,
};
use crate::spectrum::Spectrum;
use crate::units::{dbm_to_watts, Wavelength, PLANCK};

/// A parsed quantity with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// Meters.
    Length(f64),
    /// Hertz.
    Frequency(f64),
    /// Watts.
    Power(f64),
    PowerDbm(f64),
    /// Seconds.
    Time(f64),
    Dimensionless(f64),
    Db(f64),
    DbcPerHz(f64),
}

/// A bandwidth may be stated in frequency or wavelength units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Hz(f64),
    Meters(f64),
}

impl Bandwidth {
    pub fn hz(&self, lambda: Wavelength) -> f64 {
        match *self {
            Bandwidth::Hz(v) => v,
            Bandwidth::Meters(m) => {
                crate::units::SPEED_OF_LIGHT * m / (lambda.meters() * lambda.meters())
            }
        }
    }

    pub fn meters(&self, lambda: Wavelength) -> f64 {
        match *self {
            Bandwidth::Meters(m) => m,
            Bandwidth::Hz(v) => {
                lambda.meters() * lambda.meters() * v / crate::units::SPEED_OF_LIGHT
            }
        }
    }
}

const UNIT_HINTS: &str =
    "wavelengths: fm pm nm um mm cm m km; frequencies: mHz Hz kHz MHz GHz THz; \
     powers: fW pW nW uW mW W kW dBm; times: fs ps ns us ms s; also dB, dBc/Hz, or a bare number";

/// Parse a suffixed quantity. The grammar is `<float><suffix>` with optional
/// whitespace before the suffix; suffixes are case-sensitive SI.
pub fn parse_quantity(input: &str) -> Result<Quantity> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::UnitParse(format!(
            "empty quantity (accepted units: {UNIT_HINTS})"
        )));
    }
    // Longest numeric prefix that parses as f64.
    let mut split = None;
    let boundaries: Vec<usize> = s
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(s.len()))
        .collect();
    for &i in boundaries.iter().rev() {
        if i == 0 {
            break;
        }
        if let Ok(v) = s[..i].parse::<f64>() {
            split = Some((&s[..i], v, s[i..].trim_start()));
            break;
        }
    }
    let (number_str, value, suffix) = split.ok_or_else(|| {
        Error::UnitParse(format!(
            "'{input}' does not start with a number (accepted units: {UNIT_HINTS})"
        ))
    })?;

    enum Dim {
        Length,
        Freq,
        Power,
        Time,
    }
    let (dim, exp): (Dim, i32) = match suffix {
        "" => return Ok(Quantity::Dimensionless(value)),
        "dBm" => return Ok(Quantity::PowerDbm(value)),
        "dB" => return Ok(Quantity::Db(value)),
        "dBc/Hz" => return Ok(Quantity::DbcPerHz(value)),
        "fm" => (Dim::Length, -15),
        "pm" => (Dim::Length, -12),
        "nm" => (Dim::Length, -9),
        "um" | "µm" => (Dim::Length, -6),
        "mm" => (Dim::Length, -3),
        "cm" => (Dim::Length, -2),
        "m" => (Dim::Length, 0),
        "km" => (Dim::Length, 3),
        "mHz" => (Dim::Freq, -3),
        "Hz" => (Dim::Freq, 0),
        "kHz" => (Dim::Freq, 3),
        "MHz" => (Dim::Freq, 6),
        "GHz" => (Dim::Freq, 9),
        "THz" => (Dim::Freq, 12),
        "fW" => (Dim::Power, -15),
        "pW" => (Dim::Power, -12),
        "nW" => (Dim::Power, -9),
        "uW" | "µW" => (Dim::Power, -6),
        "mW" => (Dim::Power, -3),
        "W" => (Dim::Power, 0),
        "kW" => (Dim::Power, 3),
        "fs" => (Dim::Time, -15),
        "ps" => (Dim::Time, -12),
        "ns" => (Dim::Time, -9),
        "us" | "µs" => (Dim::Time, -6),
        "ms" => (Dim::Time, -3),
        "s" => (Dim::Time, 0),
        other => {
            return Err(Error::UnitParse(format!(
                "unknown unit '{other}' in '{input}' (accepted units: {UNIT_HINTS})"
            )))
        }
    };
    let scaled = apply_si_exponent(number_str, value, exp);
    Ok(match dim {
        Dim::Length => Quantity::Length(scaled),
        Dim::Freq => Quantity::Frequency(scaled),
        Dim::Power => Quantity::Power(scaled),
        Dim::Time => Quantity::Time(scaled),
    })
}

/// Scale a parsed number by 10^exp with decimal semantics: "0.8" with exp
/// −15 re-parses as the literal 0.8e-15 rather than dividing the already
/// rounded 0.8.
fn apply_si_exponent(number_str: &str, value: f64, exp: i32) -> f64 {
    if exp == 0 {
        return value;
    }
    if !number_str.contains(['e', 'E']) {
        if let Ok(v) = format!("{number_str}e{exp}").parse::<f64>() {
            return v;
        }
    }
    if exp > 0 {
        value * 10f64.powi(exp)
    } else {
        value / 10f64.powi(-exp)
    }
}

impl Quantity {
    pub fn as_length_m(&self, what: &str) -> Result<f64> {
        match *self {
            Quantity::Length(v) => Ok(v),
            _ => Err(Error::UnitParse(format!(
                "{what} must be a length (e.g. \"1550nm\", \"20pm\")"
            ))),
        }
    }

    pub fn as_frequency_hz(&self, what: &str) -> Result<f64> {
        match *self {
            Quantity::Frequency(v) => Ok(v),
            _ => Err(Error::UnitParse(format!(
                "{what} must be a frequency (e.g. \"1MHz\", \"900Hz\")"
            ))),
        }
    }

    pub fn as_bandwidth(&self, what: &str) -> Result<Bandwidth> {
        match *self {
            Quantity::Frequency(v) => Ok(Bandwidth::Hz(v)),
            Quantity::Length(v) => Ok(Bandwidth::Meters(v)),
            _ => Err(Error::UnitParse(format!(
                "{what} must be a bandwidth in frequency (\"1kHz\") or wavelength (\"20pm\") units"
            ))),
        }
    }

    pub fn as_power_w(&self, what: &str) -> Result<f64> {
        match *self {
            Quantity::Power(v) => Ok(v),
            Quantity::PowerDbm(v) => Ok(dbm_to_watts(v)),
            _ => Err(Error::UnitParse(format!(
                "{what} must be a power (e.g. \"1mW\", \"-64dBm\")"
            ))),
        }
    }

    pub fn as_dbm(&self, what: &str) -> Result<f64> {
        match *self {
            Quantity::PowerDbm(v) => Ok(v),
            Quantity::Power(v) => Ok(crate::units::watts_to_dbm(v)),
            _ => Err(Error::UnitParse(format!(
                "{what} must be a power (e.g. \"-90dBm\")"
            ))),
        }
    }

    pub fn as_time_s(&self, what: &str) -> Result<f64> {
        match *self {
            Quantity::Time(v) => Ok(v),
            _ => Err(Error::UnitParse(format!(
                "{what} must be a time (e.g. \"1s\", \"120us\")"
            ))),
        }
    }
}

fn parse_field(value: &str, what: &str) -> Result<Quantity> {
    parse_quantity(value).map_err(|e| Error::UnitParse(format!("{what}: {e}")))
}

pub fn parse_wavelength(value: &str, what: &str) -> Result<Wavelength> {
    Wavelength::from_meters(parse_field(value, what)?.as_length_m(what)?)
}

pub fn parse_frequency_hz(value: &str, what: &str) -> Result<f64> {
    parse_field(value, what)?.as_frequency_hz(what)
}

pub fn parse_bandwidth(value: &str, what: &str) -> Result<Bandwidth> {
    parse_field(value, what)?.as_bandwidth(what)
}

pub fn parse_power_w(value: &str, what: &str) -> Result<f64> {
    parse_field(value, what)?.as_power_w(what)
}

pub fn parse_dbm(value: &str, what: &str) -> Result<f64> {
    parse_field(value, what)?.as_dbm(what)
}

pub fn parse_time_s(value: &str, what: &str) -> Result<f64> {
    parse_field(value, what)?.as_time_s(what)
}

fn toml_error(e: toml::de::Error) -> Error {
    Error::Config(e.to_string())
}

// ---------------------------------------------------------------------------
// Scenario files: sources and candidate detectors to judge against each other.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Reference wavelength, e.g. "1550nm".
    pub wavelength: String,
    /// Integration time, e.g. "1s".
    pub integration_time: String,
    /// Source/noise ratio a counting detector needs. Default 10.
    #[serde(default)]
    pub counting_threshold: Option<f64>,
    pub sources: Vec<SourceEntry>,
    pub detectors: Vec<DetectorEntry>,
}

/// Flat source entry: `kind` selects which fields apply; fields that do not
/// belong to the kind are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceEntry {
    pub kind: String,
    #[serde(default)]
    pub name: Option<String>,
    /// SPDC: pairs/s per mW per nm.
    #[serde(default)]
    pub pair_rate_per_mw_per_nm: Option<f64>,
    /// SPDC / Raman / SFWM pump power, e.g. "1mW".
    #[serde(default)]
    pub pump: Option<String>,
    /// SPDC emission bandwidth, e.g. "1nm".
    #[serde(default)]
    pub bandwidth: Option<String>,
    /// Raman / SFWM fiber length, km.
    #[serde(default)]
    pub length_km: Option<f64>,
    /// Raman cross-section, nm⁻¹·km⁻¹.
    #[serde(default)]
    pub cross_section_per_nm_km: Option<f64>,
    /// Raman attenuation, dB/km.
    #[serde(default)]
    pub attenuation_db_per_km: Option<f64>,
    /// Raman attenuation sign: "as_printed" (default) or "loss".
    #[serde(default)]
    pub attenuation_sign: Option<AttenuationSign>,
    /// SFWM nonlinear coefficient, W⁻¹·km⁻¹.
    #[serde(default)]
    pub gamma_per_w_km: Option<f64>,
    /// Quantum dot brightness override.
    #[serde(default)]
    pub photons_per_mode: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorEntry {
    pub kind: String,
    #[serde(default)]
    pub dark_rate_cps: Option<f64>,
    #[serde(default)]
    pub filter_bandwidth: Option<String>,
    #[serde(default)]
    pub sensitivity: Option<String>,
    #[serde(default)]
    pub resolution: Option<String>,
}

fn require<T: Copy>(field: Option<T>, kind: &str, name: &str) -> Result<T> {
    field.ok_or_else(|| Error::Config(format!("source kind '{kind}' requires field '{name}'")))
}

fn require_str<'a>(field: &'a Option<String>, kind: &str, name: &str) -> Result<&'a str> {
    field
        .as_deref()
        .ok_or_else(|| Error::Config(format!("'{kind}' entry requires field '{name}'")))
}

fn forbid<T>(field: &Option<T>, kind: &str, name: &str) -> Result<()> {
    if field.is_some() {
        return Err(Error::Config(format!(
            "field '{name}' does not apply to kind '{kind}'"
        )));
    }
    Ok(())
}

/// One row of the scenario verdict table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScenarioRow {
    pub source: String,
    pub photons_per_mode: f64,
    /// Same brightness under the one-significant-digit mode budget, where the
    /// model distinguishes the two.
    pub photons_per_mode_rounded: f64,
    pub detector: String,
    pub noise_per_mode: f64,
    pub snr: f64,
    pub detectable: bool,
    pub rationale: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ScenarioTable {
    pub wavelength_nm: f64,
    pub integration_s: f64,
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(toml_error)?;
        if file.sources.is_empty() {
            return Err(Error::Config("scenario lists no sources".into()));
        }
        if file.detectors.is_empty() {
            return Err(Error::Config("scenario lists no detectors".into()));
        }
        Ok(file)
    }

    pub fn evaluate(&self) -> Result<ScenarioTable> {
        let lambda = parse_wavelength(&self.wavelength, "wavelength")?;
        let dt = parse_time_s(&self.integration_time, "integration_time")?;
        let threshold = self
            .counting_threshold
            .unwrap_or(DEFAULT_COUNTING_THRESHOLD);

        let detectors: Vec<(String, DetectorNoiseModel)> = self
            .detectors
            .iter()
            .map(|d| d.build(lambda))
            .collect::<Result<_>>()?;

        let mut rows = Vec::new();
        for source in &self.sources {
            let (label, exact, rounded, qd) = source.brightness(lambda, dt)?;
            for (det_label, det) in &detectors {
                let v: Verdict = if qd {
                    // Quantum-dot entries carry their own boundary logic
                    // against the heterodyne shot floor.
                    match det {
                        DetectorNoiseModel::Heterodyne => {
                            quantum_dot_assessment(source.photons_per_mode)?
                        }
                        _ => verdict_with_threshold(
                            PhotonsPerMode::new(exact)?,
                            det,
                            lambda,
                            threshold,
                        )?,
                    }
                } else {
                    verdict_with_threshold(PhotonsPerMode::new(exact)?, det, lambda, threshold)?
                };
                rows.push(ScenarioRow {
                    source: label.clone(),
                    photons_per_mode: exact,
                    photons_per_mode_rounded: rounded,
                    detector: det_label.clone(),
                    noise_per_mode: v.detector_noise_per_mode,
                    snr: v.snr,
                    detectable: v.detectable,
                    rationale: v.rationale,
                });
            }
        }
        Ok(ScenarioTable {
            wavelength_nm: lambda.nm(),
            integration_s: dt,
            rows,
        })
    }
}

impl SourceEntry {
    /// (label, exact per-mode, rounded-mode per-mode, is_quantum_dot).
    fn brightness(&self, lambda: Wavelength, dt: f64) -> Result<(String, f64, f64, bool)> {
        let kind = self.kind.as_str();
        let label = self.name.clone().unwrap_or_else(|| kind.to_string());
        match kind {
            "spdc" => {
                forbid(&self.gamma_per_w_km, kind, "gamma_per_w_km")?;
                forbid(
                    &self.cross_section_per_nm_km,
                    kind,
                    "cross_section_per_nm_km",
                )?;
                forbid(&self.photons_per_mode, kind, "photons_per_mode")?;
                let source = SpdcSource {
                    pair_rate_density: require(
                        self.pair_rate_per_mw_per_nm,
                        kind,
                        "pair_rate_per_mw_per_nm",
                    )?,
                    pump_mw: parse_power_w(require_str(&self.pump, kind, "pump")?, "pump")? * 1e3,
                    bandwidth_nm: parse_bandwidth(
                        require_str(&self.bandwidth, kind, "bandwidth")?,
                        "bandwidth",
                    )?
                    .meters(lambda)
                        * 1e9,
                    center: lambda,
                };
                let b = spdc_photons_per_mode(&source, dt)?;
                Ok((label, b.exact, b.rounded_modes, false))
            }
            "raman" => {
                forbid(
                    &self.pair_rate_per_mw_per_nm,
                    kind,
                    "pair_rate_per_mw_per_nm",
                )?;
                forbid(&self.gamma_per_w_km, kind, "gamma_per_w_km")?;
                forbid(&self.photons_per_mode, kind, "photons_per_mode")?;
                let channel = RamanChannel {
                    pump_w: parse_power_w(require_str(&self.pump, kind, "pump")?, "pump")?,
                    length_km: require(self.length_km, kind, "length_km")?,
                    cross_section: require(
                        self.cross_section_per_nm_km,
                        kind,
                        "cross_section_per_nm_km",
                    )?,
                    attenuation_db_per_km: require(
                        self.attenuation_db_per_km,
                        kind,
                        "attenuation_db_per_km",
                    )?,
                    center: lambda,
                    attenuation_sign: self.attenuation_sign.unwrap_or_default(),
                };
                let out = raman_output_psd(&channel, dt)?;
                Ok((label, out.per_mode.exact, out.per_mode.rounded_modes, false))
            }
            "sfwm" => {
                forbid(
                    &self.pair_rate_per_mw_per_nm,
                    kind,
                    "pair_rate_per_mw_per_nm",
                )?;
                forbid(
                    &self.cross_section_per_nm_km,
                    kind,
                    "cross_section_per_nm_km",
                )?;
                forbid(&self.photons_per_mode, kind, "photons_per_mode")?;
                let source = SfwmSource {
                    gamma: require(self.gamma_per_w_km, kind, "gamma_per_w_km")?,
                    pump_w: parse_power_w(require_str(&self.pump, kind, "pump")?, "pump")?,
                    length_km: require(self.length_km, kind, "length_km")?,
                };
                let n = sfwm_photons_per_mode(&source)?.value();
                Ok((label, n, n, false))
            }
            "quantum_dot" => {
                forbid(
                    &self.pair_rate_per_mw_per_nm,
                    kind,
                    "pair_rate_per_mw_per_nm",
                )?;
                forbid(&self.pump, kind, "pump")?;
                let n = self.photons_per_mode.unwrap_or(1.0);
                Ok((label, n, n, true))
            }
            other => Err(Error::Config(format!(
                "unknown source kind '{other}' (expected spdc, raman, sfwm, quantum_dot)"
            ))),
        }
    }
}

impl DetectorEntry {
    fn build(&self, lambda: Wavelength) -> Result<(String, DetectorNoiseModel)> {
        match self.kind.as_str() {
            "heterodyne" => Ok(("heterodyne".into(), DetectorNoiseModel::Heterodyne)),
            "snspd" => {
                let dark = self.dark_rate_cps.ok_or_else(|| {
                    Error::Config("'snspd' entry requires 'dark_rate_cps'".into())
                })?;
                let bw = parse_bandwidth(
                    require_str(&self.filter_bandwidth, "snspd", "filter_bandwidth")?,
                    "filter_bandwidth",
                )?;
                Ok((
                    "snspd-filtered".into(),
                    DetectorNoiseModel::SnspdFiltered {
                        dark_rate_cps: dark,
                        filter_bw_m: bw.meters(lambda),
                    },
                ))
            }
            "grating_osa" => {
                let sens = parse_dbm(
                    require_str(&self.sensitivity, "grating_osa", "sensitivity")?,
                    "sensitivity",
                )?;
                let res = parse_bandwidth(
                    require_str(&self.resolution, "grating_osa", "resolution")?,
                    "resolution",
                )?;
                Ok((
                    "grating-osa".into(),
                    DetectorNoiseModel::GratingOsa {
                        sensitivity_dbm: sens,
                        resolution_m: res.meters(lambda),
                    },
                ))
            }
            other => Err(Error::Config(format!(
                "unknown detector kind '{other}' (expected heterodyne, snspd, grating_osa)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Simulation files.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub run: RunSection,
    #[serde(default)]
    pub input: Option<InputSection>,
    pub lo: LaserSection,
    pub detector: DetectorSection,
    pub esa: EsaSection,
    #[serde(default)]
    pub measure: Option<MeasureSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub reference_wavelength: String,
    pub sample_rate: String,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub kind: String,
    // laser fields
    #[serde(default)]
    pub power: Option<String>,
    #[serde(default)]
    pub detuning: Option<String>,
    #[serde(default)]
    pub linewidth: Option<String>,
    #[serde(default)]
    pub dither_span: Option<String>,
    #[serde(default)]
    pub dither_rate: Option<String>,
    #[serde(default)]
    pub rin_dbc_per_hz: Option<f64>,
    // ase fields (top-hat band)
    #[serde(default)]
    pub center_offset: Option<String>,
    #[serde(default)]
    pub width: Option<String>,
    #[serde(default)]
    pub edge: Option<String>,
    #[serde(default)]
    pub photons_per_mode: Option<f64>,
    #[serde(default)]
    pub psd_dbm: Option<String>,
    #[serde(default)]
    pub psd_bin: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub power: String,
    #[serde(default)]
    pub detuning: Option<String>,
    #[serde(default)]
    pub linewidth: Option<String>,
    #[serde(default)]
    pub dither_span: Option<String>,
    #[serde(default)]
    pub dither_rate: Option<String>,
    #[serde(default)]
    pub rin_dbc_per_hz: Option<f64>,
}

impl LaserSection {
    pub fn build(&self) -> Result<LaserSpec> {
        let spec = LaserSpec {
            power_w: parse_power_w(&self.power, "power")?,
            detuning_hz: match &self.detuning {
                Some(v) => parse_frequency_hz(v, "detuning")?,
                None => 0.0,
            },
            linewidth_hz: match &self.linewidth {
                Some(v) => parse_frequency_hz(v, "linewidth")?,
                None => 0.0,
            },
            dither_span_hz: match &self.dither_span {
                Some(v) => parse_frequency_hz(v, "dither_span")?,
                None => 0.0,
            },
            dither_rate_hz: match &self.dither_rate {
                Some(v) => parse_frequency_hz(v, "dither_rate")?,
                None => 0.0,
            },
            rin_dbc_per_hz: self.rin_dbc_per_hz,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    /// "ideal", "low_noise", or "stock".
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub quantum_efficiency: Option<f64>,
    #[serde(default)]
    pub responsivity_a_per_w: Option<f64>,
    #[serde(default)]
    pub gain_stages: Option<Vec<f64>>,
    #[serde(default)]
    pub output_lowpass: Option<String>,
    #[serde(default)]
    pub electronics_noise_a_per_rthz: Option<f64>,
    /// Alternative to an explicit noise density: place the LO shot floor this
    /// many dB above the electronics floor.
    #[serde(default)]
    pub shot_margin_db: Option<f64>,
    #[serde(default)]
    pub detection_bandwidth: Option<String>,
}

impl DetectorSection {
    pub fn build(&self, lambda: Wavelength, lo_power_w: f64) -> Result<DetectorSpec> {
        let mut det = match self.preset.as_deref() {
            None | Some("ideal") => DetectorSpec::ideal(lambda),
            Some("low_noise") => DetectorSpec::modified_low_noise(lambda),
            Some("stock") => DetectorSpec::stock(lambda),
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown detector preset '{other}' (expected ideal, low_noise, stock)"
                )))
            }
        };
        if let Some(eta) = self.quantum_efficiency {
            det.quantum_efficiency = eta;
        }
        if let Some(r) = self.responsivity_a_per_w {
            det.responsivity_a_per_w = r;
        }
        if let Some(g) = &self.gain_stages {
            det.gain_stages = g.clone();
        }
        if let Some(lp) = &self.output_lowpass {
            det.output_lowpass_hz = Some(parse_frequency_hz(lp, "output_lowpass")?);
        }
        if let Some(bw) = &self.detection_bandwidth {
            det.detection_bandwidth_hz = parse_frequency_hz(bw, "detection_bandwidth")?;
        }
        match (self.electronics_noise_a_per_rthz, self.shot_margin_db) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either electronics_noise_a_per_rthz or shot_margin_db, not both".into(),
                ))
            }
            (Some(n), None) => det.electronics_noise_a_per_rthz = n,
            (None, Some(margin)) => {
                det.electronics_noise_a_per_rthz =
                    det.electronics_noise_for_shot_margin(lo_power_w, margin)
            }
            (None, None) => {}
        }
        det.validate()?;
        Ok(det)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsaSection {
    pub center: String,
    #[serde(default)]
    pub span: Option<String>,
    pub rbw: String,
    #[serde(default)]
    pub vbw: Option<String>,
    #[serde(default)]
    pub points: Option<usize>,
    pub per_point: String,
}

impl EsaSection {
    pub fn build(&self) -> Result<EsaSpec> {
        let esa = EsaSpec {
            center_rf_hz: parse_frequency_hz(&self.center, "esa.center")?,
            span_hz: match &self.span {
                Some(v) => parse_frequency_hz(v, "esa.span")?,
                None => 0.0,
            },
            rbw_hz: parse_frequency_hz(&self.rbw, "esa.rbw")?,
            vbw_hz: match &self.vbw {
                Some(v) => Some(parse_frequency_hz(v, "esa.vbw")?),
                None => None,
            },
            sweep_points: self.points.unwrap_or(1),
            per_point_s: parse_time_s(&self.per_point, "esa.per_point")?,
        };
        esa.validate()?;
        Ok(esa)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    #[serde(default)]
    pub min_shot_margin_db: Option<f64>,
}

impl InputSection {
    fn build(&self, reference: Wavelength) -> Result<InputSpec> {
        match self.kind.as_str() {
            "dark" => Ok(InputSpec::Dark),
            "laser" => {
                let section = LaserSection {
                    power: self
                        .power
                        .clone()
                        .ok_or_else(|| Error::Config("laser input requires 'power'".into()))?,
                    detuning: self.detuning.clone(),
                    linewidth: self.linewidth.clone(),
                    dither_span: self.dither_span.clone(),
                    dither_rate: self.dither_rate.clone(),
                    rin_dbc_per_hz: self.rin_dbc_per_hz,
                };
                Ok(InputSpec::Laser(section.build()?))
            }
            "ase" => {
                let nu0 = reference.frequency().hz();
                let offset = match &self.center_offset {
                    Some(v) => parse_frequency_hz(v, "input.center_offset")?,
                    None => 0.0,
                };
                let width = parse_bandwidth(
                    self.width
                        .as_deref()
                        .ok_or_else(|| Error::Config("ase input requires 'width'".into()))?,
                    "input.width",
                )?
                .hz(reference);
                let edge = match &self.edge {
                    Some(v) => parse_frequency_hz(v, "input.edge")?,
                    None => (width / 100.0).max(1.0),
                };
                let psd = match (self.photons_per_mode, &self.psd_dbm) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config(
                            "give either photons_per_mode or psd_dbm, not both".into(),
                        ))
                    }
                    (Some(n), None) => n * PLANCK * nu0,
                    (None, Some(dbm)) => {
                        let bin = parse_bandwidth(
                            self.psd_bin.as_deref().ok_or_else(|| {
                                Error::Config("psd_dbm requires psd_bin (e.g. \"20pm\")".into())
                            })?,
                            "input.psd_bin",
                        )?
                        .hz(reference);
                        dbm_to_watts(parse_dbm(dbm, "input.psd_dbm")?) / bin
                    }
                    (None, None) => {
                        return Err(Error::Config(
                            "ase input requires photons_per_mode or psd_dbm".into(),
                        ))
                    }
                };
                let center = nu0 + offset;
                let half = width / 2.0;
                let shape = Spectrum::new(
                    vec![
                        center - half - edge / 2.0,
                        center - half + edge / 2.0,
                        center + half - edge / 2.0,
                        center + half + edge / 2.0,
                    ],
                    vec![0.0, psd, psd, 0.0],
                )?;
                Ok(InputSpec::Ase(AseSpec::new(shape)))
            }
            other => Err(Error::Config(format!(
                "unknown input kind '{other}' (expected dark, laser, ase)"
            ))),
        }
    }
}

impl SimulateFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(toml_error)
    }

    pub fn build(&self) -> Result<(SimulationConfig, Option<MeasureConfig>)> {
        let reference =
            parse_wavelength(&self.run.reference_wavelength, "run.reference_wavelength")?;
        let lo = self.lo.build()?;
        let detector = self.detector.build(reference, lo.power_w)?;
        let esa = self.esa.build()?;
        let input = match &self.input {
            None => InputSpec::Dark,
            Some(section) => section.build(reference)?,
        };
        let sim = SimulationConfig {
            reference,
            sample_rate_hz: parse_frequency_hz(&self.run.sample_rate, "run.sample_rate")?,
            input,
            lo,
            detector,
            esa,
            trials: self.run.trials,
        };
        let measure = self.measure.as_ref().map(|m| {
            let mut cfg = MeasureConfig::new(sim.clone());
            if let Some(margin) = m.min_shot_margin_db {
                cfg.min_shot_margin_db = margin;
            }
            cfg
        });
        Ok((sim, measure))
    }
}

// ---------------------------------------------------------------------------
// Scan plan and scan input files.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanFile {
    pub scan: ScanSection,
    pub lo: LaserSection,
    pub detector: DetectorSection,
    pub esa: ScanEsaSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub start: String,
    pub stop: String,
    pub step: String,
    pub sample_rate: String,
    #[serde(default = "default_trials")]
    pub trials_per_step: usize,
    pub dwell: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanEsaSection {
    pub center: String,
    pub rbw: String,
    #[serde(default)]
    pub vbw: Option<String>,
}

impl ScanFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(toml_error)
    }

    pub fn build(&self) -> Result<ScanPlan> {
        let start = parse_wavelength(&self.scan.start, "scan.start")?;
        let lo = self.lo.build()?;
        let detector = self.detector.build(start, lo.power_w)?;
        let esa = EsaSpec::single_point(
            parse_frequency_hz(&self.esa.center, "esa.center")?,
            parse_frequency_hz(&self.esa.rbw, "esa.rbw")?,
            match &self.esa.vbw {
                Some(v) => Some(parse_frequency_hz(v, "esa.vbw")?),
                None => None,
            },
            parse_time_s(&self.scan.dwell, "scan.dwell")?,
        );
        let plan = ScanPlan {
            lambda_start: start,
            lambda_stop: parse_wavelength(&self.scan.stop, "scan.stop")?,
            step_m: parse_bandwidth(&self.scan.step, "scan.step")?.meters(start),
            lo,
            detector,
            esa,
            sample_rate_hz: parse_frequency_hz(&self.scan.sample_rate, "scan.sample_rate")?,
            trials_per_step: self.scan.trials_per_step,
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanInputFile {
    pub input: ScanInputSection,
    #[serde(default)]
    pub compare: Option<CompareSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanInputSection {
    pub kind: String,
    pub center: String,
    // ase
    #[serde(default)]
    pub width: Option<String>,
    #[serde(default)]
    pub edge: Option<String>,
    #[serde(default)]
    pub photons_per_mode: Option<f64>,
    #[serde(default)]
    pub psd_dbm: Option<String>,
    #[serde(default)]
    pub psd_bin: Option<String>,
    // laser
    #[serde(default)]
    pub power: Option<String>,
    #[serde(default)]
    pub linewidth: Option<String>,
    #[serde(default)]
    pub dither_span: Option<String>,
    #[serde(default)]
    pub dither_rate: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(default = "default_dark_rate")]
    pub snspd_dark_rate_cps: f64,
    #[serde(default = "default_filter_bw")]
    pub snspd_filter_bandwidth: String,
    #[serde(default = "default_osa_sensitivity")]
    pub osa_sensitivity: String,
    #[serde(default = "default_osa_resolution")]
    pub osa_resolution: String,
}

fn default_dark_rate() -> f64 {
    100.0
}
fn default_filter_bw() -> String {
    "20pm".into()
}
fn default_osa_sensitivity() -> String {
    "-90dBm".into()
}
fn default_osa_resolution() -> String {
    "20pm".into()
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            snspd_dark_rate_cps: default_dark_rate(),
            snspd_filter_bandwidth: default_filter_bw(),
            osa_sensitivity: default_osa_sensitivity(),
            osa_resolution: default_osa_resolution(),
        }
    }
}

impl ScanInputFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(toml_error)
    }

    pub fn build(&self) -> Result<ScanInput> {
        let section = &self.input;
        let center = parse_wavelength(&section.center, "input.center")?;
        match section.kind.as_str() {
            "ase" => {
                let width = parse_bandwidth(
                    section
                        .width
                        .as_deref()
                        .ok_or_else(|| Error::Config("ase input requires 'width'".into()))?,
                    "input.width",
                )?
                .hz(center);
                let edge = match &section.edge {
                    Some(v) => parse_frequency_hz(v, "input.edge")?,
                    None => width / 1000.0,
                };
                let psd = match (section.photons_per_mode, &section.psd_dbm) {
                    (Some(n), None) => n * PLANCK * center.frequency().hz(),
                    (None, Some(dbm)) => {
                        let bin = parse_bandwidth(
                            section
                                .psd_bin
                                .as_deref()
                                .ok_or_else(|| Error::Config("psd_dbm requires psd_bin".into()))?,
                            "input.psd_bin",
                        )?
                        .hz(center);
                        dbm_to_watts(parse_dbm(dbm, "input.psd_dbm")?) / bin
                    }
                    _ => {
                        return Err(Error::Config(
                            "ase input requires exactly one of photons_per_mode or psd_dbm".into(),
                        ))
                    }
                };
                Ok(ScanInput::Ase(AseSpec::new(Spectrum::top_hat(
                    center, width, edge, psd,
                )?)))
            }
            "laser" => {
                let spec = LaserSpec {
                    power_w: parse_power_w(
                        section
                            .power
                            .as_deref()
                            .ok_or_else(|| Error::Config("laser input requires 'power'".into()))?,
                        "input.power",
                    )?,
                    detuning_hz: 0.0,
                    linewidth_hz: match &section.linewidth {
                        Some(v) => parse_frequency_hz(v, "input.linewidth")?,
                        None => 0.0,
                    },
                    dither_span_hz: match &section.dither_span {
                        Some(v) => parse_frequency_hz(v, "input.dither_span")?,
                        None => 0.0,
                    },
                    dither_rate_hz: match &section.dither_rate {
                        Some(v) => parse_frequency_hz(v, "input.dither_rate")?,
                        None => 0.0,
                    },
                    rin_dbc_per_hz: None,
                };
                spec.validate()?;
                Ok(ScanInput::Laser { center, spec })
            }
            other => Err(Error::Config(format!(
                "unknown input kind '{other}' (expected ase, laser)"
            ))),
        }
    }

    pub fn compare(&self) -> CompareSection {
        self.compare.clone().unwrap_or_default()
    }
}

/// Bundled scenario reproducing the dim-source survey table.
pub const PAPER_SEC4_SCENARIO: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../scenarios/paper_sec4.toml"
));
