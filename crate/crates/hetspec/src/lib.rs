//! Simulation and analysis toolkit for shot-noise-limited heterodyne
//! spectrometry: closed-form sensitivity calculators, a time-domain
//! Monte-Carlo model of the full heterodyne signal chain, modal-brightness
//! models of dim light sources with detectability verdicts, and an LO-sweep
//! spectrometer emulation with a grating-OSA comparison.

pub mod config;
pub mod error;
pub mod modes;
pub mod parallel;
pub mod report;
pub mod scan;
pub mod signal;
pub mod sources;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
