//! Property tests for the algebraic layers: conversion round trips, scaling
//! laws, and the variance/photon-number dictionary.

use proptest::prelude::*;

use hetspec::modes::{
    db_above_shot, mode_count, photons_from_db_above_shot, photons_from_variance, photons_per_mode,
    rescale_sensitivity, variance_from_photons, ModeWindow, PhotonsPerMode, QuadratureStats,
    VarianceTolerances,
};
use hetspec::units::{
    bandwidth_freq_from_wl, bandwidth_wl_from_freq, dbm_to_watts, frequency_to_wavelength,
    watts_to_dbm, wavelength_to_frequency, Frequency, PowerSpectralDensity, Wavelength,
};

proptest! {
    #[test]
    fn dbm_round_trip(dbm in -200.0..100.0f64) {
        let w = dbm_to_watts(dbm);
        prop_assert!((watts_to_dbm(w) - dbm).abs() < 1e-9);
    }

    #[test]
    fn wavelength_frequency_identity(nm in 100.0..10_000.0f64) {
        let lam = Wavelength::from_nm(nm).unwrap();
        let back = frequency_to_wavelength(wavelength_to_frequency(lam)).unwrap();
        prop_assert!((back.meters() - lam.meters()).abs() / lam.meters() < 1e-12);
    }

    #[test]
    fn bandwidth_conversion_linear_in_dnu(dnu in 1.0..1e12f64, k in 1.0..100.0f64) {
        let lam = Wavelength::from_nm(1550.0).unwrap();
        let a = bandwidth_wl_from_freq(Frequency::from_hz(dnu).unwrap(), lam);
        let b = bandwidth_wl_from_freq(Frequency::from_hz(k * dnu).unwrap(), lam);
        prop_assert!((b - k * a).abs() <= 1e-12 * b.abs().max(a.abs()));
    }

    #[test]
    fn bandwidth_conversion_quadratic_in_lambda(nm in 500.0..3000.0f64) {
        let dnu = Frequency::from_hz(1e9).unwrap();
        let a = bandwidth_wl_from_freq(dnu, Wavelength::from_nm(nm).unwrap());
        let b = bandwidth_wl_from_freq(dnu, Wavelength::from_nm(2.0 * nm).unwrap());
        prop_assert!((b - 4.0 * a).abs() < 1e-9 * b);
    }

    #[test]
    fn bandwidth_round_trip(dl in 1e-16..1e-6f64, nm in 500.0..3000.0f64) {
        let lam = Wavelength::from_nm(nm).unwrap();
        let dnu = bandwidth_freq_from_wl(dl, lam).unwrap();
        let back = bandwidth_wl_from_freq(dnu, lam);
        prop_assert!((back - dl).abs() / dl < 1e-12);
    }

    #[test]
    fn variance_dictionary_round_trip(n in 0.0..1e6f64) {
        let var = variance_from_photons(PhotonsPerMode::new(n).unwrap());
        let back = photons_from_variance(
            &QuadratureStats::symmetric(var),
            &VarianceTolerances::default(),
        )
        .unwrap();
        prop_assert!((back.value() - n).abs() <= 1e-9 * n.max(1.0));
    }

    #[test]
    fn db_above_shot_round_trip(n in 0.0..1e4f64) {
        let db = db_above_shot(PhotonsPerMode::new(n).unwrap());
        prop_assert!((photons_from_db_above_shot(db) - n).abs() <= 1e-9 * n.max(1.0));
    }

    #[test]
    fn mode_count_bilinear(dnu in 1.0..1e12f64, dt in 1e-6..1e3f64) {
        let base = mode_count(&ModeWindow::new(Frequency::from_hz(dnu).unwrap(), dt).unwrap());
        let double_bw =
            mode_count(&ModeWindow::new(Frequency::from_hz(2.0 * dnu).unwrap(), dt).unwrap());
        let double_dt =
            mode_count(&ModeWindow::new(Frequency::from_hz(dnu).unwrap(), 2.0 * dt).unwrap());
        prop_assert!((double_bw - 2.0 * base).abs() <= 1e-12 * double_bw);
        prop_assert!((double_dt - 2.0 * base).abs() <= 1e-12 * double_dt);
    }

    #[test]
    fn photons_per_mode_scales_linearly(s in 1e-25..1e-15f64, eta in 0.01..1.0f64) {
        let nu = wavelength_to_frequency(Wavelength::from_nm(1550.0).unwrap());
        let one = photons_per_mode(PowerSpectralDensity::from_w_per_hz(s).unwrap(), nu, eta)
            .unwrap()
            .value();
        let three = photons_per_mode(
            PowerSpectralDensity::from_w_per_hz(3.0 * s).unwrap(),
            nu,
            eta,
        )
        .unwrap()
        .value();
        prop_assert!((three - 3.0 * one).abs() <= 1e-12 * three);
    }

    #[test]
    fn rescale_is_identity_on_equal_bandwidths(dbm in -150.0..0.0f64, bw in 1e-15..1e-9f64) {
        prop_assert_eq!(rescale_sensitivity(dbm, bw, bw).unwrap(), dbm);
    }

    #[test]
    fn rescale_composes(dbm in -150.0..0.0f64, a in 1e-15..1e-9f64, b in 1e-15..1e-9f64) {
        let direct = rescale_sensitivity(dbm, a, b).unwrap();
        let via = rescale_sensitivity(rescale_sensitivity(dbm, a, 1e-12).unwrap(), 1e-12, b).unwrap();
        prop_assert!((direct - via).abs() < 1e-9);
    }
}
