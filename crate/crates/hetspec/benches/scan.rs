//! LO-sweep scans: parallel steps against the sequential fallback. The scan
//! itself always goes through `indexed_map`, so the comparison pins the
//! whole pipeline inside worker pools of different widths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hetspec::parallel::with_workers;
use hetspec::scan::{run_scan, ScanInput, ScanPlan};
use hetspec::signal::ase::AseSpec;
use hetspec::signal::detector::DetectorSpec;
use hetspec::signal::esa::EsaSpec;
use hetspec::signal::laser::LaserSpec;
use hetspec::spectrum::Spectrum;
use hetspec::units::{Wavelength, PLANCK};

fn bench_inputs() -> (ScanPlan, ScanInput) {
    let lam = Wavelength::from_nm(1550.0).unwrap();
    let psd = 50.0 * PLANCK * lam.frequency().hz();
    let input = ScanInput::Ase(AseSpec::new(
        Spectrum::top_hat_wl(lam, 0.2e-9, 30e6, psd).unwrap(),
    ));
    let plan = ScanPlan {
        lambda_start: Wavelength::from_nm(1549.97).unwrap(),
        lambda_stop: Wavelength::from_nm(1550.03).unwrap(),
        step_m: 1e-12,
        lo: LaserSpec::cw(1e-3, 0.0),
        detector: DetectorSpec::ideal(lam),
        esa: EsaSpec::single_point(6e6, 1e6, None, 5e-5),
        sample_rate_hz: 40e6,
        trials_per_step: 2,
    };
    (plan, input)
}

fn scan_sweep(c: &mut Criterion) {
    let (plan, input) = bench_inputs();
    let mut group = c.benchmark_group("scan_61_steps");
    group.sample_size(10);
    for &workers in &[1usize, 4, 8] {
        group.bench_with_input(BenchmarkId::new("workers", workers), &workers, |b, &w| {
            b.iter(|| with_workers(w, || run_scan(&plan, &input, 5).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, scan_sweep);
criterion_main!(benches);
