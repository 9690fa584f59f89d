//! Monte-Carlo trial batches: rayon data-parallel map against the sequential
//! fallback, at the trial counts the measurement procedure actually uses.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hetspec::parallel::{indexed_map, indexed_map_seq};
use hetspec::signal::measure::{run_trial, shot_limit_scenario};
use hetspec::signal::seeds;
use hetspec::units::Wavelength;

fn trial_batch(c: &mut Criterion) {
    let lam = Wavelength::from_nm(1550.0).unwrap();
    let cfg = shot_limit_scenario(lam, 1.0, 1.0, 1).sim;

    let mut group = c.benchmark_group("trial_batch");
    group.sample_size(10);
    for &trials in &[8usize, 32] {
        group.bench_with_input(BenchmarkId::new("parallel", trials), &trials, |b, &n| {
            b.iter(|| {
                indexed_map(n, |i| {
                    run_trial(&cfg, seeds::derive(42, i as u64))
                        .unwrap()
                        .power_watts_at(6e6)
                })
            })
        });
        group.bench_with_input(BenchmarkId::new("sequential", trials), &trials, |b, &n| {
            b.iter(|| {
                indexed_map_seq(n, |i| {
                    run_trial(&cfg, seeds::derive(42, i as u64))
                        .unwrap()
                        .power_watts_at(6e6)
                })
            })
        });
    }
    group.finish();
}

fn single_trial(c: &mut Criterion) {
    let lam = Wavelength::from_nm(1550.0).unwrap();
    let cfg = shot_limit_scenario(lam, 1.0, 1.0, 1).sim;
    c.bench_function("single_trial", |b| {
        b.iter(|| run_trial(&cfg, 7).unwrap().power_watts_at(6e6))
    });
}

criterion_group!(benches, trial_batch, single_trial);
criterion_main!(benches);
