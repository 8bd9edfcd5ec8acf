//! Throughput of the raw acceleration laws on a fixed observation grid.

use carflow::models::{
    derbel_acceleration, idm_acceleration, krauss_acceleration, risk_factor, seidm_acceleration,
};
use carflow::{ModelConfig, Observation};
use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

fn observation_grid() -> Vec<Observation> {
    let mut obs = Vec::new();
    let mut gap = 5.0;
    while gap <= 150.0 {
        let mut v = 2.0;
        while v <= 26.0 {
            obs.push(Observation::new(gap, v, (v - 3.0).max(0.0)));
            obs.push(Observation::new(gap, v, v));
            v += 4.0;
        }
        gap += 7.25;
    }
    obs
}

fn bench_laws(c: &mut Criterion) {
    let cfg = ModelConfig::default();
    let obs = observation_grid();
    let mut g = c.benchmark_group("laws");
    g.throughput(Throughput::Elements(obs.len() as u64));
    g.bench_function("idm", |b| {
        b.iter(|| {
            obs.iter()
                .map(|&o| idm_acceleration(black_box(o), &cfg.params).unwrap())
                .sum::<f64>()
        })
    });
    g.bench_function("seidm", |b| {
        b.iter(|| {
            obs.iter()
                .map(|&o| seidm_acceleration(black_box(o), &cfg.params, &cfg.risk).unwrap())
                .sum::<f64>()
        })
    });
    g.bench_function("derbel", |b| {
        b.iter(|| {
            obs.iter()
                .map(|&o| derbel_acceleration(black_box(o), &cfg.params, &cfg.variant).unwrap())
                .sum::<f64>()
        })
    });
    g.bench_function("krauss", |b| {
        b.iter(|| {
            obs.iter()
                .map(|&o| krauss_acceleration(black_box(o), &cfg.params, &cfg.variant, 0.1).unwrap())
                .sum::<f64>()
        })
    });
    g.bench_function("risk_factor", |b| {
        b.iter(|| {
            obs.iter()
                .map(|&o| risk_factor(black_box(o), &cfg.params, &cfg.risk))
                .sum::<f64>()
        })
    });
    g.finish();
}

criterion_group!(benches, bench_laws);
criterion_main!(benches);
