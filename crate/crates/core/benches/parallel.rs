use bandtsp::certifier::{eta_lower_bound_with, CertParams};
use bandtsp::estimator::{estimate_with, EstimateConfig, Method};
use bandtsp::exec::Execution;
use bandtsp::tour::{build_band_tour_report, generate_points};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn estimator(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate");
    g.sample_size(10);
    for (method, k) in [
        (Method::Tuple, 4),
        (Method::Crossover, 4),
        (Method::Tuple, 8),
    ] {
        let cfg = EstimateConfig::new(method, k, 4.0, 100_000, 1, 64);
        for (name, exec) in MODES {
            g.bench_with_input(
                BenchmarkId::new(format!("{method}-k{k}"), name),
                &exec,
                |b, &e| b.iter(|| estimate_with(&cfg, e).unwrap().mean),
            );
        }
    }
    g.finish();
}

fn certificate(c: &mut Criterion) {
    let mut g = c.benchmark_group("certificate");
    g.sample_size(10);
    let params = CertParams::default();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("grid-1e6", name), &exec, |b, &e| {
            b.iter(|| eta_lower_bound_with(&params, e).unwrap().eta_lower)
        });
    }
    g.finish();
}

fn tour(c: &mut Criterion) {
    let mut g = c.benchmark_group("tour");
    g.sample_size(10);
    let ps = generate_points(100_000, 1).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("n-1e5-crossover", name), &exec, |b, &e| {
            b.iter(|| {
                build_band_tour_report(&ps, 4.0, 4, true, e)
                    .unwrap()
                    .tour
                    .length
            })
        });
    }
    g.finish();
}

criterion_group!(benches, estimator, certificate, tour);
criterion_main!(benches);
