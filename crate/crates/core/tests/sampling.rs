use bandtsp::sampling::{rayleigh_survival, StreamKey};
use bandtsp::stats::{ks_distance, RunningStats};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

const N: usize = 1_000_000;

fn stats(xs: impl Iterator<Item = f64>) -> RunningStats {
    let mut s = RunningStats::new();
    xs.for_each(|x| s.push(x));
    s
}

fn within(s: &RunningStats, expected: f64, sigmas: f64) -> bool {
    (s.mean() - expected).abs() <= sigmas * s.std_err()
}

#[test]
fn exponential_moments_and_ks() {
    let mut st = StreamKey::new(3, 0).stream();
    let mut xs: Vec<f64> = (0..N).map(|_| st.exponential()).collect();
    let s = stats(xs.iter().copied());
    assert!(within(&s, 1.0, 4.0), "mean {}", s.mean());
    assert!((s.variance() - 1.0).abs() < 0.01);
    let d = ks_distance(&mut xs, |x| 1.0 - (-x).exp());
    assert!(d < 1.95 / (N as f64).sqrt(), "ks {d}");
}

#[test]
fn rayleigh_moments_and_ks() {
    // Density pi r exp(-pi r^2 / 2): mean 1/sqrt2, second moment 2/pi.
    let mut st = StreamKey::new(4, 0).stream();
    let mut xs: Vec<f64> = (0..N).map(|_| st.rayleigh()).collect();
    let s = stats(xs.iter().copied());
    assert!(within(&s, FRAC_1_SQRT_2, 4.0), "mean {}", s.mean());
    let sq = stats(xs.iter().map(|x| x * x));
    assert!(within(&sq, 2.0 / PI, 4.0), "second moment {}", sq.mean());
    let d = ks_distance(&mut xs, |t| 1.0 - rayleigh_survival(t));
    assert!(d < 0.002, "ks {d}");
}

#[test]
fn uniform_and_angle_ranges() {
    let mut st = StreamKey::new(5, 0).stream();
    let us = stats((0..N).map(|_| {
        let u = st.uniform();
        assert!((0.0..1.0).contains(&u));
        u
    }));
    assert!(within(&us, 0.5, 4.0));
    let th = stats((0..N).map(|_| {
        let t = st.angle();
        assert!((-FRAC_PI_2..FRAC_PI_2).contains(&t));
        t
    }));
    assert!(within(&th, 0.0, 4.0));
}

#[test]
fn tuple_draws_have_expected_marginals() {
    let k = 4;
    let mut st = StreamKey::new(6, 0).stream();
    let mut span = RunningStats::new();
    let mut height = RunningStats::new();
    let mut r = RunningStats::new();
    for _ in 0..200_000 {
        let c = st.cross(k).unwrap();
        span.push(c.tuple.span());
        c.tuple.heights().iter().for_each(|&u| height.push(u));
        r.push(c.r);
        assert_eq!(c.tuple.positions()[0], 0.0);
    }
    assert!(within(&span, k as f64, 4.0), "span {}", span.mean());
    assert!(within(&height, 0.5, 4.0));
    assert!(within(&r, FRAC_1_SQRT_2, 4.0));
}

/// Pearson chi-square of the 10x10 contingency table of paired uniforms
/// from two streams.
fn chi_square_independence(a: &[f64], b: &[f64]) -> f64 {
    let bins = 10;
    let mut table = vec![0u64; bins * bins];
    for (&x, &y) in a.iter().zip(b) {
        table[(x * bins as f64) as usize * bins + (y * bins as f64) as usize] += 1;
    }
    let n = a.len() as f64;
    let row: Vec<f64> = (0..bins)
        .map(|i| (0..bins).map(|j| table[i * bins + j] as f64).sum())
        .collect();
    let col: Vec<f64> = (0..bins)
        .map(|j| (0..bins).map(|i| table[i * bins + j] as f64).sum())
        .collect();
    let mut chi2 = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let e = row[i] * col[j] / n;
            chi2 += (table[i * bins + j] as f64 - e).powi(2) / e;
        }
    }
    let dist = ChiSquared::new(((bins - 1) * (bins - 1)) as f64).unwrap();
    1.0 - dist.cdf(chi2)
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn chunk_streams_are_independent() {
    let n = 200_000;
    let draw = |seed, chunk| -> Vec<f64> {
        let mut s = StreamKey::new(seed, chunk).stream();
        (0..n).map(|_| s.uniform()).collect()
    };
    let base = draw(11, 0);
    for other in [draw(11, 1), draw(11, 63), draw(12, 0)] {
        let p = chi_square_independence(&base, &other);
        assert!(p > 1e-4, "chi-square p-value {p}");
        let rho = correlation(&base, &other);
        assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "correlation {rho}");
    }
    // Lagged self-correlation inside one stream.
    let rho = correlation(&base[..n - 1], &base[1..]);
    assert!(rho.abs() < 4.0 / (n as f64).sqrt());
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let take = |seed, chunk| -> Vec<u64> {
        let mut s = StreamKey::new(seed, chunk).stream();
        (0..16).map(|_| s.next_u64()).collect()
    };
    assert_eq!(take(1, 2), take(1, 2));
    assert_ne!(take(1, 2), take(1, 3));
    assert_ne!(take(1, 2), take(2, 2));
}
