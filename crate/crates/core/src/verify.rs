//! The numerical property suite behind `bandtsp verify`.
//!
//! Deterministic checks (per-sample inequalities, quadrature identities) run
//! at any sample count. Statistical checks are reported as inconclusive below
//! [`STATISTICAL_MIN_SAMPLES`].

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certifier::quadrature::integrate;
use crate::certifier::{
    cert_constants, density_normalization, f_of, h_of, verify_lemma_oracles, CertParams,
};
use crate::crossover::{self, relaxed_two_cycle_cost, two_cycle_cost};
use crate::error::Result;
use crate::exec::{map_chunks, split_even, Execution};
use crate::sampling::{rayleigh_survival, StreamKey};
use crate::stats::ks_distance;
use crate::tuple_geometry::{BandParams, TupleEvaluator};

pub const STATISTICAL_MIN_SAMPLES: u64 = 100_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const KS_LIMIT: f64 = 0.002;

const SPECIAL_TOL: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-6;
const SIGMAS: f64 = 4.0;
const CHUNKS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub samples: u64,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<13} {:<28} {}",
                c.status.to_string(),
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// The closed forms under test, replaceable so that a broken implementation
/// can be shown to fail the suite.
#[derive(Clone, Copy)]
pub struct SpecialFns {
    pub f: fn(f64) -> f64,
    pub h: fn(f64) -> f64,
}

impl Default for SpecialFns {
    fn default() -> Self {
        Self {
            f: |a| f_of(a).unwrap_or(f64::NAN),
            h: |a| h_of(a).unwrap_or(f64::NAN),
        }
    }
}

impl fmt::Debug for SpecialFns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SpecialFns")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub samples: u64,
    pub seed: u64,
    pub special: SpecialFns,
    pub exec: Execution,
}

impl VerifyOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            special: SpecialFns::default(),
            exec: Execution::default(),
        }
    }
}

pub fn run(samples: u64, seed: u64) -> Result<VerifyReport> {
    run_with(&VerifyOptions::new(samples, seed))
}

fn check(name: &str, ok: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn statistical(name: &str, samples: u64, ok: bool, detail: String) -> Check {
    let mut c = check(name, ok, detail);
    if samples < STATISTICAL_MIN_SAMPLES {
        c.status = Status::Inconclusive;
        c.detail = format!(
            "{} (fewer than {} samples)",
            c.detail, STATISTICAL_MIN_SAMPLES
        );
    }
    c
}

#[derive(Debug, Default, Clone, Copy)]
struct TupleCounts {
    draws: u64,
    sandwich: u64,
    crossover_worse: u64,
    relaxed_below: u64,
}

impl TupleCounts {
    fn merge(&mut self, o: &TupleCounts) {
        self.draws += o.draws;
        self.sandwich += o.sandwich;
        self.crossover_worse += o.crossover_worse;
        self.relaxed_below += o.relaxed_below;
    }
}

fn tuple_sweep(params: BandParams, draws: u64, seed: u64, exec: Execution) -> Result<TupleCounts> {
    let parts: Vec<(u64, u64)> = split_even(draws, CHUNKS.min(draws.max(1))).collect();
    let per_chunk = map_chunks(parts.len(), exec, |i| -> Result<TupleCounts> {
        let k = params.k();
        let h2 = params.h2();
        let mut s = StreamKey::new(seed, i as u64).stream();
        let mut ev = TupleEvaluator::new(params);
        let mut out = TupleCounts::default();
        for _ in 0..parts[i].1 {
            let c = s.cross(k)?;
            ev.load(&c.tuple)?;
            let within = ev.solve(None, None)?;
            let span = c.tuple.span();
            let slack = 1e-12 * (1.0 + span);
            let cv = crossover::evaluate_loaded(&mut ev, &c, within)?;
            let exact_cycle = two_cycle_cost(&c.tuple, &params, c.r, c.theta);
            let relaxed = relaxed_two_cycle_cost(&c.tuple, &params, c.r);
            let upper = span + k as f64 * h2;
            if within < span - slack || within > upper + slack || cv.length < span - slack {
                out.sandwich += 1;
            }
            if cv.length > within {
                out.crossover_worse += 1;
            }
            if relaxed < exact_cycle - slack * (1.0 + relaxed) {
                out.relaxed_below += 1;
            }
            out.draws += 1;
        }
        Ok(out)
    });
    let mut total = TupleCounts::default();
    for c in per_chunk {
        total.merge(&c?);
    }
    Ok(total)
}

fn rayleigh_cdf(t: f64) -> f64 {
    1.0 - rayleigh_survival(t)
}

pub fn run_with(opts: &VerifyOptions) -> Result<VerifyReport> {
    let n = opts.samples;
    let seed = opts.seed;
    let mut checks = Vec::new();

    // (a)-(c): bulk at the headline k = 4, lighter sweeps elsewhere.
    let configs = [
        (4usize, 4.0f64, n),
        (4, 3.25, n / 4),
        (2, 3.75, n / 10),
        (8, 4.0, n / 10),
    ];
    let mut counts = TupleCounts::default();
    for (i, &(k, h2, draws)) in configs.iter().enumerate() {
        let c = tuple_sweep(
            BandParams::new(h2, k)?,
            draws.max(1),
            seed.wrapping_add(i as u64),
            opts.exec,
        )?;
        counts.merge(&c);
    }
    checks.push(check(
        "sandwich",
        counts.sandwich == 0,
        format!(
            "{} violations of span <= L <= span + k h^2 in {} draws",
            counts.sandwich, counts.draws
        ),
    ));
    checks.push(check(
        "crossover_le_tuple",
        counts.crossover_worse == 0,
        format!(
            "{} draws where crossover exceeded the tuple path",
            counts.crossover_worse
        ),
    ));
    checks.push(check(
        "relaxed_ge_exact",
        counts.relaxed_below == 0,
        format!(
            "{} draws where the relaxed 2-cycle cost was below the exact one",
            counts.relaxed_below
        ),
    ));

    let lemma = verify_lemma_oracles(n, seed);
    checks.push(check(
        "delta_case1_bound",
        lemma.case1_violations == 0 && lemma.d_monotone_violations == 0,
        format!(
            "{} lower-bound and {} monotonicity violations in {} draws",
            lemma.case1_violations, lemma.d_monotone_violations, n
        ),
    ));
    checks.push(check(
        "delta_case_order",
        lemma.case_order_violations == 0,
        format!(
            "{} draws with case 2 or 3 below case 1",
            lemma.case_order_violations
        ),
    ));

    checks.push(special_forms(opts.special));
    checks.push(shape_of_special(opts.special));

    let norm = density_normalization(3.25f64.sqrt());
    checks.push(check(
        "density_normalization",
        (norm - 1.0).abs() <= NORMALIZATION_TOL,
        format!("integral = {norm:.12}"),
    ));

    let mut s = StreamKey::new(seed, u64::MAX).stream();
    let mut rs: Vec<f64> = (0..n.max(1)).map(|_| s.rayleigh()).collect();
    let ks = ks_distance(&mut rs, rayleigh_cdf);
    // 0.002 is the target at 10^6 draws; smaller runs use the 0.1% critical
    // value so they do not fail on noise alone.
    let ks_limit = KS_LIMIT.max(1.95 / (n.max(1) as f64).sqrt());
    checks.push(statistical(
        "rayleigh_ks",
        n,
        ks < ks_limit,
        format!("KS distance {ks:.6} (limit {ks_limit:.6})"),
    ));

    let t = lemma.three_largest;
    checks.push(statistical(
        "three_largest_mean",
        n,
        t.within(SIGMAS),
        format!(
            "mean {:.6} vs {:.6}, se {:.2e}",
            t.mean, t.expected, t.std_err
        ),
    ));
    let f = lemma.fixed_vertex_highest;
    checks.push(statistical(
        "fixed_vertex_highest",
        n,
        f.within(SIGMAS),
        format!(
            "frequency {:.6} vs {:.6}, se {:.2e}",
            f.mean, f.expected, f.std_err
        ),
    ));

    checks.push(h_of_a_decreasing(opts.special)?);

    Ok(VerifyReport {
        samples: n,
        seed,
        checks,
    })
}

fn rayleigh_density(r: f64) -> f64 {
    PI * r * (-0.5 * PI * r * r).exp()
}

/// `F(a) = int_0^a (a - r) rho(r) dr` and, swapping the order of
/// integration, `H(a) = int_0^a (a - r)^2 / 2 rho(r) dr`.
fn special_forms(sf: SpecialFns) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..=60 {
        let a = i as f64 * 0.1;
        let fq = integrate(|r| (a - r) * rayleigh_density(r), 0.0, a, 1e-15, 1e-14).value;
        let hq = integrate(
            |r| 0.5 * (a - r) * (a - r) * rayleigh_density(r),
            0.0,
            a,
            1e-15,
            1e-14,
        )
        .value;
        worst = worst
            .max(((sf.f)(a) - fq).abs())
            .max(((sf.h)(a) - hq).abs());
    }
    if worst.is_nan() {
        worst = f64::INFINITY;
    }
    check(
        "special_functions",
        worst <= SPECIAL_TOL,
        format!("max |closed form - quadrature| = {worst:.3e} on a in [0, 6]"),
    )
}

/// `F >= 0` increasing, `H >= 0` convex on a grid.
fn shape_of_special(sf: SpecialFns) -> Check {
    let grid: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.005).collect();
    let fs: Vec<f64> = grid.iter().map(|&a| (sf.f)(a)).collect();
    let hs: Vec<f64> = grid.iter().map(|&a| (sf.h)(a)).collect();
    let tol = 1e-13;
    let f_ok = fs.iter().all(|&v| v >= -tol) && fs.windows(2).all(|w| w[1] >= w[0] - tol);
    let h_ok =
        hs.iter().all(|&v| v >= -tol) && hs.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] >= -tol);
    check(
        "special_shape",
        f_ok && h_ok,
        format!("F nonnegative increasing: {f_ok}; H nonnegative convex: {h_ok}"),
    )
}

fn h_of_a_decreasing(sf: SpecialFns) -> Result<Check> {
    let c = cert_constants(&CertParams::default())?;
    let n = 10_000;
    let vals: Vec<f64> = (0..=n)
        .map(|i| (sf.h)(c.a_of(c.u1_star * i as f64 / n as f64).max(0.0)))
        .collect();
    let bad = vals.windows(2).filter(|w| w[1] > w[0] + 1e-15).count();
    let below = (0..=n)
        .map(|i| i as f64 / n as f64)
        .filter(|&u| c.a_of(u) - c.slope_b * (1.0 - u) >= 0.0)
        .count();
    Ok(check(
        "h_of_a_decreasing",
        bad == 0 && below == 0,
        format!("{bad} increases of H(A(u)) on [0, u1*]; {below} grid points with A(u) >= B(1-u)"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_are_inconclusive_not_failing() {
        let r = run(10, 1).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.get("rayleigh_ks").unwrap().status, Status::Inconclusive);
        assert_eq!(r.get("sandwich").unwrap().status, Status::Pass);
    }

    #[test]
    fn flipped_f_is_caught() {
        let mut o = VerifyOptions::new(10, 1);
        o.special.f = |a| -f_of(a).unwrap();
        let r = run_with(&o).unwrap();
        assert!(!r.passed());
        assert!(r.failures().any(|c| c.name == "special_functions"));
    }
}
