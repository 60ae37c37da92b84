//! High-probability deviation radii for the band estimators.
//!
//! A replicate length splits as `L = G + B` with `G ~ Gamma(k, 1)` the
//! horizontal span and `0 <= B <= k h^2`. A sub-gamma tail bound on the mean
//! of `G` and Hoeffding's inequality on the mean of `B`, each at level
//! `2 e^{-t}`, give `P(|estimate - truth| >= eps) <= delta` with
//! `t = ln(4 / delta)`. The same split holds for the crossover estimator.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimator::EstimateResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationResult {
    pub k: usize,
    #[serde(rename = "M")]
    pub m: u64,
    pub h2: f64,
    pub delta: f64,
    pub t: f64,
    /// Deviation of the mean span: `sqrt(2 k t / M) + t / M`.
    pub a_g: f64,
    /// Deviation of the bounded remainder: `k h^2 sqrt(t / (2 M))`.
    pub a_b: f64,
    pub epsilon: f64,
}

pub fn deviation_radius(k: usize, m: u64, h2: f64, delta: f64) -> Result<ConcentrationResult> {
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    if m < 1 {
        return Err(invalid("M must be at least 1"));
    }
    if !(h2.is_finite() && h2 > 0.0) {
        return Err(invalid(format!("h2 must be positive, got {h2}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let kf = k as f64;
    let mf = m as f64;
    let t = (4.0 / delta).ln();
    let a_g = (2.0 * kf * t / mf).sqrt() + t / mf;
    let a_b = kf * h2 * (t / (2.0 * mf)).sqrt();
    let epsilon = (a_g + a_b) / (kf * h2.sqrt());
    Ok(ConcentrationResult {
        k,
        m,
        h2,
        delta,
        t,
        a_g,
        a_b,
        epsilon,
    })
}

/// `[mean - eps, mean + eps]`, checking that the radius was computed for the
/// estimate's `(k, M, h2)`.
pub fn interval(estimate: &EstimateResult, radius: &ConcentrationResult) -> Result<(f64, f64)> {
    let c = &estimate.config;
    if c.k != radius.k || c.replicates != radius.m || c.h2 != radius.h2 {
        return Err(Error::Mismatch(format!(
            "estimate has (k, M, h2) = ({}, {}, {}), radius has ({}, {}, {})",
            c.k, c.replicates, c.h2, radius.k, radius.m, radius.h2
        )));
    }
    Ok(interval_around(estimate.mean, radius.epsilon))
}

/// Radius for the estimate's own parameters at level `delta`, and the interval.
pub fn interval_for(
    estimate: &EstimateResult,
    delta: f64,
) -> Result<(ConcentrationResult, (f64, f64))> {
    let c = &estimate.config;
    let r = deviation_radius(c.k, c.replicates, c.h2, delta)?;
    let iv = interval(estimate, &r)?;
    Ok((r, iv))
}

pub fn interval_around(mean: f64, epsilon: f64) -> (f64, f64) {
    (mean - epsilon, mean + epsilon)
}

/// JSON record `{k, M, h2, delta, t, epsilon, lo, hi}`; `lo`/`hi` are present
/// only when a centre was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRecord {
    pub k: usize,
    #[serde(rename = "M")]
    pub m: u64,
    pub h2: f64,
    pub delta: f64,
    pub t: f64,
    pub epsilon: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl ConcentrationRecord {
    pub fn new(r: &ConcentrationResult, mean: Option<f64>) -> Self {
        let iv = mean.map(|m| interval_around(m, r.epsilon));
        Self {
            k: r.k,
            m: r.m,
            h2: r.h2,
            delta: r.delta,
            t: r.t,
            epsilon: r.epsilon,
            lo: iv.map(|x| x.0),
            hi: iv.map(|x| x.1),
        }
    }
}
