//! Numerical checks of the inequalities behind the certified bound. None of
//! this feeds the certificate; it exercises the proof steps on random input.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::certificate::{cert_constants, CertParams};
use crate::error::Result;
use crate::exec::{map_chunks, split_even, Execution};
use crate::sampling::{Stream, StreamKey};
use crate::stats::RunningStats;

/// Detour of the highest vertex, configuration with the vertex between its
/// path neighbours horizontally.
pub fn delta_case1(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.hypot(c + d) + c.hypot(b) - d.hypot(a + b)
}

pub fn delta_case2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.hypot(c + d) + c.hypot(a + b) - d.hypot(b)
}

pub fn delta_case3(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.hypot(c) + (a + b).hypot(c + d) - d.hypot(b)
}

/// `sqrt2 C - ((sqrt2 - 1)/sqrt2)(A + B)`.
pub fn delta_lower_bound(a: f64, b: f64, c: f64) -> f64 {
    SQRT_2 * c - (SQRT_2 - 1.0) / SQRT_2 * (a + b)
}

const FP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCheck {
    pub mean: f64,
    pub std_err: f64,
    pub expected: f64,
}

impl MeanCheck {
    fn from_stats(s: &RunningStats, expected: f64) -> Self {
        Self {
            mean: s.mean(),
            std_err: s.std_err(),
            expected,
        }
    }

    /// `|mean - expected| <= sigmas * std_err`.
    pub fn within(&self, sigmas: f64) -> bool {
        (self.mean - self.expected).abs() <= sigmas * self.std_err
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub samples: u64,
    /// Draws with case-1 detour below the linear lower bound.
    pub case1_violations: u64,
    /// Draws where increasing `D` decreased the case-1 detour.
    pub d_monotone_violations: u64,
    /// Draws where case 2, or case 3 with `A` and `B` exchanged, fell below case 1.
    pub case_order_violations: u64,
    /// Sum of the three largest of four `Exp(rate h)`; expected `3.75/h`.
    pub three_largest: MeanCheck,
    /// Frequency with which one fixed vertex of five is the highest.
    pub fixed_vertex_highest: MeanCheck,
}

impl LemmaReport {
    pub fn deterministic_ok(&self) -> bool {
        self.case1_violations == 0
            && self.d_monotone_violations == 0
            && self.case_order_violations == 0
    }
}

fn draw_side(s: &mut Stream) -> f64 {
    // Mix of scales, with exact zeros now and then.
    match s.next_u64() % 8 {
        0 => 0.0,
        1 => 0.01 * s.exponential(),
        2 => 10.0 * s.exponential(),
        _ => s.exponential(),
    }
}

pub fn verify_lemma_oracles(samples: u64, seed: u64) -> LemmaReport {
    let mut s = StreamKey::new(seed, 0).stream();
    let mut case1 = 0;
    let mut mono = 0;
    let mut order = 0;
    for _ in 0..samples {
        let (a, b, c, d) = (
            draw_side(&mut s),
            draw_side(&mut s),
            draw_side(&mut s),
            draw_side(&mut s),
        );
        let scale = 1.0 + a + b + c + d;
        let d1 = delta_case1(a, b, c, d);
        if d1 < delta_lower_bound(a, b, c) - FP_SLACK * scale
            || delta_case1(a, b, c, 0.0) < delta_lower_bound(a, b, c) - FP_SLACK * scale
        {
            case1 += 1;
        }
        let bump = d + draw_side(&mut s);
        if delta_case1(a, b, c, bump) < d1 - FP_SLACK * (scale + bump) {
            mono += 1;
        }
        if delta_case2(a, b, c, d) < d1 - FP_SLACK * scale
            || delta_case3(a, b, c, d) < delta_case1(b, a, c, d) - FP_SLACK * scale
        {
            order += 1;
        }
    }

    let h = 3.25f64.sqrt();
    let mut s = StreamKey::new(seed, 1).stream();
    let mut three = RunningStats::new();
    for _ in 0..samples {
        let xs = [0; 4].map(|_| s.exponential() / h);
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        three.push(xs.iter().sum::<f64>() - min);
    }

    let mut s = StreamKey::new(seed, 2).stream();
    let mut freq = RunningStats::new();
    for _ in 0..samples {
        let us = [0; 5].map(|_| s.uniform());
        let is_max = us.iter().all(|&u| u <= us[1]);
        freq.push(if is_max { 1.0 } else { 0.0 });
    }

    LemmaReport {
        samples,
        case1_violations: case1,
        d_monotone_violations: mono,
        case_order_violations: order,
        three_largest: MeanCheck::from_stats(&three, 3.75 / h),
        fixed_vertex_highest: MeanCheck::from_stats(&freq, 0.2),
    }
}

fn mc<F>(samples: u64, seed: u64, exec: Execution, body: F) -> (f64, f64)
where
    F: Fn(&mut Stream) -> f64 + Sync + Send,
{
    let chunks = 64u64.min(samples.max(1));
    let parts: Vec<(u64, u64)> = split_even(samples, chunks).collect();
    let stats = map_chunks(parts.len(), exec, |i| {
        let mut s = StreamKey::new(seed, i as u64).stream();
        let mut st = RunningStats::new();
        for _ in 0..parts[i].1 {
            st.push(body(&mut s));
        }
        st
    });
    let mut total = RunningStats::new();
    for st in &stats {
        total.merge(st);
    }
    (total.mean(), total.std_err())
}

/// Monte Carlo of `(1/h) E sqrt(Z^2 + h^4 (U0 - U1)^2)`, the triple-integral
/// form of [`bhh_bound`](super::bhh::bhh_bound). Returns `(mean, std_err)`.
pub fn bhh_triple_mc(h: f64, samples: u64, seed: u64, exec: Execution) -> (f64, f64) {
    let h4 = h.powi(4);
    mc(samples, seed, exec, |s| {
        let z = s.exponential();
        let du = s.uniform() - s.uniform();
        (z * z + h4 * du * du).sqrt() / h
    })
}

/// Monte Carlo of the `(u1, u2, r)` integral whose exact value is `eta`:
/// `12 E[(sqrt2 h (1 - u1 - u2) - 2 (h u2 + r) + alpha)_+ u1^3 1{u1 + u2 <= 1}]`
/// with `u1, u2` uniform and `r` Rayleigh.
pub fn eta_triple_mc(
    params: &CertParams,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<(f64, f64)> {
    let c = cert_constants(params)?;
    let h = c.h;
    Ok(mc(samples, seed, exec, |s| {
        let u1 = s.uniform();
        let u2 = s.uniform();
        let r = s.rayleigh();
        if u1 + u2 > 1.0 {
            return 0.0;
        }
        let gain = SQRT_2 * h * (1.0 - u1 - u2) - 2.0 * (h * u2 + r) + c.alpha;
        12.0 * gain.max(0.0) * u1 * u1 * u1
    }))
}
