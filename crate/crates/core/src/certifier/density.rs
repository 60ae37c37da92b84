//! Joint density of the crossover configuration at `k = 4`: `z1` is the
//! second-highest of five heights (measured from the band bottom), `z2` the
//! gap from the highest height to the band top, `r` the Rayleigh neighbour
//! distance.

use std::f64::consts::PI;

use super::quadrature::integrate;
use crate::sampling::Stream;

/// `(20/h^5) 1{z1 + z2 <= h, z1, z2 >= 0} z1^3 pi r exp(-pi r^2 / 2)`.
pub fn improvement_density(z1: f64, z2: f64, r: f64, h: f64) -> f64 {
    if z1 < 0.0 || z2 < 0.0 || r < 0.0 || z1 + z2 > h {
        return 0.0;
    }
    20.0 / h.powi(5) * z1.powi(3) * PI * r * (-0.5 * PI * r * r).exp()
}

/// Nested adaptive quadrature of the density over its support.
pub fn density_normalization(h: f64) -> f64 {
    const R_MAX: f64 = 12.0;
    integrate(
        |z1| {
            integrate(
                |z2| {
                    integrate(
                        |r| improvement_density(z1, z2, r, h),
                        0.0,
                        R_MAX,
                        1e-14,
                        1e-13,
                    )
                    .value
                },
                0.0,
                (h - z1).max(0.0),
                1e-14,
                1e-13,
            )
            .value
        },
        0.0,
        h,
        1e-13,
        1e-12,
    )
    .value
}

/// Probability of the box `[z1a, z1b] x [z2a, z2b] x [ra, rb]`. The `r`
/// factor is exact; the height factor is integrated piecewise around the
/// kinks of the triangle constraint.
pub fn cell_probability(z1: (f64, f64), z2: (f64, f64), r: (f64, f64), h: f64) -> f64 {
    let pr = (-0.5 * PI * r.0 * r.0).exp() - (-0.5 * PI * r.1 * r.1).exp();
    let width = |x: f64| ((z2.1).min(h - x) - z2.0).clamp(0.0, z2.1 - z2.0);
    let f = |x: f64| 20.0 / h.powi(5) * x * x * x * width(x);
    let mut cuts = vec![z1.0, z1.1];
    for c in [h - z2.1, h - z2.0] {
        if c > z1.0 && c < z1.1 {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let pz: f64 = cuts
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], 1e-16, 1e-13).value)
        .sum();
    pz * pr
}

/// Draw `(z1, z2, r)` by simulating five iid heights on `[0, h]` and an
/// independent Rayleigh distance.
pub fn sample_configuration(stream: &mut Stream, h: f64) -> (f64, f64, f64) {
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for _ in 0..5 {
        let y = h * stream.uniform();
        if y > top {
            second = top;
            top = y;
        } else if y > second {
            second = y;
        }
    }
    (second, h - top, stream.rayleigh())
}
