//! Band crossover: instead of visiting the highest interior vertex inside
//! the band, join it to its nearest neighbour in the band above by a
//! 2-cycle and route the remaining vertices separately.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sampling::{CrossSample, TupleSample};
use crate::tuple_geometry::{BandParams, TupleEvaluator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverValue {
    pub length: f64,
    pub chose_crossover: bool,
    pub j_star: usize,
}

/// Interior index with the greatest height; ties go to the smaller index.
pub fn highest_interior(sample: &TupleSample) -> usize {
    let u = sample.heights();
    let k = sample.k();
    let mut best = 1;
    for j in 2..k {
        if u[j] > u[best] {
            best = j;
        }
    }
    best
}

/// Scaled length of the 2-cycle from the highest interior vertex to a
/// neighbour at distance `r` and angle `theta` across the upper boundary.
pub fn two_cycle_cost(sample: &TupleSample, params: &BandParams, r: f64, theta: f64) -> f64 {
    let h = params.h();
    let u = sample.heights()[highest_interior(sample)];
    2.0 * h * (r * theta.cos()).hypot(h * (1.0 - u) + r * theta.sin())
}

/// Triangle-inequality relaxation of [`two_cycle_cost`], independent of the
/// angle and never smaller than the exact cost.
pub fn relaxed_two_cycle_cost(sample: &TupleSample, params: &BandParams, r: f64) -> f64 {
    let h = params.h();
    let u = sample.heights()[highest_interior(sample)];
    2.0 * h * (r + h * (1.0 - u))
}

pub fn crossover_value(cross: &CrossSample, params: &BandParams) -> Result<CrossoverValue> {
    let mut ev = TupleEvaluator::new(*params);
    evaluate(&mut ev, cross)
}

/// Shared by the estimator: `ev` must carry the params for `cross`.
pub(crate) fn evaluate(ev: &mut TupleEvaluator, cross: &CrossSample) -> Result<CrossoverValue> {
    ev.load(&cross.tuple)?;
    let within = ev.solve(None, None)?;
    evaluate_loaded(ev, cross, within)
}

pub(crate) fn evaluate_loaded(
    ev: &mut TupleEvaluator,
    cross: &CrossSample,
    within: f64,
) -> Result<CrossoverValue> {
    let j_star = highest_interior(&cross.tuple);
    let cycle = two_cycle_cost(&cross.tuple, ev.params(), cross.r, cross.theta);
    // The remaining path is at least the horizontal span; skip the solve when
    // the cycle alone already loses.
    let crossed = if cycle + cross.tuple.span() < within {
        cycle + ev.solve(Some(j_star), None)?
    } else {
        f64::INFINITY
    };
    Ok(if crossed < within {
        CrossoverValue {
            length: crossed,
            chose_crossover: true,
            j_star,
        }
    } else {
        CrossoverValue {
            length: within,
            chose_crossover: false,
            j_star,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuple_geometry::min_path;
    use approx::assert_relative_eq;

    fn tuple(u: Vec<f64>) -> TupleSample {
        let k = u.len() - 1;
        TupleSample::new(vec![1.0; k], u).unwrap()
    }

    #[test]
    fn highest_interior_rules() {
        assert_eq!(highest_interior(&tuple(vec![0.1, 0.9, 0.2, 0.1])), 1);
        assert_eq!(highest_interior(&tuple(vec![0.99, 0.3, 0.3, 0.99])), 1);
        assert_eq!(highest_interior(&tuple(vec![0.0, 0.2, 0.7, 0.7, 0.0])), 2);
        assert_eq!(highest_interior(&tuple(vec![0.5, 0.1, 0.5])), 1);
    }

    #[test]
    fn cycle_cost_examples() {
        let p = BandParams::new(4.0, 3).unwrap();
        let top = tuple(vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(two_cycle_cost(&top, &p, 0.0, 0.3), 0.0);
        assert_eq!(relaxed_two_cycle_cost(&top, &p, 0.0), 0.0);
        let bottom = tuple(vec![0.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(two_cycle_cost(&bottom, &p, 0.0, 0.0), 8.0, epsilon = 1e-12);
        let t = tuple(vec![0.0, 0.9, 0.0, 0.0]);
        let exact = two_cycle_cost(&t, &p, 1.0, 0.0);
        assert_relative_eq!(exact, 4.0 * 1.04f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(exact, 4.0792, epsilon = 1e-4);
        let relaxed = relaxed_two_cycle_cost(&t, &p, 1.0);
        assert_relative_eq!(relaxed, 4.8, epsilon = 1e-12);
        assert!(relaxed >= exact);
    }

    #[test]
    fn far_neighbour_keeps_within_band() {
        let t =
            TupleSample::from_positions(&[0.0, 0.1, 0.2, 2.0], vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let p = BandParams::new(4.0, 3).unwrap();
        let c = CrossSample::new(t.clone(), 100.0, 0.0).unwrap();
        let v = crossover_value(&c, &p).unwrap();
        assert!(!v.chose_crossover);
        assert_eq!(v.length, min_path(&t, &p, None).unwrap().length);
    }

    #[test]
    fn close_neighbour_crosses() {
        let t =
            TupleSample::from_positions(&[0.0, 0.1, 0.2, 2.0], vec![0.1, 0.99, 0.1, 0.1]).unwrap();
        let p = BandParams::new(4.0, 3).unwrap();
        let c = CrossSample::new(t.clone(), 0.01, 0.0).unwrap();
        let v = crossover_value(&c, &p).unwrap();
        // Both branches by hand.
        let cycle = 4.0 * (0.01f64.powi(2) + 0.02f64.powi(2)).sqrt();
        let skip = 0.2f64.hypot(0.0) + 1.8f64.hypot(0.0);
        let crossed = cycle + skip;
        let within = min_path(&t, &p, None).unwrap().length;
        assert_relative_eq!(crossed, 0.0894427191 + 2.0, epsilon = 1e-9);
        assert!(crossed < within);
        assert!(v.chose_crossover);
        assert_eq!(v.j_star, 1);
        assert_relative_eq!(v.length, crossed, epsilon = 1e-12);
    }

    #[test]
    fn exact_tie_stays_within_band() {
        // Highest interior vertex already lies on the upper boundary with a
        // coincident neighbour: cycle cost 0, and the skip path equals the
        // within-band path because the vertex sits on the straight line.
        let t = TupleSample::from_positions(&[0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]).unwrap();
        let p = BandParams::new(4.0, 2).unwrap();
        let v = crossover_value(&CrossSample::new(t, 0.0, 0.0).unwrap(), &p).unwrap();
        assert!(!v.chose_crossover);
        assert_eq!(v.length, 2.0);
    }
}
