//! Path lengths inside one band, in scaled coordinates.
//!
//! A segment between tuple vertices `i` and `j` has length
//! `sqrt((x_j - x_i)^2 + h^4 (u_j - u_i)^2)`: horizontal gaps are in
//! exponential units and the vertical coordinate is `h^2 u`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::path::{DistMatrix, PathSolver, Strategy};
use crate::sampling::TupleSample;

/// Tuples with `k` at or above this use the subset DP by default.
pub const DP_FROM_K: usize = 8;
/// Largest `k` the DP accepts.
pub const MAX_K: usize = 20;

/// Band height `h^2` (point-density units) and tuple size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    h2: f64,
    k: usize,
}

impl BandParams {
    pub fn new(h2: f64, k: usize) -> Result<Self> {
        if !(h2.is_finite() && h2 > 0.0) {
            return Err(invalid(format!("h2 must be positive and finite, got {h2}")));
        }
        if k < 2 {
            return Err(invalid(format!("k must be at least 2, got {k}")));
        }
        Ok(Self { h2, k })
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    pub fn h(&self) -> f64 {
        self.h2.sqrt()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Default solver for this `k`.
    pub fn strategy(&self) -> Strategy {
        if self.k >= DP_FROM_K {
            Strategy::Dp
        } else {
            Strategy::BruteForce
        }
    }

    fn check(&self, sample: &TupleSample) -> Result<()> {
        if sample.k() != self.k {
            return Err(Error::Mismatch(format!(
                "sample has k = {}, params have k = {}",
                sample.k(),
                self.k
            )));
        }
        Ok(())
    }
}

/// Length and winning order of a shortest fixed-endpoint path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathValue {
    pub length: f64,
    pub ordering: Vec<usize>,
}

#[inline]
fn seg(sample: &TupleSample, h2: f64, i: usize, j: usize) -> f64 {
    let x = sample.positions();
    let u = sample.heights();
    (x[j] - x[i]).hypot(h2 * (u[j] - u[i]))
}

pub fn segment_length(
    sample: &TupleSample,
    params: &BandParams,
    i: usize,
    j: usize,
) -> Result<f64> {
    params.check(sample)?;
    let k = sample.k();
    for idx in [i, j] {
        if idx > k {
            return Err(Error::IndexOutOfRange { index: idx, k });
        }
    }
    Ok(seg(sample, params.h2, i, j))
}

/// Length of the path visiting `ordering` in sequence. The ordering may
/// cover a subset of the vertices but must start at 0, end at `k` and not
/// repeat.
pub fn path_length(sample: &TupleSample, params: &BandParams, ordering: &[usize]) -> Result<f64> {
    params.check(sample)?;
    let k = sample.k();
    validate_ordering(ordering, k)?;
    Ok(ordering
        .windows(2)
        .map(|w| seg(sample, params.h2, w[0], w[1]))
        .sum())
}

fn validate_ordering(ordering: &[usize], k: usize) -> Result<()> {
    if ordering.len() < 2 {
        return Err(Error::MalformedOrdering(
            "need at least both endpoints".into(),
        ));
    }
    if ordering[0] != 0 || ordering[ordering.len() - 1] != k {
        return Err(Error::MalformedOrdering(format!(
            "must start at 0 and end at {k}: {ordering:?}"
        )));
    }
    let mut seen = vec![false; k + 1];
    for &v in ordering {
        if v > k {
            return Err(Error::IndexOutOfRange { index: v, k });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::MalformedOrdering(format!("vertex {v} repeated")));
        }
    }
    Ok(())
}

/// Length of the left-to-right path `0, 1, .., k`.
pub fn identity_length(sample: &TupleSample, params: &BandParams) -> Result<f64> {
    let ord: Vec<usize> = (0..=sample.k()).collect();
    path_length(sample, params, &ord)
}

/// Minimum over all orderings fixing the endpoints, optionally with the
/// interior vertex `skip` removed. Uses the default solver for `k`.
pub fn min_path(
    sample: &TupleSample,
    params: &BandParams,
    skip: Option<usize>,
) -> Result<PathValue> {
    min_path_with(sample, params, skip, params.strategy())
}

/// Exhaustive minimum over the permutation table.
pub fn min_path_brute(
    sample: &TupleSample,
    params: &BandParams,
    skip: Option<usize>,
) -> Result<PathValue> {
    min_path_with(sample, params, skip, Strategy::BruteForce)
}

/// Subset-DP minimum over all orderings fixing the endpoints.
pub fn min_path_dp(sample: &TupleSample, params: &BandParams) -> Result<PathValue> {
    if sample.k() > MAX_K {
        return Err(Error::TooLarge {
            k: sample.k(),
            limit: MAX_K,
        });
    }
    min_path_with(sample, params, None, Strategy::Dp)
}

pub fn min_path_with(
    sample: &TupleSample,
    params: &BandParams,
    skip: Option<usize>,
    strategy: Strategy,
) -> Result<PathValue> {
    let mut ev = TupleEvaluator::new(*params);
    ev.strategy = strategy;
    ev.load(sample)?;
    let mut ordering = Vec::new();
    let length = ev.solve(skip, Some(&mut ordering))?;
    Ok(PathValue { length, ordering })
}

/// Hot-loop helper: holds the distance matrix of one tuple plus solver
/// scratch so repeated minimisations allocate nothing.
#[derive(Debug, Clone)]
pub struct TupleEvaluator {
    params: BandParams,
    strategy: Strategy,
    dist: DistMatrix,
    solver: PathSolver,
    verts: Vec<usize>,
}

impl TupleEvaluator {
    pub fn new(params: BandParams) -> Self {
        Self {
            params,
            strategy: params.strategy(),
            dist: DistMatrix::new(params.k + 1),
            solver: PathSolver::new(),
            verts: Vec::with_capacity(params.k + 1),
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn params(&self) -> &BandParams {
        &self.params
    }

    pub fn load(&mut self, sample: &TupleSample) -> Result<()> {
        self.params.check(sample)?;
        let h2 = self.params.h2;
        self.dist.fill(sample.k() + 1, |i, j| seg(sample, h2, i, j));
        Ok(())
    }

    /// Minimum path length over the loaded tuple.
    pub fn solve(&mut self, skip: Option<usize>, order: Option<&mut Vec<usize>>) -> Result<f64> {
        let k = self.params.k;
        self.verts.clear();
        match skip {
            None => self.verts.extend(0..=k),
            Some(s) => {
                if s == 0 || s >= k {
                    return Err(Error::IndexOutOfRange { index: s, k });
                }
                self.verts.extend((0..=k).filter(|&v| v != s));
            }
        }
        self.solver
            .solve(&self.dist, &self.verts, self.strategy, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn instance() -> (TupleSample, BandParams) {
        let t =
            TupleSample::from_positions(&[0.0, 0.1, 0.2, 2.0], vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        (t, BandParams::new(4.0, 3).unwrap())
    }

    #[test]
    fn segment_examples() {
        let t = TupleSample::from_positions(&[0.0, 0.0, 3.0], vec![0.5, 0.5, 0.0]).unwrap();
        let p = BandParams::new(4.0, 2).unwrap();
        assert_eq!(segment_length(&t, &p, 0, 1).unwrap(), 0.0);
        // dx = 3, du = 1 after moving the top vertex.
        let t = TupleSample::from_positions(&[0.0, 0.0, 3.0], vec![1.0, 0.5, 0.0]).unwrap();
        assert_relative_eq!(segment_length(&t, &p, 0, 2).unwrap(), 5.0, epsilon = 1e-12);
        let t = TupleSample::from_positions(&[0.0, 1.0, 2.0], vec![0.0, 0.5, 0.5]).unwrap();
        let p = BandParams::new(3.75, 2).unwrap();
        assert_relative_eq!(
            segment_length(&t, &p, 0, 1).unwrap(),
            2.125,
            epsilon = 1e-12
        );
        assert!(matches!(
            segment_length(&t, &p, 0, 3),
            Err(Error::IndexOutOfRange { index: 3, k: 2 })
        ));
    }

    #[test]
    fn path_examples() {
        let t = TupleSample::new(vec![1.0, 1.0], vec![0.3, 0.3, 0.3]).unwrap();
        let p = BandParams::new(2.0, 2).unwrap();
        assert_eq!(identity_length(&t, &p).unwrap(), 2.0);

        let (t, p) = instance();
        let id = path_length(&t, &p, &[0, 1, 2, 3]).unwrap();
        let expect_id = 0.1f64.hypot(4.0) * 2.0 + 1.8f64.hypot(4.0);
        assert_relative_eq!(id, expect_id, epsilon = 1e-12);
        assert_relative_eq!(id, 12.3888, epsilon = 1e-4);
        let alt = path_length(&t, &p, &[0, 2, 1, 3]).unwrap();
        assert_relative_eq!(alt, 0.2 + 0.1f64.hypot(4.0) + 1.9, epsilon = 1e-12);
        assert_relative_eq!(alt, 6.1013, epsilon = 1e-4);
    }

    #[test]
    fn malformed_orderings() {
        let (t, p) = instance();
        assert!(matches!(
            path_length(&t, &p, &[1, 2, 3]),
            Err(Error::MalformedOrdering(_))
        ));
        assert!(matches!(
            path_length(&t, &p, &[0, 1, 1, 3]),
            Err(Error::MalformedOrdering(_))
        ));
        assert!(matches!(
            path_length(&t, &p, &[0, 2]),
            Err(Error::MalformedOrdering(_))
        ));
        assert!(path_length(&t, &p, &[0, 7, 3]).is_err());
        assert!(path_length(&t, &p, &[0, 2, 3]).is_ok());
    }

    #[test]
    fn min_path_examples() {
        let t = TupleSample::new(vec![0.4, 1.1], vec![0.9, 0.1, 0.5]).unwrap();
        let p = BandParams::new(3.0, 2).unwrap();
        let v = min_path(&t, &p, None).unwrap();
        assert_eq!(v.ordering, vec![0, 1, 2]);
        assert_eq!(v.length, identity_length(&t, &p).unwrap());

        let (t, p) = instance();
        let v = min_path(&t, &p, None).unwrap();
        assert_eq!(v.ordering, vec![0, 2, 1, 3]);
        assert_relative_eq!(v.length, 6.1013, epsilon = 1e-4);
        let d = min_path_dp(&t, &p).unwrap();
        assert_relative_eq!(d.length, v.length, max_relative = 1e-12);

        let s = min_path(&t, &p, Some(1)).unwrap();
        assert_eq!(s.ordering, vec![0, 2, 3]);
        assert_relative_eq!(s.length, 0.2 + 1.8f64.hypot(4.0), epsilon = 1e-12);
        assert!(min_path(&t, &p, Some(0)).is_err());
        assert!(min_path(&t, &p, Some(3)).is_err());
    }

    #[test]
    fn constructed_tie_breaks_lexicographically() {
        // Vertices 1 and 2 coincide: both interior orders have equal length.
        let t =
            TupleSample::from_positions(&[0.0, 1.0, 1.0, 2.0], vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        let p = BandParams::new(2.0, 3).unwrap();
        assert_eq!(
            min_path_brute(&t, &p, None).unwrap().ordering,
            vec![0, 1, 2, 3]
        );
        assert_eq!(min_path_dp(&t, &p).unwrap().ordering, vec![0, 1, 2, 3]);
    }

    #[test]
    fn params_validation() {
        assert!(BandParams::new(0.0, 4).is_err());
        assert!(BandParams::new(-1.0, 4).is_err());
        assert!(BandParams::new(1.0, 1).is_err());
        let (t, _) = instance();
        let p = BandParams::new(1.0, 4).unwrap();
        assert!(matches!(min_path(&t, &p, None), Err(Error::Mismatch(_))));
    }
}
