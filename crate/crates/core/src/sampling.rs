//! Reproducible random variates for the band model.
//!
//! Streams are ChaCha8 keyed by `(seed, chunk_index)`: the seed selects the
//! key and the chunk index selects the 64-bit stream id, so any chunk's
//! sequence is available directly without skipping through the others.
//! Every variate is produced by inverse transform from a single uniform, so
//! one replicate always consumes the same number of generator outputs.

use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub chunk_index: u64,
}

impl StreamKey {
    pub fn new(seed: u64, chunk_index: u64) -> Self {
        Self { seed, chunk_index }
    }

    pub fn stream(self) -> Stream {
        Stream::new(self)
    }
}

/// Single-owner generator state for one [`StreamKey`].
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

impl Stream {
    pub fn new(key: StreamKey) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(key.seed);
        rng.set_stream(key.chunk_index);
        Self { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits; `1.0` is never produced.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * INV_2_53
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// `Exp(1)` variate.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        exponential_from_uniform(self.uniform())
    }

    /// Rayleigh variate with scale `1/sqrt(pi)`, i.e. `P(R >= t) = exp(-pi t^2 / 2)`.
    #[inline]
    pub fn rayleigh(&mut self) -> f64 {
        rayleigh_from_uniform(self.uniform())
    }

    /// Uniform angle on `[-pi/2, pi/2)`.
    #[inline]
    pub fn angle(&mut self) -> f64 {
        PI * self.uniform() - 0.5 * PI
    }

    pub fn tuple(&mut self, k: usize) -> Result<TupleSample> {
        let mut t = TupleSample::zeros(k)?;
        self.fill_tuple(&mut t);
        Ok(t)
    }

    pub fn cross(&mut self, k: usize) -> Result<CrossSample> {
        let mut c = CrossSample {
            tuple: TupleSample::zeros(k)?,
            r: 0.0,
            theta: 0.0,
        };
        self.fill_cross(&mut c);
        Ok(c)
    }

    /// Redraw `t` in place, keeping its `k`.
    pub fn fill_tuple(&mut self, t: &mut TupleSample) {
        let k = t.k();
        let mut x = 0.0;
        t.positions[0] = 0.0;
        for i in 0..k {
            let z = self.exponential();
            t.gaps[i] = z;
            x += z;
            t.positions[i + 1] = x;
        }
        for u in t.heights.iter_mut() {
            *u = self.uniform();
        }
    }

    /// Redraw `c` in place: the tuple first, then `r`, then `theta`.
    pub fn fill_cross(&mut self, c: &mut CrossSample) {
        self.fill_tuple(&mut c.tuple);
        c.r = self.rayleigh();
        c.theta = self.angle();
    }
}

#[inline]
pub fn exponential_from_uniform(u: f64) -> f64 {
    -(-u).ln_1p()
}

#[inline]
pub fn rayleigh_from_uniform(u: f64) -> f64 {
    (-(2.0 / PI) * (-u).ln_1p()).sqrt()
}

/// Survival function of the Rayleigh neighbour distance.
pub fn rayleigh_survival(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else {
        (-0.5 * PI * t * t).exp()
    }
}

pub fn sample_exponential(stream: &mut Stream) -> f64 {
    stream.exponential()
}

pub fn sample_rayleigh(stream: &mut Stream) -> f64 {
    stream.rayleigh()
}

pub fn sample_tuple(stream: &mut Stream, k: usize) -> Result<TupleSample> {
    stream.tuple(k)
}

pub fn sample_cross(stream: &mut Stream, k: usize) -> Result<CrossSample> {
    stream.cross(k)
}

/// `k + 1` band vertices in scaled coordinates: exponential horizontal gaps
/// and uniform heights in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleSample {
    gaps: Vec<f64>,
    heights: Vec<f64>,
    positions: Vec<f64>,
}

impl TupleSample {
    fn zeros(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(invalid(format!("tuple needs k >= 2, got {k}")));
        }
        Ok(Self {
            gaps: vec![0.0; k],
            heights: vec![0.0; k + 1],
            positions: vec![0.0; k + 1],
        })
    }

    /// Build from explicit gaps `z_1..z_k` and heights `u_0..u_k`.
    pub fn new(gaps: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        let k = gaps.len();
        if k < 2 {
            return Err(invalid(format!("tuple needs k >= 2, got {k}")));
        }
        if heights.len() != k + 1 {
            return Err(invalid(format!(
                "expected {} heights for k = {k}, got {}",
                k + 1,
                heights.len()
            )));
        }
        if gaps.iter().any(|z| !(z.is_finite() && *z >= 0.0)) {
            return Err(invalid("gaps must be finite and nonnegative"));
        }
        if heights.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(invalid("heights must lie in [0, 1]"));
        }
        let mut positions = Vec::with_capacity(k + 1);
        let mut x = 0.0;
        positions.push(x);
        for z in &gaps {
            x += z;
            positions.push(x);
        }
        Ok(Self {
            gaps,
            heights,
            positions,
        })
    }

    /// Build from cumulative positions `x_0 = 0 <= x_1 <= .. <= x_k`.
    pub fn from_positions(positions: &[f64], heights: Vec<f64>) -> Result<Self> {
        if positions.first() != Some(&0.0) {
            return Err(invalid("positions must start at 0"));
        }
        let gaps = positions.windows(2).map(|w| w[1] - w[0]).collect();
        let mut t = Self::new(gaps, heights)?;
        t.positions.copy_from_slice(positions);
        Ok(t)
    }

    pub fn k(&self) -> usize {
        self.gaps.len()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Horizontal span `x_k`.
    pub fn span(&self) -> f64 {
        self.positions[self.k()]
    }
}

/// A tuple plus the nearest-neighbour distance `r` and angle `theta` of the
/// closest vertex in the band above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSample {
    pub tuple: TupleSample,
    pub r: f64,
    pub theta: f64,
}

impl CrossSample {
    pub fn new(tuple: TupleSample, r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(invalid("r must be finite and nonnegative"));
        }
        if !(-0.5 * PI..=0.5 * PI).contains(&theta) {
            return Err(invalid("theta must lie in [-pi/2, pi/2]"));
        }
        Ok(Self { tuple, r, theta })
    }

    pub fn k(&self) -> usize {
        self.tuple.k()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdfs_at_zero() {
        assert_eq!(exponential_from_uniform(0.0), 0.0);
        assert_eq!(rayleigh_from_uniform(0.0), 0.0);
    }

    #[test]
    fn largest_uniform_stays_finite() {
        let u = 1.0 - INV_2_53;
        assert!(exponential_from_uniform(u).is_finite());
        assert!(rayleigh_from_uniform(u).is_finite());
    }

    #[test]
    fn tuple_shape() {
        let mut s = StreamKey::new(1, 0).stream();
        let t = s.tuple(2).unwrap();
        assert_eq!(t.gaps().len(), 2);
        assert_eq!(t.heights().len(), 3);
        assert_eq!(t.positions()[0], 0.0);
        assert!(t.positions().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.tuple(1).is_err());
        assert!(s.cross(1).is_err());
    }

    #[test]
    fn same_key_same_sequence() {
        let a: Vec<u64> = {
            let mut s = StreamKey::new(42, 7).stream();
            (0..64).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = StreamKey::new(42, 7).stream();
            (0..64).map(|_| s.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut s = StreamKey::new(42, 8).stream();
            (0..64).map(|_| s.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn cross_ranges() {
        let mut s = StreamKey::new(3, 1).stream();
        for _ in 0..10_000 {
            let c = s.cross(4).unwrap();
            assert!(c.r >= 0.0);
            assert!((-0.5 * PI..=0.5 * PI).contains(&c.theta));
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(TupleSample::new(vec![1.0, -1.0], vec![0.0; 3]).is_err());
        assert!(TupleSample::new(vec![1.0, 1.0], vec![0.0, 2.0, 0.0]).is_err());
        assert!(TupleSample::new(vec![1.0, 1.0], vec![0.0; 2]).is_err());
        let t = TupleSample::new(vec![1.0, 1.0], vec![0.0; 3]).unwrap();
        assert!(CrossSample::new(t.clone(), -1.0, 0.0).is_err());
        assert!(CrossSample::new(t, 0.5, 2.0).is_err());
    }
}
