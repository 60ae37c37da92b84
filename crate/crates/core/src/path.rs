//! Shortest Hamiltonian paths with both endpoints fixed, over a dense
//! distance matrix.
//!
//! The vertex list handed to the solvers is `[start, interior.., end]`; the
//! solvers choose the order of the interior vertices. Two routes are
//! provided: exhaustive enumeration over a cached permutation table, and a
//! subset dynamic program. Both break exact ties towards the
//! lexicographically smallest interior order.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest interior count enumerated by brute force (9! orderings).
pub const MAX_BRUTE_INTERIOR: usize = 9;
/// Largest interior count accepted by the subset DP.
pub const MAX_DP_INTERIOR: usize = 19;
/// Interior counts at or above this use the DP under [`Strategy::Auto`].
pub const AUTO_DP_FROM_INTERIOR: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Brute force for up to 6 interior vertices (k <= 7), DP above.
    #[default]
    Auto,
    BruteForce,
    Dp,
}

/// Symmetric dense distance matrix.
#[derive(Debug, Clone, Default)]
pub struct DistMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            d: vec![0.0; n * n],
        }
    }

    /// Refill with `dist(i, j)` for `i < j`, mirroring to the lower half.
    pub fn fill(&mut self, n: usize, mut dist: impl FnMut(usize, usize) -> f64) {
        self.n = n;
        self.d.clear();
        self.d.resize(n * n, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                let v = dist(i, j);
                self.d[i * n + j] = v;
                self.d[j * n + i] = v;
            }
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// All orderings of `0..interior` in lexicographic order, flattened.
#[derive(Debug)]
pub struct PermTable {
    interior: usize,
    flat: Vec<u8>,
}

impl PermTable {
    fn build(interior: usize) -> Self {
        let mut cur: Vec<u8> = (0..interior as u8).collect();
        let mut flat = Vec::new();
        loop {
            flat.extend_from_slice(&cur);
            if !next_permutation(&mut cur) {
                break;
            }
        }
        Self { interior, flat }
    }

    /// Shared table for `interior` free vertices, built on first use.
    pub fn for_interior(interior: usize) -> Result<&'static PermTable> {
        static TABLES: [OnceLock<PermTable>; MAX_BRUTE_INTERIOR + 1] =
            [const { OnceLock::new() }; MAX_BRUTE_INTERIOR + 1];
        if interior > MAX_BRUTE_INTERIOR {
            return Err(Error::TooLarge {
                k: interior + 1,
                limit: MAX_BRUTE_INTERIOR + 1,
            });
        }
        Ok(TABLES[interior].get_or_init(|| PermTable::build(interior)))
    }

    /// The table of `Pi_k`: orderings of `{0..k}` fixing 0 first and k last.
    pub fn for_k(k: usize) -> Result<&'static PermTable> {
        if k < 1 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Self::for_interior(k - 1)
    }

    pub fn interior(&self) -> usize {
        self.interior
    }

    pub fn len(&self) -> usize {
        self.flat.len().checked_div(self.interior).unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interior order number `idx`, as positions `0..interior`.
    pub fn interior_order(&self, idx: usize) -> &[u8] {
        &self.flat[idx * self.interior..(idx + 1) * self.interior]
    }

    /// Full orderings `0, .., k` with `k = interior + 1`.
    pub fn orderings(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let k = self.interior + 1;
        (0..self.len()).map(move |i| {
            let mut v = Vec::with_capacity(k + 1);
            v.push(0);
            v.extend(self.interior_order(i).iter().map(|&p| p as usize + 1));
            v.push(k);
            v
        })
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Reusable scratch for the path solvers.
#[derive(Debug, Default, Clone)]
pub struct PathSolver {
    table: Vec<f64>,
}

impl PathSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Shortest path through `verts` (first and last fixed). When `order` is
    /// given it receives the optimal vertex sequence.
    pub fn solve(
        &mut self,
        dist: &DistMatrix,
        verts: &[usize],
        strategy: Strategy,
        order: Option<&mut Vec<usize>>,
    ) -> Result<f64> {
        if verts.is_empty() {
            return Err(Error::InvalidArgument("empty vertex list".into()));
        }
        let interior = verts.len().saturating_sub(2);
        let use_dp = match strategy {
            Strategy::Auto => interior >= AUTO_DP_FROM_INTERIOR,
            Strategy::BruteForce => false,
            Strategy::Dp => true,
        };
        if use_dp {
            self.dp(dist, verts, order)
        } else {
            brute_force(dist, verts, order)
        }
    }

    fn dp(
        &mut self,
        dist: &DistMatrix,
        verts: &[usize],
        order: Option<&mut Vec<usize>>,
    ) -> Result<f64> {
        let n = verts.len();
        if n == 1 {
            if let Some(o) = order {
                o.clear();
                o.push(verts[0]);
            }
            return Ok(0.0);
        }
        let q = n - 2;
        if q > MAX_DP_INTERIOR {
            return Err(Error::TooLarge {
                k: q + 1,
                limit: MAX_DP_INTERIOR + 1,
            });
        }
        let start = verts[0];
        let end = verts[n - 1];
        let inner = &verts[1..n - 1];
        if q == 0 {
            if let Some(o) = order {
                o.clear();
                o.extend_from_slice(&[start, end]);
            }
            return Ok(dist.get(start, end));
        }

        // g[mask * q + j]: cheapest path from inner[j] through every vertex
        // of `mask` (which excludes j) ending at `end`.
        let full = (1usize << q) - 1;
        self.table.clear();
        self.table.resize((full + 1) * q, f64::INFINITY);
        let g = &mut self.table;
        for j in 0..q {
            g[j] = dist.get(inner[j], end);
        }
        for mask in 1..full {
            for j in 0..q {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let vj = inner[j];
                let mut best = f64::INFINITY;
                let mut rest = mask;
                while rest != 0 {
                    let l = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let c = dist.get(vj, inner[l]) + g[(mask ^ (1 << l)) * q + l];
                    if c < best {
                        best = c;
                    }
                }
                g[mask * q + j] = best;
            }
        }

        let mut best = f64::INFINITY;
        for j in 0..q {
            let c = dist.get(start, inner[j]) + g[(full ^ (1 << j)) * q + j];
            if c < best {
                best = c;
            }
        }

        if let Some(o) = order {
            o.clear();
            o.push(start);
            let mut cur = start;
            let mut mask = full;
            while mask != 0 {
                let mut pick = usize::MAX;
                let mut pick_cost = f64::INFINITY;
                let mut rest = mask;
                while rest != 0 {
                    let l = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let c = dist.get(cur, inner[l]) + g[(mask ^ (1 << l)) * q + l];
                    if c < pick_cost {
                        pick_cost = c;
                        pick = l;
                    }
                }
                mask ^= 1 << pick;
                cur = inner[pick];
                o.push(cur);
            }
            o.push(end);
        }
        Ok(best)
    }
}

fn brute_force(dist: &DistMatrix, verts: &[usize], order: Option<&mut Vec<usize>>) -> Result<f64> {
    let n = verts.len();
    if n == 1 {
        if let Some(o) = order {
            o.clear();
            o.push(verts[0]);
        }
        return Ok(0.0);
    }
    let q = n - 2;
    let table = PermTable::for_interior(q)?;
    let start = verts[0];
    let end = verts[n - 1];
    let inner = &verts[1..n - 1];
    let mut best = f64::INFINITY;
    let mut best_idx = 0;
    for idx in 0..table.len() {
        let perm = table.interior_order(idx);
        let mut prev = start;
        let mut len = 0.0;
        for &p in perm {
            let v = inner[p as usize];
            len += dist.get(prev, v);
            prev = v;
        }
        len += dist.get(prev, end);
        if len < best {
            best = len;
            best_idx = idx;
        }
    }
    if let Some(o) = order {
        o.clear();
        o.push(start);
        o.extend(
            table
                .interior_order(best_idx)
                .iter()
                .map(|&p| inner[p as usize]),
        );
        o.push(end);
    }
    Ok(best)
}
