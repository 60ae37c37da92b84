//! Band tours on concrete point sets.
//!
//! The square is cut into `ceil(sqrt(n)/h)` horizontal bands of height
//! `h/sqrt(n)` (the top band absorbs the remainder). Each band is sorted by
//! `x` and cut into `(k+1)`-tuples that share endpoints; every tuple is
//! reordered by its shortest fixed-endpoint path. With crossover enabled a
//! tuple may instead drop its highest interior vertex `u` and pair it with
//! its nearest neighbour `v` in the band above; the tour then visits `u`
//! right after `v`, which costs at most `2 |uv|`. Band paths are joined
//! boustrophedon-style and closed into one cycle.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::{map_chunks, Execution};
use crate::path::{DistMatrix, PathSolver, Strategy};
use crate::sampling::StreamKey;

pub const MIN_K: usize = 2;
pub const MAX_K: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<[f64; 2]>,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.len() < 3 {
            return Err(invalid(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !p.iter().all(|c| (0.0..=1.0).contains(c)))
        {
            return Err(invalid(format!("point {p:?} lies outside the unit square")));
        }
        Ok(Self { points })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        let a = self.points[i];
        let b = self.points[j];
        (a[0] - b[0]).hypot(a[1] - b[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    pub fn new(ps: &PointSet, order: Vec<usize>) -> Result<Self> {
        let length = cycle_length(ps, &order)?;
        Ok(Self { order, length })
    }
}

/// `n` iid uniform points from stream `(seed, 0)`.
pub fn generate_points(n: usize, seed: u64) -> Result<PointSet> {
    if n < 3 {
        return Err(invalid(format!("need at least 3 points, got {n}")));
    }
    let mut s = StreamKey::new(seed, 0).stream();
    let points = (0..n).map(|_| [s.uniform(), s.uniform()]).collect();
    PointSet::new(points)
}

/// Every index `0..n` exactly once.
pub fn validate(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::MalformedTour(format!(
            "tour has {} entries for {n} points",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n {
            return Err(Error::MalformedTour(format!("index {i} out of range")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::MalformedTour(format!("index {i} visited twice")));
        }
    }
    Ok(())
}

fn cycle_length(ps: &PointSet, order: &[usize]) -> Result<f64> {
    validate(order, ps.n())?;
    let n = order.len();
    Ok((0..n).map(|i| ps.dist(order[i], order[(i + 1) % n])).sum())
}

/// Closed-cycle Euclidean length of `tour.order`.
pub fn tour_length(ps: &PointSet, tour: &Tour) -> Result<f64> {
    cycle_length(ps, &tour.order)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourReport {
    pub tour: Tour,
    pub bands: usize,
    /// Sum over all tuples of the chosen tuple cost (within-band path, or
    /// 2-cycle plus reduced path), before stitching.
    pub band_cost: f64,
    pub crossovers: usize,
}

pub fn build_band_tour(ps: &PointSet, h2: f64, k: usize, use_crossover: bool) -> Result<Tour> {
    Ok(build_band_tour_report(ps, h2, k, use_crossover, Execution::Parallel)?.tour)
}

struct BandPlan {
    path: Vec<usize>,
    cost: f64,
    /// `(u, v)`: visit `u` right after `v`.
    crossings: Vec<(usize, usize)>,
}

pub fn build_band_tour_report(
    ps: &PointSet,
    h2: f64,
    k: usize,
    use_crossover: bool,
    exec: Execution,
) -> Result<TourReport> {
    if !(h2.is_finite() && h2 > 0.0) {
        return Err(invalid(format!("h2 must be positive, got {h2}")));
    }
    if !(MIN_K..=MAX_K).contains(&k) {
        return Err(invalid(format!("k must lie in {MIN_K}..={MAX_K}, got {k}")));
    }
    let n = ps.n();
    if n < k + 1 {
        let tour = exact_small_tour(ps)?;
        return Ok(TourReport {
            band_cost: tour.length,
            tour,
            bands: 1,
            crossovers: 0,
        });
    }

    let h = h2.sqrt();
    let sqrt_n = (n as f64).sqrt();
    let bands = ((sqrt_n / h).ceil() as usize).max(1);
    let band_height = h / sqrt_n;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); bands];
    for (i, p) in ps.points().iter().enumerate() {
        let b = ((p[1] / band_height) as usize).min(bands - 1);
        members[b].push(i);
    }
    for m in members.iter_mut() {
        m.sort_by(|&a, &b| {
            let (pa, pb) = (ps.points[a], ps.points[b]);
            pa[0]
                .total_cmp(&pb[0])
                .then(pa[1].total_cmp(&pb[1]))
                .then(a.cmp(&b))
        });
    }

    let plans = map_chunks(bands, exec, |b| {
        let above = if use_crossover && b + 1 < bands {
            Some(members[b + 1].as_slice())
        } else {
            None
        };
        plan_band(ps, &members[b], above, k)
    });
    let plans: Vec<BandPlan> = plans.into_iter().collect::<Result<_>>()?;

    let mut base = Vec::with_capacity(n);
    let mut forward = true;
    for plan in plans.iter().filter(|p| !p.path.is_empty()) {
        if forward {
            base.extend_from_slice(&plan.path);
        } else {
            base.extend(plan.path.iter().rev());
        }
        forward = !forward;
    }

    let mut next = vec![usize::MAX; n];
    for i in 0..base.len() {
        next[base[i]] = base[(i + 1) % base.len()];
    }
    // Top-down so that a target vertex which itself crossed is already placed.
    let mut crossovers = 0;
    for plan in plans.iter().rev() {
        for &(u, v) in &plan.crossings {
            let w = next[v];
            next[v] = u;
            next[u] = w;
            crossovers += 1;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut cur = base[0];
    for _ in 0..n {
        order.push(cur);
        cur = next[cur];
        if cur == usize::MAX {
            return Err(Error::MalformedTour("broken successor chain".into()));
        }
    }
    let tour = Tour::new(ps, order)?;
    Ok(TourReport {
        tour,
        bands,
        band_cost: plans.iter().map(|p| p.cost).sum(),
        crossovers,
    })
}

fn solver_strategy(verts: usize) -> Strategy {
    if verts >= 9 {
        Strategy::Dp
    } else {
        Strategy::BruteForce
    }
}

fn plan_band(ps: &PointSet, band: &[usize], above: Option<&[usize]>, k: usize) -> Result<BandPlan> {
    let m = band.len();
    let mut plan = BandPlan {
        path: Vec::with_capacity(m),
        cost: 0.0,
        crossings: Vec::new(),
    };
    if m == 0 {
        return Ok(plan);
    }
    plan.path.push(band[0]);
    if m == 1 {
        return Ok(plan);
    }
    let mut claimed = vec![false; above.map_or(0, <[usize]>::len)];
    let mut dist = DistMatrix::default();
    let mut solver = PathSolver::new();
    let mut order = Vec::new();
    let mut verts = Vec::new();
    let mut start = 0;
    while start + 1 < m {
        let end = (start + k).min(m - 1);
        let tuple = &band[start..=end];
        let size = tuple.len();
        dist.fill(size, |i, j| ps.dist(tuple[i], tuple[j]));
        verts.clear();
        verts.extend(0..size);
        let within = solver.solve(&dist, &verts, solver_strategy(size), Some(&mut order))?;
        let mut chosen = within;
        let mut crossing = None;

        if let (Some(up), true) = (above, size >= 3) {
            let j_star = (1..size - 1).fold(1, |best, j| {
                if ps.points[tuple[j]][1] > ps.points[tuple[best]][1] {
                    j
                } else {
                    best
                }
            });
            if let Some((slot, d)) = nearest(ps, up, tuple[j_star]) {
                let cycle = 2.0 * d;
                if !claimed[slot] && cycle < within {
                    verts.clear();
                    verts.extend((0..size).filter(|&j| j != j_star));
                    let mut skip_order = Vec::new();
                    let reduced = solver.solve(
                        &dist,
                        &verts,
                        solver_strategy(size - 1),
                        Some(&mut skip_order),
                    )?;
                    if cycle + reduced < within {
                        chosen = cycle + reduced;
                        claimed[slot] = true;
                        crossing = Some((tuple[j_star], up[slot]));
                        order = skip_order;
                    }
                }
            }
        }
        plan.cost += chosen;
        plan.path.extend(order[1..].iter().map(|&j| tuple[j]));
        if let Some(c) = crossing {
            plan.crossings.push(c);
        }
        start = end;
    }
    Ok(plan)
}

/// Nearest point of the x-sorted band `up` to point `p`: `(slot, distance)`.
fn nearest(ps: &PointSet, up: &[usize], p: usize) -> Option<(usize, f64)> {
    if up.is_empty() {
        return None;
    }
    let [px, py] = ps.points[p];
    let pivot = up.partition_point(|&q| ps.points[q][0] < px);
    let mut best = (usize::MAX, f64::INFINITY);
    let mut consider = |slot: usize| {
        let q = ps.points[up[slot]];
        let dx = q[0] - px;
        if dx * dx >= best.1 * best.1 {
            return false;
        }
        let d = dx.hypot(q[1] - py);
        if d < best.1 {
            best = (slot, d);
        }
        true
    };
    let mut r = pivot;
    while r < up.len() && consider(r) {
        r += 1;
    }
    let mut l = pivot;
    while l > 0 && consider(l - 1) {
        l -= 1;
    }
    Some(best)
}

/// Optimal tour for instances too small to fill one tuple.
fn exact_small_tour(ps: &PointSet) -> Result<Tour> {
    let n = ps.n();
    let mut dist = DistMatrix::default();
    dist.fill(n, |i, j| ps.dist(i, j));
    let mut verts: Vec<usize> = (0..n).collect();
    verts.push(0);
    let mut order = Vec::new();
    PathSolver::new().solve(&dist, &verts, Strategy::Auto, Some(&mut order))?;
    order.pop();
    Tour::new(ps, order)
}

/// Parse `x,y` lines; blank lines, `#` comments and a non-numeric header
/// line are skipped.
pub fn read_points_csv(reader: impl BufRead) -> Result<PointSet> {
    let mut points = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split(',').map(str::trim);
        let (Some(xs), Some(ys), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!("line {}: expected `x,y`", lineno + 1)));
        };
        match (xs.parse::<f64>(), ys.parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push([x, y]),
            _ if points.is_empty() && lineno == 0 => continue,
            _ => return Err(Error::Parse(format!("line {}: bad number", lineno + 1))),
        }
    }
    PointSet::new(points)
}

pub fn write_points_csv(ps: &PointSet, mut w: impl Write) -> Result<()> {
    for [x, y] in ps.points() {
        writeln!(w, "{x:?},{y:?}")?;
    }
    Ok(())
}

/// Little-endian `f64` pairs, no header.
pub fn read_points_binary(mut reader: impl Read) -> Result<PointSet> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    if buf.len() % 16 != 0 {
        return Err(Error::Parse(format!(
            "binary point file length {} is not a multiple of 16",
            buf.len()
        )));
    }
    let points = buf
        .chunks_exact(16)
        .map(|c| {
            let x = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let y = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            [x, y]
        })
        .collect();
    PointSet::new(points)
}

pub fn write_points_binary(ps: &PointSet, mut w: impl Write) -> Result<()> {
    for [x, y] in ps.points() {
        w.write_all(&x.to_le_bytes())?;
        w.write_all(&y.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_tour(tour: &Tour, mut w: impl Write) -> Result<()> {
    for i in &tour.order {
        writeln!(w, "{i}")?;
    }
    Ok(())
}

pub fn read_tour_order(reader: impl BufRead) -> Result<Vec<usize>> {
    reader
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| {
            let l = l?;
            l.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("{l:?}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corners() -> PointSet {
        PointSet::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn corner_tours() {
        let ps = corners();
        let t = Tour::new(&ps, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(t.length, 4.0);
        let rev = Tour::new(&ps, vec![3, 2, 1, 0]).unwrap();
        assert_eq!(rev.length, t.length);
        // Too few points for one tuple: solved exactly.
        for k in 4..=8 {
            assert_eq!(build_band_tour(&ps, 4.0, k, true).unwrap().length, 4.0);
        }
        // Two bands of one pair each.
        for k in 2..=3 {
            for cross in [false, true] {
                assert_eq!(build_band_tour(&ps, 2.0, k, cross).unwrap().length, 4.0);
            }
        }
    }

    #[test]
    fn malformed_tours() {
        let ps = corners();
        assert!(Tour::new(&ps, vec![0, 1, 1, 3]).is_err());
        assert!(Tour::new(&ps, vec![0, 1, 2]).is_err());
        assert!(Tour::new(&ps, vec![0, 1, 2, 9]).is_err());
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(vec![[0.0, 0.0], [1.0, 1.0]]).is_err());
        assert!(PointSet::new(vec![[0.0, 0.0], [1.0, 1.0], [1.5, 0.0]]).is_err());
        assert!(generate_points(2, 1).is_err());
        let a = generate_points(3, 1).unwrap();
        assert_eq!(a.n(), 3);
        assert_eq!(a, generate_points(3, 1).unwrap());
    }

    #[test]
    fn builder_rejects_bad_parameters() {
        let ps = generate_points(50, 3).unwrap();
        assert!(build_band_tour(&ps, 0.0, 4, false).is_err());
        assert!(build_band_tour(&ps, 4.0, 1, false).is_err());
        assert!(build_band_tour(&ps, 4.0, 9, false).is_err());
    }

    #[test]
    fn tours_are_valid_across_parameters() {
        for seed in 0..4 {
            let ps = generate_points(2_000, seed).unwrap();
            for k in 2..=8 {
                for h2 in [1.0, 4.0, 9.0] {
                    for cross in [false, true] {
                        let r = build_band_tour_report(&ps, h2, k, cross, Execution::Sequential)
                            .unwrap();
                        validate(&r.tour.order, ps.n()).unwrap();
                        assert_eq!(r.tour.length, tour_length(&ps, &r.tour).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn crossover_never_hurts() {
        for seed in 0..5 {
            let ps = generate_points(5_000, seed).unwrap();
            let plain = build_band_tour_report(&ps, 4.0, 4, false, Execution::Sequential).unwrap();
            let cross = build_band_tour_report(&ps, 4.0, 4, true, Execution::Sequential).unwrap();
            assert!(cross.band_cost <= plain.band_cost);
            assert!(cross.tour.length <= plain.tour.length + 1e-9);
            assert!(cross.crossovers > 0);
        }
    }

    #[test]
    fn io_round_trip() {
        let ps = generate_points(10, 4).unwrap();
        let mut csv = Vec::new();
        write_points_csv(&ps, &mut csv).unwrap();
        assert_eq!(read_points_csv(&csv[..]).unwrap(), ps);
        let with_header = [b"x,y\n".as_slice(), &csv].concat();
        assert_eq!(read_points_csv(&with_header[..]).unwrap(), ps);
        let mut bin = Vec::new();
        write_points_binary(&ps, &mut bin).unwrap();
        assert_eq!(read_points_binary(&bin[..]).unwrap(), ps);
        assert!(read_points_binary(&bin[..15]).is_err());
        let t = build_band_tour(&ps, 4.0, 4, true).unwrap();
        let mut out = Vec::new();
        write_tour(&t, &mut out).unwrap();
        assert_eq!(read_tour_order(&out[..]).unwrap(), t.order);
    }
}
