//! Monte Carlo estimates of the tuple and crossover band constants.
//!
//! Each replicate draws one [`CrossSample`](crate::sampling::CrossSample) from its chunk's stream and
//! records `length / (k h)`. Both methods consume the stream identically, so
//! a tuple run and a crossover run with the same seed and chunk count see
//! exactly the same tuples and their difference is a paired comparison.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::crossover;
use crate::error::{invalid, Error, Result};
use crate::exec::{map_chunks, split_even, Execution};
use crate::sampling::StreamKey;
use crate::stats::RunningStats;
use crate::tuple_geometry::{BandParams, TupleEvaluator, MAX_K};

/// Largest replicate count whose totals stay exact in `f64`.
pub const MAX_REPLICATES: u64 = 1 << 53;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Best within-band permutation.
    Tuple,
    /// Within-band permutation or band crossover, whichever is shorter.
    Crossover,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Tuple => "tuple",
            Method::Crossover => "crossover",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tuple" => Ok(Method::Tuple),
            "crossover" => Ok(Method::Crossover),
            other => Err(invalid(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub method: Method,
    pub k: usize,
    pub h2: f64,
    #[serde(rename = "M")]
    pub replicates: u64,
    pub seed: u64,
    pub chunks: u64,
}

impl EstimateConfig {
    pub fn new(method: Method, k: usize, h2: f64, replicates: u64, seed: u64, chunks: u64) -> Self {
        Self {
            method,
            k,
            h2,
            replicates,
            seed,
            chunks,
        }
    }

    pub fn validate(&self) -> Result<BandParams> {
        let params = BandParams::new(self.h2, self.k)?;
        if self.k > MAX_K {
            return Err(Error::TooLarge {
                k: self.k,
                limit: MAX_K,
            });
        }
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if self.replicates > MAX_REPLICATES {
            return Err(invalid(format!(
                "replicate count {} overflows the exact-count limit {MAX_REPLICATES}",
                self.replicates
            )));
        }
        if self.chunks == 0 || self.chunks > self.replicates {
            return Err(invalid(format!(
                "chunks must lie in 1..={}, got {}",
                self.replicates, self.chunks
            )));
        }
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    #[serde(flatten)]
    pub config: EstimateConfig,
    pub mean: f64,
    pub std_err: f64,
    pub wall_seconds: f64,
    #[serde(skip)]
    pub count: u64,
    /// Mean horizontal span `x_k` over the same replicates.
    #[serde(skip)]
    pub mean_span: f64,
}

#[derive(Debug, Clone, Default)]
struct ChunkStats {
    tuple: RunningStats,
    crossover: RunningStats,
    span: RunningStats,
}

impl ChunkStats {
    fn merge(&mut self, other: &ChunkStats) {
        self.tuple.merge(&other.tuple);
        self.crossover.merge(&other.crossover);
        self.span.merge(&other.span);
    }
}

fn run_chunk(
    params: BandParams,
    key: StreamKey,
    len: u64,
    with_crossover: bool,
) -> Result<ChunkStats> {
    let k = params.k();
    let scale = 1.0 / (k as f64 * params.h());
    let mut stream = key.stream();
    let mut ev = TupleEvaluator::new(params);
    let mut cross = stream.cross(k)?;
    let mut first = true;
    let mut out = ChunkStats::default();
    for _ in 0..len {
        if !first {
            stream.fill_cross(&mut cross);
        }
        first = false;
        ev.load(&cross.tuple)?;
        let within = ev.solve(None, None)?;
        out.tuple.push(within * scale);
        out.span.push(cross.tuple.span());
        if with_crossover {
            let v = crossover::evaluate_loaded(&mut ev, &cross, within)?;
            out.crossover.push(v.length * scale);
        }
    }
    Ok(out)
}

fn run(
    config: &EstimateConfig,
    with_crossover: bool,
    exec: Execution,
) -> Result<(ChunkStats, f64)> {
    let params = config.validate()?;
    let start = Instant::now();
    let parts: Vec<(u64, u64)> = split_even(config.replicates, config.chunks).collect();
    let chunks = map_chunks(parts.len(), exec, |i| {
        run_chunk(
            params,
            StreamKey::new(config.seed, i as u64),
            parts[i].1,
            with_crossover,
        )
    });
    let mut total = ChunkStats::default();
    for c in chunks {
        total.merge(&c?);
    }
    Ok((total, start.elapsed().as_secs_f64()))
}

fn result(
    config: EstimateConfig,
    stats: &RunningStats,
    span: &RunningStats,
    wall: f64,
) -> EstimateResult {
    EstimateResult {
        config,
        mean: stats.mean(),
        std_err: stats.std_err(),
        wall_seconds: wall,
        count: stats.count(),
        mean_span: span.mean(),
    }
}

pub fn estimate(config: &EstimateConfig) -> Result<EstimateResult> {
    estimate_with(config, Execution::Parallel)
}

pub fn estimate_with(config: &EstimateConfig, exec: Execution) -> Result<EstimateResult> {
    let crossover = config.method == Method::Crossover;
    let (stats, wall) = run(config, crossover, exec)?;
    let s = if crossover {
        &stats.crossover
    } else {
        &stats.tuple
    };
    Ok(result(*config, s, &stats.span, wall))
}

/// Both estimators from a single pass over the replicate stream. The
/// results equal separate [`estimate`] calls with each method.
pub fn estimate_paired(
    config: &EstimateConfig,
    exec: Execution,
) -> Result<(EstimateResult, EstimateResult)> {
    let (stats, wall) = run(config, true, exec)?;
    let tuple_cfg = EstimateConfig {
        method: Method::Tuple,
        ..*config
    };
    let cross_cfg = EstimateConfig {
        method: Method::Crossover,
        ..*config
    };
    Ok((
        result(tuple_cfg, &stats.tuple, &stats.span, wall),
        result(cross_cfg, &stats.crossover, &stats.span, wall),
    ))
}

/// Tuple mean minus crossover mean for one `(k, h2)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub k: usize,
    pub h2: f64,
    pub tuple_mean: f64,
    pub crossover_mean: f64,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub results: Vec<Result<EstimateResult>>,
    pub improvements: Vec<Improvement>,
}

/// Run every config in order. Per-config failures are reported in place.
/// An improvement row is added for each tuple/crossover pair that shares
/// `(k, h2, M, seed, chunks)`.
pub fn sweep(configs: &[EstimateConfig]) -> Result<SweepReport> {
    sweep_with(configs, Execution::Parallel)
}

pub fn sweep_with(configs: &[EstimateConfig], exec: Execution) -> Result<SweepReport> {
    if configs.is_empty() {
        return Err(invalid("sweep needs at least one config"));
    }
    let results: Vec<Result<EstimateResult>> =
        configs.iter().map(|c| estimate_with(c, exec)).collect();
    let ok: Vec<&EstimateResult> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let same_cell = |a: &EstimateConfig, b: &EstimateConfig| {
        a.k == b.k
            && a.h2 == b.h2
            && a.replicates == b.replicates
            && a.seed == b.seed
            && a.chunks == b.chunks
    };
    let mut improvements = Vec::new();
    for t in ok.iter().filter(|r| r.config.method == Method::Tuple) {
        if let Some(c) = ok
            .iter()
            .find(|r| r.config.method == Method::Crossover && same_cell(&r.config, &t.config))
        {
            improvements.push(Improvement {
                k: t.config.k,
                h2: t.config.h2,
                tuple_mean: t.mean,
                crossover_mean: c.mean,
                delta: t.mean - c.mean,
            });
        }
    }
    Ok(SweepReport {
        results,
        improvements,
    })
}
