//! Chunk-level execution.
//!
//! Every parallel computation in the crate is phrased as "evaluate chunk `i`
//! for `i in 0..n`, then fold the results in index order". With the
//! `parallel` feature the chunks run on rayon; without it they run in a plain
//! loop. Results are identical either way because chunks share nothing and
//! the fold order is fixed.

/// How chunked work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Use the rayon pool when the `parallel` feature is enabled, otherwise
    /// fall back to [`Execution::Sequential`].
    #[default]
    Parallel,
    Sequential,
}

/// Evaluate `f(0), .., f(n - 1)` and return the results in index order.
pub fn map_chunks<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Run `f` with the worker count capped at `threads` (no cap when `None`).
///
/// Without the `parallel` feature this simply calls `f`.
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            return pool.install(f);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    f()
}

/// Split `total` items into `chunks` contiguous ranges; the remainder goes to
/// the lowest chunk indices.
pub fn split_even(total: u64, chunks: u64) -> impl Iterator<Item = (u64, u64)> {
    let base = total / chunks;
    let extra = total % chunks;
    (0..chunks).map(move |i| {
        let len = base + u64::from(i < extra);
        let start = i * base + i.min(extra);
        (start, len)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_everything_once() {
        let parts: Vec<_> = split_even(10, 3).collect();
        assert_eq!(parts, vec![(0, 4), (4, 3), (7, 3)]);
        let parts: Vec<_> = split_even(5, 5).collect();
        assert!(parts.iter().all(|&(_, l)| l == 1));
    }

    #[test]
    fn order_is_preserved() {
        let seq = map_chunks(100, Execution::Sequential, |i| i * i);
        let par = map_chunks(100, Execution::Parallel, |i| i * i);
        assert_eq!(seq, par);
        let par4 = with_threads(Some(4), || map_chunks(100, Execution::Parallel, |i| i * i));
        assert_eq!(seq, par4);
    }
}
