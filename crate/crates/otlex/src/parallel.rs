//! Thread plumbing for the row-parallel kernels.
//!
//! The worker count is capped by the `OTLEX_THREADS` environment variable
//! (0 or 1 selects the sequential path). Every parallel loop in this crate
//! splits work by output row, and each row is filled by a fixed sequential
//! recipe, so results are bitwise identical at any thread count.

use std::sync::OnceLock;

static THREADS: OnceLock<usize> = OnceLock::new();

fn resolve() -> usize {
    let n = match std::env::var("OTLEX_THREADS") {
        Ok(v) => v.trim().parse::<usize>().unwrap_or(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    };
    if n > 1 {
        // The global pool may already exist (e.g. inside a test harness);
        // in that case we keep whatever size it was built with.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    n
}

/// Effective thread cap for this process. Resolved once on first use.
pub fn threads() -> usize {
    *THREADS.get_or_init(resolve)
}

/// Apply `f` to every `cols`-wide row of a row-major buffer.
///
/// `f` must depend only on the row index and write only through its slice.
pub(crate) fn for_each_row<F>(buf: &mut [f64], cols: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if cols == 0 || buf.is_empty() {
        return;
    }
    if threads() <= 1 {
        for (i, row) in buf.chunks_mut(cols).enumerate() {
            f(i, row);
        }
    } else {
        use rayon::prelude::*;
        buf.par_chunks_mut(cols)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
}
