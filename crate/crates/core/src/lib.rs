//! Constructive solvers for abstract degenerate multi-term fractional Cauchy problems.
//!
//! The crate is organised bottom-up: Mittag-Leffler evaluation and Caputo calculus,
//! polynomial-matrix symbols and their periodic-grid functional calculus, then the
//! two solution constructions (Fourier-multiplier series and sector-contour integrals)
//! and the named physical models that exercise them.

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour_solver;
pub mod degenerate_solver;
pub mod error;
pub mod fractional_calculus;
pub mod physics_models;
pub mod report;
pub mod spectral_calculus;
pub mod special_functions;
pub mod symbol_algebra;
pub mod verify;
pub mod cli;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Upper bound on worker threads, read from `DEGENFRAC_THREADS` (defaults to available cores).
pub fn thread_cap() -> usize {
    std::env::var("DEGENFRAC_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Evaluates f(0..n) on up to `thread_cap()` scoped threads with a fixed contiguous
/// partition, so results never depend on scheduling. The first error by index wins.
pub fn try_par_map<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = thread_cap().min(n.div_ceil(64)).max(1);
    if workers == 1 {
        return (0..n).map(&f).collect();
    }
    let chunk = n.div_ceil(workers);
    let parts: Vec<Result<Vec<T>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || (w * chunk..((w + 1) * chunk).min(n)).map(f).collect::<Result<Vec<T>>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
