//! Execution knobs shared by every module: the size budget and the
//! parallel/sequential switch.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_SIZE_BUDGET: usize = 2_000_000;

static SIZE_BUDGET: AtomicUsize = AtomicUsize::new(DEFAULT_SIZE_BUDGET);
static SEQUENTIAL: AtomicBool = AtomicBool::new(false);

pub fn size_budget() -> usize {
    SIZE_BUDGET.load(Ordering::Relaxed)
}

pub fn set_size_budget(n: usize) {
    SIZE_BUDGET.store(n, Ordering::Relaxed);
}

/// Fails with `SizeBudgetExceeded` when `size` basis elements exceed the budget.
pub fn check_budget(what: impl FnOnce() -> String, size: u128) -> Result<usize> {
    let budget = size_budget();
    if size > budget as u128 {
        return Err(Error::SizeBudgetExceeded { what: what(), size, budget });
    }
    Ok(size as usize)
}

/// `base^exp` without overflow, for budget checks.
pub fn pow_size(base: usize, exp: usize) -> u128 {
    let mut r: u128 = 1;
    for _ in 0..exp {
        r = r.saturating_mul(base as u128);
    }
    r
}

pub fn set_sequential(on: bool) {
    SEQUENTIAL.store(on, Ordering::Relaxed);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !SEQUENTIAL.load(Ordering::Relaxed)
}

/// Runs `f` with the sequential fallback forced, restoring the previous mode.
pub fn sequentially<T>(f: impl FnOnce() -> T) -> T {
    let prev = SEQUENTIAL.swap(true, Ordering::Relaxed);
    let out = f();
    SEQUENTIAL.store(prev, Ordering::Relaxed);
    out
}

/// Ordered map over `0..n`.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Ordered map over a slice.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Ordered map over owned items.
pub fn map_vec<S, T, F>(items: Vec<S>, f: F) -> Vec<T>
where
    S: Send,
    T: Send,
    F: Fn(S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    items.into_iter().map(f).collect()
}

/// Runs two closures, concurrently when parallelism is on.
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return rayon::join(a, b);
    }
    (a(), b())
}

/// Configures the global worker pool; a no-op without the `parallel` feature.
pub fn init_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}
