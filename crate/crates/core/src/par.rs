//! Data-parallel map over independent trials.
//!
//! With the `parallel` feature (on by default) [`par_map`] runs on the rayon
//! global pool; without it, it is the plain sequential loop. [`seq_map`] is
//! always sequential so both paths can be compared in one build.

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    seq_map(items, f)
}

pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// `par_map` over `0..count`.
pub fn par_trials<U, F>(count: u64, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(u64) -> U + Sync + Send,
{
    let idx: Vec<u64> = (0..count).collect();
    par_map(&idx, |t| f(*t))
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
