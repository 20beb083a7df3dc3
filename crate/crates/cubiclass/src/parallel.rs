//! Data-parallel map helpers with a sequential fallback.
//!
//! Both execution paths are always compiled so benchmarks can compare them;
//! the `parallel` feature only controls whether rayon is linked and which
//! path [`Parallelism::default`] selects.

/// Execution strategy for the embarrassingly parallel scans (discriminant
/// sweeps, form enumeration partitions, per-field classification).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Parallelism::Rayon
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Parallelism::Sequential
    }
}

/// Map `f` over `items`, preserving input order in the output.
pub fn map_collect<T, U, F>(par: Parallelism, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match par {
        Parallelism::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}

/// Map over an integer range, preserving order.
pub fn map_range<U, F>(par: Parallelism, range: std::ops::Range<i64>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(i64) -> U + Sync + Send,
{
    match par {
        Parallelism::Sequential => range.map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            range.into_par_iter().map(f).collect()
        }
    }
}
