//! Data-parallel execution helpers.
//!
//! Batch workloads go through [`map_collect`], which fans out over rayon
//! when the `parallel` feature is enabled and falls back to a plain
//! sequential loop otherwise. [`map_collect_seq`] is always sequential;
//! the bench suite uses it as the comparison baseline.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when built with the `parallel` feature.
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Sequential counterpart of [`map_collect`], independent of feature flags.
pub fn map_collect_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// True when this build routes batch work through rayon.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
