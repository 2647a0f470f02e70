//! Order-preserving parallel map over independent sweep cells, with a
//! sequential fallback when the `parallel` feature is disabled. Cells share
//! no mutable state and results come back in input order, so output bytes do
//! not depend on the thread count.

#[cfg(feature = "parallel")]
pub fn map_cells<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_cells<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Sequential map with the same signature, kept unconditionally for direct
/// comparison (benchmarks) and for callers that must not touch the pool.
pub fn map_cells_sequential<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Runs `body` inside a pool of `threads` workers (0 = library default).
/// Without the `parallel` feature the body just runs on the current thread.
pub fn with_threads<R: Send>(threads: usize, body: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return body();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction cannot fail for positive sizes");
        pool.install(body)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        body()
    }
}
