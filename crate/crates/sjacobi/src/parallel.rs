//! Data-parallel iteration with a sequential fallback.
//!
//! With the `parallel` feature the rayon prelude is re-exported; without it the
//! same method names resolve to ordinary iterators.

#[cfg(feature = "parallel")]
pub use rayon::prelude::{IndexedParallelIterator, IntoParallelIterator, ParallelIterator};

#[cfg(not(feature = "parallel"))]
pub use self::fallback::*;

#[cfg(not(feature = "parallel"))]
mod fallback {
    pub use std::iter::Iterator as ParallelIterator;
    pub use std::iter::Iterator as IndexedParallelIterator;

    /// Shim so `into_par_iter()` compiles without rayon.
    pub trait IntoParallelIterator {
        type Item;
        type Iter: Iterator<Item = Self::Item>;
        fn into_par_iter(self) -> Self::Iter;
    }

    impl<I: IntoIterator> IntoParallelIterator for I {
        type Item = I::Item;
        type Iter = I::IntoIter;
        fn into_par_iter(self) -> Self::Iter {
            self.into_iter()
        }
    }
}

/// Map `f` over `0..len`, in parallel when enabled and requested. Output order is
/// always the index order.
pub fn map_indexed<T, F>(len: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..len).into_par_iter().map(f).collect()
    } else {
        (0..len).map(f).collect()
    }
}

/// Worker cap from `SJO_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SJO_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

/// Install the global worker pool honoring `SJO_THREADS`. Later calls are no-ops.
pub fn init_threads() {
    #[cfg(feature = "parallel")]
    {
        static ONCE: std::sync::Once = std::sync::Once::new();
        ONCE.call_once(|| {
            if let Some(n) = thread_cap() {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        });
    }
}
