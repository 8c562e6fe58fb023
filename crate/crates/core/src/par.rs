//! Data-parallel helpers. With the `parallel` feature (default) work is spread
//! over the rayon pool; without it, or with [`Strategy::Sequential`], the same
//! closures run in a plain loop. Results always come back in input order.

/// How independent work items are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Strategy {
    /// Whether this build can actually run [`Strategy::Parallel`] concurrently.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// `f(0), f(1), …, f(n-1)` collected in index order.
pub fn map_range<R, F>(n: usize, strategy: Strategy, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// `f` applied to each item, collected in input order.
pub fn map_slice<T, R, F>(items: &[T], strategy: Strategy, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_range(items.len(), strategy, |i| f(&items[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_preserve_order() {
        let seq = map_range(1000, Strategy::Sequential, |i| i * i);
        let par = map_range(1000, Strategy::Parallel, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
        let words = ["a", "bb", "ccc"];
        assert_eq!(map_slice(&words, Strategy::Parallel, |w| w.len()), vec![1, 2, 3]);
    }
}
