//! Batch execution strategy. With the `parallel` feature (default) batch
//! maps fan out over rayon's global pool; without it they run sequentially.
//! Both paths preserve input order, so results are identical either way —
//! the feature only trades wall-clock time.

/// Maps `f` over `items`, parallel when the `parallel` feature is enabled.
///
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Maps `f` over `items`, parallel when the `parallel` feature is enabled.
///
/// Output order always matches input order.
#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Sequential map with the same signature as [`map`]. Always available so
/// the two strategies can be compared directly (e.g. in benchmarks).
pub fn map_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let out = map((0..1000).collect(), |i: i32| i * 2);
        assert_eq!(out, (0..1000).map(|i| i * 2).collect::<Vec<_>>());
    }

    #[test]
    fn map_matches_map_seq() {
        use rand::Rng;
        let f = |i: u64| crate::seed::plan_stream(i, 0).random::<u64>();
        let par: Vec<u64> = map((0..64).collect(), f);
        let seq: Vec<u64> = map_seq((0..64).collect(), f);
        assert_eq!(par, seq);
    }
}
