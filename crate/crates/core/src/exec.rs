//! Execution helpers: data-parallel index maps and a deterministic
//! pairwise reduction.
//!
//! With the `parallel` feature (the default) [`map_indexed`] dispatches onto
//! the rayon thread pool; without it the same call runs sequentially on the
//! calling thread. Results are always collected in index order and floating
//! sums go through [`pairwise_sum`], so every quantity in this crate is
//! bitwise identical in both modes and for any thread count.

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential twin of [`map_indexed`], always available so tests and
/// benchmarks can compare both execution paths in one build.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Number of leaves below which [`pairwise_sum_by`] folds sequentially.
const PAIRWISE_LEAF: usize = 32;

/// Sum of `f` over `items` using pairwise (tree) splitting.
///
/// The reduction order depends only on `items.len()`, never on thread
/// scheduling, and the error grows like O(log n) instead of O(n).
pub fn pairwise_sum_by<T, F>(items: &[T], f: F) -> f64
where
    F: Fn(&T) -> f64 + Copy,
{
    if items.len() <= PAIRWISE_LEAF {
        return items.iter().fold(0.0, |acc, x| acc + f(x));
    }
    let mid = items.len() / 2;
    pairwise_sum_by(&items[..mid], f) + pairwise_sum_by(&items[mid..], f)
}

/// Pairwise sum of a float slice. See [`pairwise_sum_by`].
pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values, |&x| x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_matches_sequential_twin() {
        let par = map_indexed(1000, |i| (i as f64).sqrt());
        let seq = map_indexed_seq(1000, |i| (i as f64).sqrt());
        assert_eq!(par, seq);
    }

    #[test]
    fn pairwise_sum_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
    }

    #[test]
    fn pairwise_sum_is_length_deterministic() {
        // Same slice, same result, regardless of how many times we ask.
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64 * 0.1).sin()).collect();
        let a = pairwise_sum(&xs);
        let b = pairwise_sum(&xs);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn pairwise_sum_propagates_infinity() {
        let xs = vec![1.0, f64::INFINITY, 2.0];
        assert!(pairwise_sum(&xs).is_infinite());
    }
}
