//! Index-ordered parallel map with a sequential fallback.
//!
//! Results are always returned in index order, so output does not depend on
//! the number of worker threads.

/// Maps `f` over `0..n`. `jobs == 1` runs on the calling thread; `jobs == 0`
/// uses every available core. Without the `parallel` feature everything runs
/// sequentially.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    if jobs == 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let run = || (0..n).into_par_iter().map(&f).collect();
    if jobs == 0 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => (0..n).map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, _jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Like [`map_indexed`] but stops at the first error (by index).
pub fn try_map_indexed<T, E, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(n, jobs, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_jobs() {
        let seq = map_indexed(1000, 1, |i| i * i);
        for jobs in [0, 2, 8] {
            assert_eq!(map_indexed(1000, jobs, |i| i * i), seq);
        }
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<usize>, usize> = try_map_indexed(100, 4, |i| if i % 30 == 29 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(29));
    }
}
