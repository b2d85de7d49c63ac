//! Deterministic parallel trial execution.
//!
//! Trials are computed in parallel and collected in trial order, so every
//! downstream reduction sees the same sequence whatever the worker count.

use rayon::prelude::*;

/// Runs `f(0..trials)` on `workers` threads (the global pool if `None`) and
/// returns the results in trial order.
pub fn run_trials<T, F>(trials: u64, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let go = || (0..trials).into_par_iter().map(&f).collect::<Vec<T>>();
    match workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            Ok(pool) => pool.install(go),
            Err(_) => (0..trials).map(&f).collect(),
        },
        None => go(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_trial_order() {
        let a = run_trials(1000, Some(1), |i| i * i);
        let b = run_trials(1000, Some(8), |i| i * i);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }
}
