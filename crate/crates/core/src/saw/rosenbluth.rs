//! Rosenbluth sampling of self-avoiding walks.
//!
//! A walk grows one step at a time, choosing uniformly among the unvisited
//! neighbours; its weight is the product of the number of choices seen. The
//! prefix of length `n` of such a walk is a Rosenbluth walk of length `n`, so
//! one run to `n_max` gives unbiased estimates `E[W_n] = c_n` for every
//! `n <= n_max`. Dead ends keep weight 0 from then on.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::group::{GroupSpec, Word};
use crate::par::run_trials;
use crate::rng::CounterRng;
use crate::stats::{mean_se, MeanSe};

/// RNG stream reserved for Rosenbluth walks.
const STREAM: u64 = 0x5157;

#[derive(Debug, Clone, PartialEq)]
struct Sample {
    /// `weights[n]`, `n = 0..=n_max`.
    weights: Vec<f64>,
    /// Endpoint distance after `n` steps (meaningful when the weight is > 0).
    dists: Vec<u32>,
}

fn grow(spec: &GroupSpec, n_max: usize, rng: &mut CounterRng) -> Sample {
    let d = spec.degree();
    let mut path: Vec<Word> = vec![Word::identity()];
    let mut weights = vec![1.0; n_max + 1];
    let mut dists = vec![0; n_max + 1];
    let mut w = 1.0;
    let mut options: Vec<Word> = Vec::with_capacity(d);
    for n in 1..=n_max {
        let cur = path.last().expect("path is nonempty");
        options.clear();
        for k in 0..d {
            let next = spec.mul_generator(cur, k);
            if !path.contains(&next) {
                options.push(next);
            }
        }
        if options.is_empty() {
            for x in &mut weights[n..] {
                *x = 0.0;
            }
            break;
        }
        w *= options.len() as f64;
        let pick = options.swap_remove(rng.random_range(0..options.len()));
        dists[n] = spec.word_length(&pick);
        path.push(pick);
        weights[n] = w;
    }
    Sample { weights, dists }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosenbluthResult {
    pub n_max: usize,
    pub trials: u64,
    pub seed: u64,
    /// `c_hat[n]`: mean weight with its standard error.
    pub c_hat: Vec<MeanSe>,
    /// Weighted mean of `dist(0, SAW(n)) / n`.
    pub speed: Vec<f64>,
    pub speed_se: Vec<f64>,
    /// Trials that dead-ended before `n_max`.
    pub dead_ends: u64,
}

pub fn rosenbluth_sampler(
    spec: &GroupSpec,
    n_max: usize,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> RosenbluthResult {
    let samples = run_trials(trials, workers, |t| {
        let mut rng = CounterRng::with_stream(seed, STREAM, t);
        grow(spec, n_max, &mut rng)
    });
    let mut c_hat = Vec::with_capacity(n_max + 1);
    let mut speed = Vec::with_capacity(n_max + 1);
    let mut speed_se = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let ws: Vec<f64> = samples.iter().map(|s| s.weights[n]).collect();
        c_hat.push(mean_se(&ws));
        if n == 0 {
            speed.push(f64::NAN);
            speed_se.push(f64::NAN);
            continue;
        }
        let total: f64 = ws.iter().sum();
        let ratio = samples
            .iter()
            .map(|s| s.weights[n] * s.dists[n] as f64)
            .sum::<f64>()
            / total
            / n as f64;
        // Delta-method standard error of a ratio estimator.
        let dev: f64 = samples
            .iter()
            .map(|s| {
                let e = s.weights[n] * (s.dists[n] as f64 / n as f64 - ratio);
                e * e
            })
            .sum();
        speed.push(ratio);
        speed_se.push(dev.sqrt() / total);
    }
    let dead_ends = samples.iter().filter(|s| s.weights[n_max] == 0.0).count() as u64;
    RosenbluthResult { n_max, trials, seed, c_hat, speed, speed_se, dead_ends }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_weights_are_deterministic() {
        let s = GroupSpec::parse("Z*Z").unwrap();
        let r = rosenbluth_sampler(&s, 6, 50, 1, None);
        assert_eq!(r.c_hat[1].mean, 4.0);
        assert_eq!(r.c_hat[1].se, 0.0);
        assert_eq!(r.c_hat[6].mean, 4.0 * 3f64.powi(5));
        assert_eq!(r.c_hat[6].se, 0.0);
        assert!(r.speed[1..].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pentagon_mean_weight() {
        let s = GroupSpec::parse("Z5*Z5").unwrap();
        let r = rosenbluth_sampler(&s, 5, 10_000, 3, None);
        let c5 = r.c_hat[5];
        assert!((c5.mean - 320.0).abs() < 3.0 * c5.se, "{c5:?}");
    }
}
