//! Exact Galton–Watson quantities for bond percolation on the `d`-regular tree.
//!
//! The root has `Bin(d, p)` open children and every other vertex has
//! `Bin(d-1, p)`. Nothing here touches a graph, which is the point: these are
//! the reference values the graph samplers are tested against.

use rand_distr::{Binomial, Distribution};

use crate::rng::CounterRng;

/// `(1 - p + p s)^k`, the generating function of `Bin(k, p)`.
fn pgf(k: usize, p: f64, s: f64) -> f64 {
    (1.0 - p + p * s).powi(k as i32)
}

/// Probability that a non-root vertex's open subtree does not reach `depth`
/// generations below it, for `depth = 0..=max_depth`.
fn miss_probabilities(d: usize, p: f64, max_depth: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_depth + 1);
    let mut e = 0.0;
    out.push(e);
    for _ in 0..max_depth {
        e = pgf(d - 1, p, e);
        out.push(e);
    }
    out
}

/// `P_p(0 <-> S_r)`: the root cluster reaches distance `r`.
pub fn crossing(d: usize, p: f64, r: usize) -> f64 {
    if r == 0 {
        return 1.0;
    }
    let e = miss_probabilities(d, p, r - 1);
    1.0 - pgf(d, p, e[r - 1])
}

/// `P_p(0 <-> S_r)` for `r = 0..=r_max`.
pub fn crossing_curve(d: usize, p: f64, r_max: usize) -> Vec<f64> {
    let e = miss_probabilities(d, p, r_max.saturating_sub(1));
    (0..=r_max)
        .map(|r| if r == 0 { 1.0 } else { 1.0 - pgf(d, p, e[r - 1]) })
        .collect()
}

/// Extinction probability of a non-root subtree by fixed-point iteration from 0.
pub fn extinction_by_iteration(d: usize, p: f64, tol: f64) -> f64 {
    let mut q = 0.0;
    for _ in 0..10_000_000 {
        let next = pgf(d - 1, p, q);
        if (next - q).abs() < tol {
            return next;
        }
        q = next;
    }
    q
}

/// Extinction probability by bisection on `f(q) - q` over `[0, q_min]`,
/// where `q_min` minimises the convex function `f(q) - q`.
pub fn extinction_by_bisection(d: usize, p: f64, tol: f64) -> f64 {
    let k = d - 1;
    let mean = k as f64 * p;
    if mean <= 1.0 {
        return 1.0;
    }
    let g = |q: f64| pgf(k, p, q) - q;
    // f'(q) = k p (1-p+pq)^{k-1} = 1 at the minimiser.
    let q_min = if k == 1 {
        1.0
    } else {
        (((mean).powf(-1.0 / (k - 1) as f64)) - 1.0 + p) / p
    };
    let (mut lo, mut hi) = (0.0f64, q_min.clamp(0.0, 1.0));
    if g(hi) > 0.0 {
        return 1.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `θ(p) = P_p(|C(0)| = ∞)` from the subtree extinction probability.
pub fn survival(d: usize, p: f64) -> f64 {
    // Mean offspring <= 1: extinction is certain.
    if (d - 1) as f64 * p <= 1.0 {
        return 0.0;
    }
    let q = extinction_by_iteration(d, p, 1e-15);
    (1.0 - pgf(d, p, q)).max(0.0)
}

/// Same as [`survival`] using bisection; an independent numerical route.
pub fn survival_by_bisection(d: usize, p: f64) -> f64 {
    let q = extinction_by_bisection(d, p, 1e-15);
    (1.0 - pgf(d, p, q)).max(0.0)
}

/// `E_p|C(0)| = 1 + d p / (1 - (d-1) p)`, infinite from `p_c = 1/(d-1)` on.
pub fn mean_cluster_size(d: usize, p: f64) -> f64 {
    let m = (d - 1) as f64 * p;
    if m >= 1.0 {
        return f64::INFINITY;
    }
    1.0 + d as f64 * p / (1.0 - m)
}

/// `P_p(0 <-> x) = p^k` for `x` at distance `k`.
pub fn two_point(p: f64, dist: usize) -> f64 {
    p.powi(dist as i32)
}

/// Critical probability `1/(d-1)`.
pub fn critical_probability(d: usize) -> f64 {
    1.0 / (d - 1) as f64
}

/// Total progeny of one tree-percolation cluster, simulated generation by
/// generation. Returns `None` once the size exceeds `cap` (censored).
pub fn sample_total_progeny(d: usize, p: f64, cap: usize, rng: &mut CounterRng) -> Option<usize> {
    let root = Binomial::new(d as u64, p).expect("p in [0,1]");
    let mut size = 1usize;
    let mut active = root.sample(rng);
    while active > 0 {
        size += active as usize;
        if size > cap {
            return None;
        }
        // The next generation is a sum of `active` independent Bin(d-1, p).
        active = Binomial::new(active * (d - 1) as u64, p).expect("p in [0,1]").sample(rng);
    }
    Some(size)
}
