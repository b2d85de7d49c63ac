//! Triangle diagram `Σ_{x,y} τ(0,x) τ(x,y) τ(y,0)` truncated to `|x|, |y| <= R`,
//! with the non-backtracking tail bound.

use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::group::GroupSpec;
use crate::par::run_trials;
use crate::perc::cluster::root_cluster_in_ball;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagramMethod {
    ExactTree,
    MonteCarlo,
}

/// A truncated diagram sum and what is known about the remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramResult {
    pub value: f64,
    /// Standard error of `value` (zero for exact sums).
    pub se: f64,
    pub truncation: usize,
    /// Rigorous bound on the omitted terms, if the chain condition holds.
    pub tail_bound: Option<f64>,
    /// Exact omitted mass where a closed form is available.
    pub exact_tail: Option<f64>,
    pub certified: bool,
    pub method: DiagramMethod,
    /// `p` for the triangle, `z` for the bubble.
    pub parameter: f64,
    pub rho_ub: Option<f64>,
    pub degree: usize,
    /// Geometric ratio of the tail chain; must be `< 1`.
    pub lambda: Option<f64>,
}

impl DiagramResult {
    /// Best available upper estimate of the full sum.
    pub fn upper(&self) -> Option<f64> {
        let tail = self.exact_tail.or(self.tail_bound)?;
        Some(self.value + tail)
    }
}

/// `Σ_{s > n} C(s+2, 2) λ^s`.
pub fn triple_tail(lambda: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    let mut s = n + 1;
    let mut pow = lambda.powi(s as i32);
    loop {
        let term = (s + 1) as f64 * (s + 2) as f64 / 2.0 * pow;
        sum += term;
        if term < 1e-17 * sum || pow == 0.0 {
            break;
        }
        s += 1;
        pow *= lambda;
    }
    sum
}

/// Tail of the triangle sum beyond truncation `R`:
/// `d³ / ((d-1)³ (1-ρ)³) · Σ_{s>R} C(s+2,2) λ^s` with `λ = p (d-1) ρ`.
pub fn triangle_tail_bound(d: usize, p: f64, rho_ub: f64, truncation: usize) -> Option<f64> {
    let lambda = p * (d - 1) as f64 * rho_ub;
    if !(lambda < 1.0 && rho_ub < 1.0) {
        return None;
    }
    if p == 0.0 {
        return Some(0.0);
    }
    let pre = (d as f64 / ((d - 1) as f64 * (1.0 - rho_ub))).powi(3);
    Some(pre * triple_tail(lambda, truncation))
}

/// Number of `y` with `|y| = s` whose geodesic shares exactly `k` letters with
/// that of a fixed `x`, `|x| = r`, in the `d`-regular tree.
fn tree_pair_count(d: usize, r: usize, s: usize, k: usize) -> f64 {
    if k == s {
        return if s <= r { 1.0 } else { 0.0 };
    }
    let branch = match (k == 0, k == r) {
        (true, true) => d,
        (true, false) => d - 1,
        (false, true) => d - 1,
        (false, false) => d - 2,
    };
    branch as f64 * ((d - 1) as f64).powi((s - k - 1) as i32)
}

/// Truncated triangle sum on the `d`-regular tree with `τ(x, y) = p^{dist}`,
/// by counting pairs through their common geodesic prefix.
pub fn tree_triangle_truncated(d: usize, p: f64, truncation: usize) -> f64 {
    let mut total = 0.0;
    for r in 0..=truncation {
        let sphere = if r == 0 { 1.0 } else { d as f64 * ((d - 1) as f64).powi(r as i32 - 1) };
        let mut inner = 0.0;
        for s in 0..=truncation {
            for k in 0..=r.min(s) {
                let c = tree_pair_count(d, r, s, k);
                if c > 0.0 {
                    inner += c * p.powi((r + s - 2 * k + s) as i32);
                }
            }
        }
        total += sphere * p.powi(r as i32) * inner;
    }
    total
}

/// Closed form of the full tree triangle sum for `(d-1) p² < 1`.
pub fn tree_triangle_limit(d: usize, p: f64) -> f64 {
    let (df, u) = (d as f64, p * p);
    let a = u / (1.0 - (df - 1.0) * u);
    let diagonal = 1.0 + 2.0 * df * a + df * (df - 1.0) * a * a;
    let off = df * a * (1.0 + 2.0 * (df - 1.0) * a + (df - 1.0) * (df - 2.0) * a * a);
    diagonal + off
}

/// Triangle sum over a ball from per-vertex two-point values on a ball of
/// radius `>= 2R`. Returns the sum and the gradient with respect to each τ.
pub fn triangle_on_ball(big: &Ball, truncation: usize, tau: &[f64]) -> (f64, Vec<f64>) {
    let spec = big.spec();
    let n = big.prefix_len(truncation);
    let inv: Vec<_> = (0..n as u32).map(|x| spec.inverse(big.word(x))).collect();
    let mut total = 0.0;
    let mut grad = vec![0.0; big.len()];
    for x in 0..n {
        for y in 0..n as u32 {
            let w = spec.mul(&inv[x], big.word(y));
            let wi = big.index_of(&w).expect("x^-1 y lies within distance 2R") as usize;
            let (tx, tw, ty) = (tau[x], tau[wi], tau[y as usize]);
            total += tx * tw * ty;
            grad[x] += tw * ty;
            grad[wi] += tx * ty;
            grad[y as usize] += tx * tw;
        }
    }
    (total, grad)
}

/// Triangle diagram at `p` truncated to radius `R`.
///
/// On trees the exact two-point function is used; otherwise `τ` is
/// estimated per vertex on the radius-`2R` ball and its sampling error is
/// propagated in quadrature.
#[allow(clippy::too_many_arguments)]
pub fn triangle_diagram(
    spec: &GroupSpec,
    p: f64,
    truncation: usize,
    method: DiagramMethod,
    rho_ub: Option<f64>,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<DiagramResult, crate::ball::BallError> {
    let d = spec.degree();
    let (value, se) = match method {
        DiagramMethod::ExactTree => (tree_triangle_truncated(d, p, truncation), 0.0),
        DiagramMethod::MonteCarlo => {
            let big = Ball::build(spec, 2 * truncation)?;
            let hits = run_trials(trials, workers, |t| root_cluster_in_ball(&big, p, seed, t));
            let mut tau = vec![0.0; big.len()];
            for h in &hits {
                for (v, &c) in h.iter().enumerate() {
                    if c {
                        tau[v] += 1.0;
                    }
                }
            }
            for t in tau.iter_mut() {
                *t /= trials as f64;
            }
            let (value, grad) = triangle_on_ball(&big, truncation, &tau);
            let var: f64 = grad
                .iter()
                .zip(&tau)
                .map(|(g, t)| g * g * t * (1.0 - t) / trials as f64)
                .sum();
            (value, var.sqrt())
        }
    };
    let lambda = rho_ub.map(|r| p * (d - 1) as f64 * r);
    let tail_bound = rho_ub.and_then(|r| triangle_tail_bound(d, p, r, truncation));
    let exact_tail = (method == DiagramMethod::ExactTree && (d - 1) as f64 * p * p < 1.0)
        .then(|| (tree_triangle_limit(d, p) - value).max(0.0));
    Ok(DiagramResult {
        value,
        se,
        truncation,
        tail_bound,
        exact_tail,
        certified: tail_bound.is_some(),
        method,
        parameter: p,
        rho_ub,
        degree: d,
        lambda,
    })
}
