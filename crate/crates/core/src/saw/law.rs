//! Connective constant bounds, the endpoint law of the uniform self-avoiding
//! walk, its exponential decay, and the walk's speed.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::ball::tree_ball_size;
use crate::saw::census::SawCensus;
use crate::saw::rosenbluth::RosenbluthResult;
use crate::stats::least_squares;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuBounds {
    /// `sequence[i] = c_n^{1/n}` with `n = i + 1`; each is an upper bound on μ.
    pub sequence: Vec<f64>,
    /// `min_n c_n^{1/n}`.
    pub best_upper: f64,
    /// `d - 1` when the graph is a tree.
    pub tree_exact: Option<f64>,
}

impl MuBounds {
    /// μ itself when known, else the best upper bound.
    pub fn value(&self) -> f64 {
        self.tree_exact.unwrap_or(self.best_upper)
    }
}

/// Upper bounds on μ from a census. Submultiplicativity makes every
/// `c_n^{1/n}` an upper bound (μ is their infimum).
pub fn connective_constant(census: &SawCensus, is_tree: bool) -> MuBounds {
    let sequence: Vec<f64> = (1..=census.n_max)
        .map(|n| census.count_f64(n).powf(1.0 / n as f64))
        .collect();
    let best_upper = sequence.iter().cloned().fold(f64::INFINITY, f64::min);
    MuBounds { sequence, best_upper, tree_exact: is_tree.then(|| (census.degree - 1) as f64) }
}

/// Closed-form bounds for the `d`-regular tree, `c_n = d (d-1)^{n-1}`.
pub fn tree_connective_constant(d: usize, n_max: usize) -> MuBounds {
    let sequence: Vec<f64> = (1..=n_max)
        .map(|n| (d as f64).powf(1.0 / n as f64) * ((d - 1) as f64).powf((n - 1) as f64 / n as f64))
        .collect();
    let best_upper = sequence.iter().cloned().fold(f64::INFINITY, f64::min);
    MuBounds { sequence, best_upper, tree_exact: Some((d - 1) as f64) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointRow {
    pub n: usize,
    pub c_n: String,
    pub max_multiplicity: u64,
    pub argmax: String,
    /// `sup_x c_n(x) / c_n`.
    pub sup: f64,
    /// `d (d-1)^{n-1} ρ^n / ((1-ρ) c_n)`, a rigorous bound on `sup`.
    pub bound: Option<f64>,
}

impl EndpointRow {
    pub fn holds(&self) -> Option<bool> {
        self.bound.map(|b| self.sup <= b)
    }
}

/// Law of `SAW(n)` at one length: `c_n(x) / c_n` for every endpoint.
pub fn saw_endpoint_law(census: &SawCensus, n: usize) -> Vec<(String, u64, f64)> {
    let c = census.count_f64(n);
    census.endpoint[n]
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(v, &k)| (census.labels[v].clone(), k, k as f64 / c))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub rows: Vec<EndpointRow>,
    /// `exp(slope)` of `log sup` against `n` over `n >= 1`.
    pub fitted_rate: Option<f64>,
    pub epsilon: Option<f64>,
    /// `(μ̂⁻¹ + ε)(d-1) ρ_ub`.
    pub lambda: Option<f64>,
    /// Smallest `C` with `sup <= C λ^n` over the rows.
    pub shape_constant: Option<f64>,
    /// Every row satisfies its rigorous bound.
    pub all_hold: Option<bool>,
}

/// Endpoint decay across `n = 1..=n_max`.
///
/// Pass/fail uses the per-length bound from `c_n(x) <= d (d-1)^{n-1} q^n(0,x)`
/// and `q^n <= ρ^n / (1-ρ)`. The `C λ^n` shape is reported alongside; `ε`
/// defaults to half the gap that would make `λ = 1`.
pub fn endpoint_decay(census: &SawCensus, mu_upper: f64, rho_ub: Option<f64>, epsilon: Option<f64>) -> DecayReport {
    let d = census.degree;
    let mut rows = Vec::new();
    for n in 1..=census.n_max {
        let (v, m) = census.max_endpoint(n);
        let c = census.count_f64(n);
        let bound = rho_ub.filter(|&r| r < 1.0).map(|r| {
            let nb = census.nbw_count(n).to_f64().unwrap_or(f64::INFINITY);
            nb * r.powi(n as i32) / ((1.0 - r) * c)
        });
        rows.push(EndpointRow {
            n,
            c_n: census.count(n).to_string(),
            max_multiplicity: m,
            argmax: census.labels[v as usize].clone(),
            sup: m as f64 / c,
            bound,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sup.ln()).collect();
    let fitted_rate = least_squares(&xs, &ys).map(|f| f.slope.exp());
    let mu_inv = 1.0 / mu_upper;
    let (epsilon, lambda) = match rho_ub {
        Some(r) => {
            let base = (d - 1) as f64 * r;
            let eps = epsilon.unwrap_or_else(|| 0.5 * (1.0 / base - mu_inv));
            (Some(eps), Some((mu_inv + eps) * base))
        }
        None => (epsilon, None),
    };
    let shape_constant = lambda.map(|l| {
        rows.iter()
            .map(|r| r.sup / l.powi(r.n as i32))
            .fold(0.0f64, f64::max)
    });
    let all_hold = rows.iter().map(|r| r.holds()).collect::<Option<Vec<bool>>>().map(|v| v.iter().all(|&b| b));
    DecayReport { rows, fitted_rate, epsilon, lambda, shape_constant, all_hold }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRow {
    pub n: usize,
    /// `E[dist(0, SAW(n))] / n` from the census.
    pub exact: Option<f64>,
    pub sampled: Option<f64>,
    pub sampled_se: Option<f64>,
    /// `P(dist(0, SAW(n)) <= α n)` from the census.
    pub mass_below: Option<f64>,
    /// `|B_{αn}| · sup_x c_n(x)/c_n`, which dominates `mass_below`.
    pub mass_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub alpha: Option<f64>,
    pub rows: Vec<SpeedRow>,
}

/// Speed `α = -ln λ / (2 ln(d-1))`: small enough that `(d-1)^{αn} λ^n`
/// still decays.
pub fn speed_alpha(d: usize, lambda: f64) -> Option<f64> {
    (lambda > 0.0 && lambda < 1.0 && d > 2).then(|| -lambda.ln() / (2.0 * ((d - 1) as f64).ln()))
}

/// Exact speeds from a census, and sampled speeds where a Rosenbluth run is given.
pub fn saw_speed(census: Option<&SawCensus>, sampled: Option<&RosenbluthResult>, n_list: &[usize], alpha: Option<f64>) -> SpeedReport {
    let rows = n_list
        .iter()
        .map(|&n| {
            let exact_row = census.filter(|c| n >= 1 && n <= c.n_max);
            let exact = exact_row.map(|c| {
                c.distance_sum(n).to_f64().unwrap_or(f64::NAN) / c.count_f64(n) / n as f64
            });
            let (mass_below, mass_bound) = match (exact_row, alpha) {
                (Some(c), Some(a)) => {
                    let cutoff = (a * n as f64).floor() as usize;
                    let below: u64 = c.endpoint[n]
                        .iter()
                        .zip(&c.dist)
                        .filter(|(_, &r)| r as usize <= cutoff)
                        .map(|(&k, _)| k)
                        .sum();
                    let cn = c.count_f64(n);
                    let sup = c.max_endpoint(n).1 as f64 / cn;
                    (Some(below as f64 / cn), Some(tree_ball_size(c.degree, cutoff) as f64 * sup))
                }
                _ => (None, None),
            };
            let (sampled_v, sampled_se) = match sampled {
                Some(r) if n >= 1 && n <= r.n_max => (Some(r.speed[n]), Some(r.speed_se[n])),
                _ => (None, None),
            };
            SpeedRow { n, exact, sampled: sampled_v, sampled_se, mass_below, mass_bound }
        })
        .collect();
    SpeedReport { alpha, rows }
}
