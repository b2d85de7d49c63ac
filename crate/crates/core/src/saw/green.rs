//! Self-avoiding walk generating functions: `G_z(x)`, `χ(z)` and the bubble
//! `B(z) = Σ_x G_z(x)²`, truncated at length `N` with tail bounds.
//!
//! Two tails are reported. The chain tail comes from `c_n(x) <= d (d-1)^{n-1}
//! q^n(0,x)` and `q^n <= ρ^n / (1-ρ)`, and needs `z (d-1) ρ < 1`. On trees
//! the omitted mass is also known exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perc::diagram::{DiagramMethod, DiagramResult};
use crate::saw::census::SawCensus;

/// Where walk counts come from.
#[derive(Debug, Clone, Copy)]
pub enum SawModel<'a> {
    /// `d`-regular tree: `c_n = d (d-1)^{n-1}`, one walk per endpoint.
    Tree { degree: usize },
    Census(&'a SawCensus),
}

impl SawModel<'_> {
    pub fn degree(&self) -> usize {
        match self {
            SawModel::Tree { degree } => *degree,
            SawModel::Census(c) => c.degree,
        }
    }

    /// Largest `N` the model can evaluate exactly.
    pub fn max_length(&self) -> usize {
        match self {
            SawModel::Tree { .. } => usize::MAX,
            SawModel::Census(c) => c.n_max,
        }
    }

    /// `c_n z^n` for `n = 0..=n`, computed as running products.
    fn weighted_counts(&self, z: f64, n: usize) -> Vec<f64> {
        match self {
            SawModel::Tree { degree } => {
                let d = *degree as f64;
                let mut out = vec![1.0];
                let mut term = 1.0;
                for k in 1..=n {
                    term *= if k == 1 { d * z } else { (d - 1.0) * z };
                    out.push(term);
                }
                out
            }
            SawModel::Census(c) => (0..=n).map(|k| c.count_f64(k) * z.powi(k as i32)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenEntry {
    pub label: String,
    pub dist: u32,
    /// Number of vertices this entry stands for (a whole sphere on trees).
    pub multiplicity: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenTable {
    pub z: f64,
    pub truncation: usize,
    /// Truncated `G_z(x)`; on trees one representative per sphere, up to
    /// distance [`TREE_ENTRY_LIMIT`].
    pub entries: Vec<GreenEntry>,
    /// Truncated `χ(z) = Σ_{n<=N} c_n z^n`.
    pub chi: f64,
    /// Chain bound on `G_z(x) - G_z^{(N)}(x)`, uniform in `x`.
    pub vertex_tail: Option<f64>,
    /// Bound on `χ(z) - χ_N(z)`.
    pub chi_tail: Option<f64>,
    /// How `chi_tail` was obtained.
    pub chi_tail_method: Option<String>,
    /// `z (d-1) ρ_ub`.
    pub lambda: Option<f64>,
    pub rho_ub: Option<f64>,
}

impl GreenTable {
    pub fn chi_upper(&self) -> Option<f64> {
        self.chi_tail.map(|t| self.chi + t)
    }
}

/// Tree Green-function entries are listed up to this distance.
pub const TREE_ENTRY_LIMIT: usize = 64;

/// `d / ((d-1)(1-ρ)) · Σ_{n>N} λ^n` with `λ = z (d-1) ρ`.
pub fn vertex_chain_tail(d: usize, z: f64, rho_ub: f64, n: usize) -> Option<f64> {
    let lambda = z * (d - 1) as f64 * rho_ub;
    if !(lambda < 1.0 && rho_ub < 1.0) {
        return None;
    }
    let pre = d as f64 / ((d - 1) as f64 * (1.0 - rho_ub));
    Some(pre * lambda.powi(n as i32 + 1) / (1.0 - lambda))
}

/// Exact `Σ_{n>N} c_n z^n` on the `d`-regular tree.
pub fn tree_chi_tail(d: usize, z: f64, n: usize) -> Option<f64> {
    let r = (d - 1) as f64 * z;
    if !(r < 1.0) {
        return None;
    }
    if z == 0.0 {
        return Some(0.0);
    }
    Some(d as f64 * z * r.powi(n as i32) / (1.0 - r))
}

/// Bound on `Σ_{n>N} c_n z^n` from `c_{qK+r} <= c_K^q c_r`, minimised over
/// block lengths `K` with `c_K z^K < 1`.
pub fn submultiplicative_chi_tail(census: &SawCensus, z: f64, n: usize) -> Option<f64> {
    let weighted: Vec<f64> = (0..=census.n_max).map(|k| census.count_f64(k) * z.powi(k as i32)).collect();
    let mut best: Option<f64> = None;
    for k in 1..=census.n_max {
        let a = weighted[k];
        if !(a < 1.0) {
            continue;
        }
        let mut total = 0.0;
        for (r, &wr) in weighted.iter().enumerate().take(k) {
            let q_min = if r > n { 0 } else { (n - r) / k + 1 };
            total += wr * a.powi(q_min as i32) / (1.0 - a);
        }
        if best.is_none_or(|b| total < b) {
            best = Some(total);
        }
    }
    best
}

pub fn green_function(model: SawModel, z: f64, truncation: usize, rho_ub: Option<f64>) -> GreenTable {
    let d = model.degree();
    let n = truncation.min(model.max_length());
    let weighted = model.weighted_counts(z, n);
    let chi: f64 = weighted.iter().sum();
    let entries = match model {
        SawModel::Tree { .. } => (0..=n.min(TREE_ENTRY_LIMIT))
            .map(|r| GreenEntry {
                label: format!("|x|={r}"),
                dist: r as u32,
                multiplicity: if r == 0 { 1.0 } else { d as f64 * ((d - 1) as f64).powi(r as i32 - 1) },
                value: z.powi(r as i32),
            })
            .collect(),
        SawModel::Census(c) => {
            let zs: Vec<f64> = (0..=n).map(|k| z.powi(k as i32)).collect();
            (0..c.dist.len())
                .filter(|&v| c.dist[v] as usize <= n)
                .map(|v| GreenEntry {
                    label: c.labels[v].clone(),
                    dist: c.dist[v],
                    multiplicity: 1.0,
                    value: (c.dist[v] as usize..=n)
                        .map(|k| c.endpoint[k].get(v).copied().unwrap_or(0) as f64 * zs[k])
                        .sum(),
                })
                .collect()
        }
    };
    let (chi_tail, chi_tail_method) = match model {
        SawModel::Tree { .. } => (tree_chi_tail(d, z, n), Some("exact-tree".to_string())),
        SawModel::Census(c) => (submultiplicative_chi_tail(c, z, n), Some("submultiplicative".to_string())),
    };
    let chi_tail_method = chi_tail.and(chi_tail_method);
    GreenTable {
        z,
        truncation: n,
        entries,
        chi,
        vertex_tail: rho_ub.and_then(|r| vertex_chain_tail(d, z, r, n)),
        chi_tail,
        chi_tail_method,
        lambda: rho_ub.map(|r| z * (d - 1) as f64 * r),
        rho_ub,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiPoint {
    pub z: f64,
    pub chi: f64,
    pub tail: Option<f64>,
    /// `χ_N(z) (μ̂⁻¹ - z)`: a lower bound on the scaling ratio.
    pub ratio_lo: f64,
    /// `(χ_N(z) + tail)(μ̂⁻¹ - z)`.
    pub ratio_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiCurve {
    pub mu_inv: f64,
    pub truncation: usize,
    pub points: Vec<ChiPoint>,
    /// `min ratio_lo` and `max ratio_hi` over the grid.
    pub lower: f64,
    pub upper: Option<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreenError {
    #[error("grid point z = {z} is not below 1/mu = {mu_inv}")]
    OutsideDisc { z: f64, mu_inv: f64 },
}

/// `χ(z)` over a grid in `[0, μ̂⁻¹)` and the ratio `χ(z)(μ̂⁻¹ - z)`.
pub fn susceptibility_saw(
    model: SawModel,
    z_grid: &[f64],
    truncation: usize,
    mu_inv: f64,
) -> Result<ChiCurve, GreenError> {
    if let Some(&z) = z_grid.iter().find(|&&z| !(z < mu_inv) || z < 0.0) {
        return Err(GreenError::OutsideDisc { z, mu_inv });
    }
    let points: Vec<ChiPoint> = z_grid
        .iter()
        .map(|&z| {
            let g = green_function(model, z, truncation, None);
            let gap = mu_inv - z;
            ChiPoint {
                z,
                chi: g.chi,
                tail: g.chi_tail,
                ratio_lo: g.chi * gap,
                ratio_hi: g.chi_upper().map(|u| u * gap),
            }
        })
        .collect();
    let lower = points.iter().map(|p| p.ratio_lo).fold(f64::INFINITY, f64::min);
    let upper = points
        .iter()
        .map(|p| p.ratio_hi)
        .try_fold(0.0f64, |acc, x| x.map(|v| acc.max(v)));
    let truncation = truncation.min(model.max_length());
    Ok(ChiCurve { mu_inv, truncation, points, lower, upper })
}

/// `Σ_{s>N} (s+1) λ^s`.
fn pair_tail(lambda: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    let mut s = n + 1;
    let mut pow = lambda.powi(s as i32);
    loop {
        let term = (s + 1) as f64 * pow;
        sum += term;
        if term < 1e-17 * sum || pow == 0.0 {
            break;
        }
        s += 1;
        pow *= lambda;
    }
    sum
}

/// Chain bound on `B(z) - B_N(z)`:
/// `(d/(d-1))² (1-ρ)^{-2} Σ_{s>N} (s+1) λ^s`, `λ = z (d-1) ρ`.
pub fn bubble_chain_tail(d: usize, z: f64, rho_ub: f64, n: usize) -> Option<f64> {
    let lambda = z * (d - 1) as f64 * rho_ub;
    if !(lambda < 1.0 && rho_ub < 1.0) {
        return None;
    }
    if z == 0.0 {
        return Some(0.0);
    }
    let pre = (d as f64 / ((d - 1) as f64 * (1.0 - rho_ub))).powi(2);
    Some(pre * pair_tail(lambda, n))
}

/// Bubble `Σ_x G_z(x)²` truncated at walk length `N`.
pub fn bubble_diagram(model: SawModel, z: f64, truncation: usize, rho_ub: Option<f64>) -> DiagramResult {
    let d = model.degree();
    let n = truncation.min(model.max_length());
    let (value, exact_tail) = match model {
        SawModel::Tree { .. } => {
            // Sphere r holds d (d-1)^{r-1} endpoints, each with G = z^r.
            let dz2 = (d - 1) as f64 * z * z;
            let mut total = 1.0;
            let mut term = 1.0;
            for r in 1..=n {
                term *= if r == 1 { d as f64 * z * z } else { dz2 };
                total += term;
            }
            let tail = (dz2 < 1.0).then(|| {
                if z == 0.0 {
                    0.0
                } else {
                    d as f64 * z.powi(2 * (n as i32 + 1)) * ((d - 1) as f64).powi(n as i32) / (1.0 - dz2)
                }
            });
            (total, tail)
        }
        SawModel::Census(_) => {
            let g = green_function(model, z, n, None);
            (g.entries.iter().map(|e| e.multiplicity * e.value * e.value).sum(), None)
        }
    };
    let tail_bound = rho_ub.and_then(|r| bubble_chain_tail(d, z, r, n));
    DiagramResult {
        value,
        se: 0.0,
        truncation: n,
        tail_bound,
        exact_tail,
        certified: exact_tail.is_some() || tail_bound.is_some(),
        method: DiagramMethod::ExactTree,
        parameter: z,
        rho_ub,
        degree: d,
        lambda: rho_ub.map(|r| z * (d - 1) as f64 * r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::Ball;
    use crate::group::GroupSpec;
    use crate::saw::census::enumerate_saw;

    const TREE4: SawModel<'static> = SawModel::Tree { degree: 4 };

    #[test]
    fn tree_green_is_power_of_z() {
        let g = green_function(TREE4, 1.0 / 3.0, 10, None);
        for e in &g.entries {
            assert!((e.value - 3f64.powi(-(e.dist as i32))).abs() < 1e-15);
        }
        let g0 = green_function(TREE4, 0.0, 10, None);
        assert_eq!(g0.chi, 1.0);
        assert_eq!(g0.entries[0].value, 1.0);
        assert_eq!(g0.entries[1].value, 0.0);
    }

    #[test]
    fn tree_chi_closed_form() {
        for &z in &[0.0, 0.1, 0.2, 0.3] {
            let g = green_function(TREE4, z, 200, None);
            let exact = 1.0 + 4.0 * z / (1.0 - 3.0 * z);
            assert!((g.chi + g.chi_tail.unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn bubble_at_criticality() {
        let b = bubble_diagram(TREE4, 1.0 / 3.0, 40, Some(3f64.sqrt() / 2.0));
        assert!((b.value - 5.0 / 3.0).abs() < 1e-15 + 1e-12);
        assert!(b.exact_tail.unwrap() < 1e-12);
        assert_eq!(bubble_diagram(TREE4, 0.0, 10, None).value, 1.0);
    }

    #[test]
    fn census_green_two_truncations() {
        let spec = GroupSpec::parse("Z5*Z5").unwrap();
        let ball = Ball::build(&spec, 8).unwrap();
        let c = enumerate_saw(&ball, 8).unwrap();
        let a = green_function(SawModel::Census(&c), 0.2, 6, Some(0.8965));
        let b = green_function(SawModel::Census(&c), 0.2, 8, Some(0.8965));
        let tail = a.vertex_tail.unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.label, y.label);
            assert!(y.value >= x.value && y.value - x.value <= tail);
        }
        assert!(b.chi - a.chi <= a.chi_tail.unwrap());
    }

    #[test]
    fn grid_outside_disc_rejected() {
        assert!(susceptibility_saw(TREE4, &[0.34], 10, 1.0 / 3.0).is_err());
    }
}
