//! Monte Carlo estimators built on the cluster samplers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::group::{GroupSpec, Word};
use crate::par::run_trials;
use crate::perc::cluster::{connected_within, invasion_bottlenecks, sample_clusters};
use crate::rng::splitmix64;
use crate::stats::{mean_se, wilson_interval, MeanSe, Z95};

/// Seed of the independent stream used for two-point samples.
fn two_point_seed(seed: u64) -> u64 {
    splitmix64(seed ^ 0x7770_6f69_6e74_5f31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub p: f64,
    pub radius: usize,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CrossingEstimate {
    fn from_count(p: f64, radius: usize, trials: u64, seed: u64, successes: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, Z95);
        let estimate = if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 };
        Self { p, radius, trials, seed, successes, estimate, ci_lo, ci_hi }
    }

    pub fn se(&self) -> f64 {
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

/// Per-trial invasion bottlenecks at each radius, in trial order.
pub fn bottleneck_samples(
    spec: &GroupSpec,
    radii: &[usize],
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Vec<Vec<f64>> {
    run_trials(trials, workers, |t| invasion_bottlenecks(spec, seed, t, radii))
}

fn sorted_column(samples: &[Vec<f64>], i: usize) -> Vec<f64> {
    let mut col: Vec<f64> = samples.iter().map(|s| s[i]).collect();
    col.sort_by(f64::total_cmp);
    col
}

/// Number of sorted bottlenecks strictly below `p`, i.e. crossings at `p`.
fn crossings_at(sorted: &[f64], p: f64) -> u64 {
    sorted.partition_point(|&b| b < p) as u64
}

/// `P_p(0 <-> S_R)` with a Wilson interval.
pub fn crossing_probability(
    spec: &GroupSpec,
    p: f64,
    radius: usize,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> CrossingEstimate {
    crossing_curve(spec, &[p], radius, trials, seed, workers).remove(0)
}

/// Crossing probabilities over a `p` grid from one set of coupled trials, so
/// the curve is nondecreasing in `p`.
pub fn crossing_curve(
    spec: &GroupSpec,
    p_grid: &[f64],
    radius: usize,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Vec<CrossingEstimate> {
    let samples = bottleneck_samples(spec, &[radius], trials, seed, workers);
    let col = sorted_column(&samples, 0);
    p_grid
        .iter()
        .map(|&p| CrossingEstimate::from_count(p, radius, trials, seed, crossings_at(&col, p)))
        .collect()
}

/// Aggregate of [`sample_clusters`] over trials on a fixed ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub p: f64,
    pub radius: usize,
    pub trials: u64,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub crossings: Vec<bool>,
    /// Sizes of clusters that stayed off the boundary.
    pub histogram: BTreeMap<usize, u64>,
    /// Trials whose cluster touched the boundary (the `|C| = ∞` proxy).
    pub censored: u64,
    pub mean_size: MeanSe,
    pub crossing: CrossingEstimate,
}

pub fn cluster_stats(ball: &Ball, p: f64, trials: u64, seed: u64, workers: Option<usize>) -> ClusterStats {
    let outcomes = run_trials(trials, workers, |t| sample_clusters(ball, p, seed, t));
    let sizes: Vec<usize> = outcomes.iter().map(|o| o.size).collect();
    let crossings: Vec<bool> = outcomes.iter().map(|o| o.touched_boundary).collect();
    let mut histogram = BTreeMap::new();
    let mut censored = 0;
    for o in &outcomes {
        if o.touched_boundary {
            censored += 1;
        } else {
            *histogram.entry(o.size).or_insert(0) += 1;
        }
    }
    let size_f: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    ClusterStats {
        p,
        radius: ball.radius(),
        trials,
        seed,
        mean_size: mean_se(&size_f),
        crossing: CrossingEstimate::from_count(p, ball.radius(), trials, seed, censored),
        sizes,
        crossings,
        histogram,
        censored,
    }
}

/// How the finite-size surrogate for `p_c` is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcCriterion {
    /// `p` at which `P(0 <-> S_2R) / P(0 <-> S_R) = 1/2`.
    ScaleRatio,
    /// `p` at which `P(0 <-> S_R) = θ*`.
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcEstimate {
    pub criterion: PcCriterion,
    pub radius: usize,
    pub trials: u64,
    pub seed: u64,
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    /// `(radius, point estimate)` at a smaller and at the main radius.
    pub drift: Vec<(usize, f64)>,
    pub warning: String,
}

const PC_GRID_STEP: f64 = 1e-3;
const PC_MIN_EVENTS: u64 = 30;

/// Grid scan of a statistic `f(p) -> Option<(value, se)>` against `target`.
/// Returns the interpolated crossing point and the hull of grid points that
/// are statistically compatible with the target.
fn scan_crossing(target: f64, f: impl Fn(f64) -> Option<(f64, f64)>) -> Option<(f64, f64, f64)> {
    let steps = (1.0 / PC_GRID_STEP).round() as usize;
    let mut point = None;
    let mut prev: Option<(f64, f64)> = None;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=steps {
        let p = i as f64 * PC_GRID_STEP;
        let Some((v, se)) = f(p) else { continue };
        if (v - target).abs() <= Z95 * se {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        if point.is_none() && v >= target {
            point = Some(match prev {
                Some((pp, pv)) if v > pv => pp + (target - pv) / (v - pv) * (p - pp),
                _ => p,
            });
        }
        prev = Some((p, v));
    }
    let point = point?;
    if lo > hi {
        // No grid point within noise of the target: widen to the bracketing cells.
        lo = point - PC_GRID_STEP;
        hi = point + PC_GRID_STEP;
    }
    Some((point, lo.min(point), hi.max(point)))
}

fn ratio_stat(inner: &[f64], outer: &[f64], p: f64) -> Option<(f64, f64)> {
    let n1 = crossings_at(inner, p);
    if n1 < PC_MIN_EVENTS {
        return None;
    }
    let n2 = crossings_at(outer, p);
    let r = n2 as f64 / n1 as f64;
    Some((r, (r * (1.0 - r) / n1 as f64).sqrt().max(1.0 / n1 as f64)))
}

fn threshold_stat(col: &[f64], trials: u64, p: f64) -> Option<(f64, f64)> {
    let k = crossings_at(col, p);
    let v = k as f64 / trials as f64;
    Some((v, (v * (1.0 - v) / trials as f64).sqrt().max(1.0 / trials as f64)))
}

/// Finite-size surrogate for `p_c` at radius `R`, with a confidence interval
/// and the estimate at `R/2` to show drift.
pub fn estimate_pc(
    spec: &GroupSpec,
    radius: usize,
    trials: u64,
    seed: u64,
    criterion: PcCriterion,
    workers: Option<usize>,
) -> Option<PcEstimate> {
    let half = (radius / 2).max(1);
    let radii = [half, radius, 2 * radius];
    let samples = bottleneck_samples(spec, &radii, trials, seed, workers);
    let cols: Vec<Vec<f64>> = (0..3).map(|i| sorted_column(&samples, i)).collect();
    let (main, small, warning) = match criterion {
        PcCriterion::ScaleRatio => (
            scan_crossing(0.5, |p| ratio_stat(&cols[1], &cols[2], p))?,
            scan_crossing(0.5, |p| ratio_stat(&cols[0], &cols[1], p)),
            "scale-ratio surrogate approaches p_c from below as R grows",
        ),
        PcCriterion::Threshold(t) => (
            scan_crossing(t, |p| threshold_stat(&cols[1], trials, p))?,
            scan_crossing(t, |p| threshold_stat(&cols[0], trials, p)),
            "fixed-threshold surrogate converges to the p where θ(p) = θ*, not to p_c",
        ),
    };
    let mut drift = Vec::new();
    if let Some((pt, _, _)) = small {
        drift.push((half, pt));
    }
    drift.push((radius, main.0));
    Some(PcEstimate {
        criterion,
        radius,
        trials,
        seed,
        point: main.0,
        lo: main.1,
        hi: main.2,
        drift,
        warning: warning.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub p: f64,
    pub points: Vec<CrossingEstimate>,
    /// Crossing probability at the largest radius, an upper proxy for θ(p).
    pub limit_proxy: f64,
    pub limit_se: f64,
}

/// Crossing probabilities at each radius from shared trials; nonincreasing in `R`.
pub fn theta(
    spec: &GroupSpec,
    p: f64,
    radii: &[usize],
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> ThetaEstimate {
    let samples = bottleneck_samples(spec, radii, trials, seed, workers);
    let points: Vec<CrossingEstimate> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let k = samples.iter().filter(|s| s[i] < p).count() as u64;
            CrossingEstimate::from_count(p, r, trials, seed, k)
        })
        .collect();
    let last = points
        .iter()
        .max_by_key(|c| c.radius)
        .copied()
        .expect("at least one radius");
    ThetaEstimate { p, limit_proxy: last.estimate, limit_se: last.se(), points }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointEstimate {
    pub p: f64,
    pub target: String,
    pub dist: usize,
    pub radius: usize,
    pub estimate: CrossingEstimate,
    /// `p^dist` on trees.
    pub exact_tree: Option<f64>,
    /// `C λ^dist` with `λ = p (d-1) ρ_ub`, when `λ < 1`.
    pub decay_bound: Option<f64>,
}

/// Bound `P_p(0 <-> x) <= d / ((d-1)(1-ρ)(1-λ)) · λ^k` for `dist(x) = k`,
/// summing the non-backtracking path bound over path lengths `n >= k`.
pub fn two_point_decay_bound(d: usize, p: f64, rho_ub: f64, dist: usize) -> Option<f64> {
    let lambda = p * (d - 1) as f64 * rho_ub;
    if !(lambda < 1.0) || !(rho_ub < 1.0) {
        return None;
    }
    let c = d as f64 / ((d - 1) as f64 * (1.0 - rho_ub) * (1.0 - lambda));
    Some(c * lambda.powi(dist as i32))
}

/// `P_p(0 <-> x)` with the connection required inside the radius-`R` ball.
#[allow(clippy::too_many_arguments)]
pub fn two_point(
    spec: &GroupSpec,
    p: f64,
    x: &Word,
    radius: usize,
    trials: u64,
    seed: u64,
    rho_ub: Option<f64>,
    workers: Option<usize>,
) -> TwoPointEstimate {
    let dist = spec.word_length(x) as usize;
    let hits = run_trials(trials, workers, |t| connected_within(spec, p, seed, t, x, radius));
    let k = hits.iter().filter(|&&h| h).count() as u64;
    TwoPointEstimate {
        p,
        target: spec.format_word(x),
        dist,
        radius,
        estimate: CrossingEstimate::from_count(p, radius, trials, seed, k),
        exact_tree: spec.is_tree().then(|| p.powi(dist as i32)),
        decay_bound: rho_ub.and_then(|r| two_point_decay_bound(spec.degree(), p, r, dist)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub r: usize,
    pub two_point: f64,
    pub two_point_se: f64,
    pub margin: f64,
    /// Lower end of the 95% interval for the margin.
    pub margin_lo: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessStatus {
    Found,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub p: f64,
    pub theta: f64,
    pub theta_se: f64,
    pub theta_radius: usize,
    pub points: Vec<WitnessPoint>,
    /// Smallest `R` at which the margin is positive with 95% confidence.
    pub r0: Option<usize>,
    pub status: WitnessStatus,
    pub reason: Option<String>,
}

/// Margins `θ̂(p)² - P̂_p(0 <-> x_R)` for `x_R` at distance `R = 1..=r_max`.
///
/// A positive margin means `P(0 <-> x) < θ²`; together with Harris'
/// inequality this rules out a unique infinite cluster. `θ̂` is the crossing
/// probability to `theta_radius`; two-point samples use an independent stream
/// and are confined to distance `R + slack`.
#[allow(clippy::too_many_arguments)]
pub fn nonuniqueness_witness(
    spec: &GroupSpec,
    p: f64,
    r_max: usize,
    theta_radius: usize,
    slack: usize,
    trials: u64,
    seed: u64,
    pc_upper: Option<f64>,
    workers: Option<usize>,
) -> WitnessReport {
    let th = theta(spec, p, &[theta_radius], trials, seed, workers);
    let (theta_hat, theta_se) = (th.limit_proxy, th.limit_se);
    let mut report = WitnessReport {
        p,
        theta: theta_hat,
        theta_se,
        theta_radius,
        points: Vec::new(),
        r0: None,
        status: WitnessStatus::Inconclusive,
        reason: None,
    };
    if let Some(pc) = pc_upper {
        if p <= pc {
            report.reason = Some(format!("p = {p} is not above the p_c estimate {pc}"));
            return report;
        }
    }
    let tp_seed = two_point_seed(seed);
    for r in 1..=r_max {
        let x = spec.geodesic_word(r as u32);
        let hits = run_trials(trials, workers, |t| connected_within(spec, p, tp_seed, t, &x, r + slack));
        let tau = hits.iter().filter(|&&h| h).count() as f64 / trials as f64;
        let tau_se = (tau * (1.0 - tau) / trials as f64).sqrt();
        let margin = theta_hat * theta_hat - tau;
        let se = (4.0 * theta_hat * theta_hat * theta_se * theta_se + tau_se * tau_se).sqrt();
        let margin_lo = margin - Z95 * se;
        report.points.push(WitnessPoint { r, two_point: tau, two_point_se: tau_se, margin, margin_lo });
        if report.r0.is_none() && margin_lo > 0.0 {
            report.r0 = Some(r);
        }
    }
    if report.r0.is_some() {
        report.status = WitnessStatus::Found;
    } else {
        report.reason = Some(format!("no margin positive with 95% confidence up to R = {r_max}"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perc::oracle;

    fn spec(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    #[test]
    fn crossing_extremes() {
        let s = spec("Z*Z");
        assert_eq!(crossing_probability(&s, 0.0, 5, 50, 1, None).estimate, 0.0);
        assert_eq!(crossing_probability(&s, 1.0, 5, 50, 1, None).estimate, 1.0);
    }

    #[test]
    fn crossing_matches_oracle() {
        let s = spec("Z*Z");
        for &p in &[1.0 / 3.0, 0.4] {
            let est = crossing_probability(&s, p, 10, 4000, 11, None);
            let exact = oracle::crossing(4, p, 10);
            assert!((est.estimate - exact).abs() < 3.0 * est.se(), "p={p}: {} vs {exact}", est.estimate);
        }
    }

    #[test]
    fn cluster_stats_invariants() {
        let b = Ball::build(&spec("Z5*Z5"), 4).unwrap();
        let st = cluster_stats(&b, 0.4, 300, 2, None);
        assert_eq!(st.histogram.values().sum::<u64>() + st.censored, 300);
        for (s, c) in st.sizes.iter().zip(&st.crossings) {
            if *c {
                assert!(*s >= 5);
            }
        }
    }

    #[test]
    fn theta_is_nonincreasing_in_radius() {
        let th = theta(&spec("Z*Z"), 0.4, &[2, 4, 8, 16], 500, 3, None);
        assert!(th.points.windows(2).all(|w| w[1].estimate <= w[0].estimate));
    }

    #[test]
    fn tree_two_point_has_exact_value() {
        let s = spec("Z*Z");
        let x = s.geodesic_word(3);
        let tp = two_point(&s, 0.5, &x, 3, 2000, 4, Some(0.866), None);
        assert_eq!(tp.exact_tree, Some(0.125));
        assert!((tp.estimate.estimate - 0.125).abs() < 3.0 * tp.estimate.se());
    }

    #[test]
    fn witness_is_inconclusive_below_pc() {
        let s = spec("Z*Z");
        let w = nonuniqueness_witness(&s, 0.3, 3, 10, 0, 100, 1, Some(1.0 / 3.0), None);
        assert_eq!(w.status, WitnessStatus::Inconclusive);
    }
}
