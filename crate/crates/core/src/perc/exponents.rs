//! Cluster-size tails, susceptibility and log-log exponent fits.

use serde::{Deserialize, Serialize};

use crate::group::GroupSpec;
use crate::par::run_trials;
use crate::perc::cluster::explore_cluster;
use crate::perc::oracle;
use crate::rng::CounterRng;
use crate::stats::{least_squares, mean_se, MeanSe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentName {
    Beta,
    Gamma,
    Delta,
}

/// When a log-log fit is trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRules {
    /// Tail points need at least this many events.
    pub min_events: u64,
    /// Largest accepted RMS residual of the log-log fit.
    pub residual_cutoff: f64,
    /// Usable points must cover this fraction of the window (in log scale).
    pub min_span_fraction: f64,
}

impl Default for FitRules {
    fn default() -> Self {
        Self { min_events: 30, residual_cutoff: 0.05, min_span_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub name: ExponentName,
    /// Fitted log-log slope.
    pub slope: f64,
    pub target_slope: f64,
    /// Exponent implied by the slope (`β = slope`, `γ = -slope`, `δ = -1/slope`).
    pub exponent: f64,
    pub target_exponent: f64,
    pub window: (f64, f64),
    pub residual: f64,
    pub points: usize,
    pub accepted: bool,
    pub diagnostic: Option<String>,
}

impl ExponentFit {
    fn build(name: ExponentName, xs: &[f64], ys: &[f64], window: (f64, f64), span: f64, rules: &FitRules) -> Self {
        let (target_slope, target_exponent) = match name {
            ExponentName::Beta => (1.0, 1.0),
            ExponentName::Gamma => (-1.0, 1.0),
            ExponentName::Delta => (-0.5, 2.0),
        };
        let Some(fit) = least_squares(xs, ys) else {
            return Self {
                name,
                slope: f64::NAN,
                target_slope,
                exponent: f64::NAN,
                target_exponent,
                window,
                residual: f64::NAN,
                points: xs.len(),
                accepted: false,
                diagnostic: Some(format!("only {} usable points", xs.len())),
            };
        };
        let exponent = match name {
            ExponentName::Beta => fit.slope,
            ExponentName::Gamma => -fit.slope,
            ExponentName::Delta => -1.0 / fit.slope,
        };
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let diagnostic = if span > 0.0 && (hi - lo) < rules.min_span_fraction * span {
            Some(format!(
                "usable points cover {:.0}% of the window",
                100.0 * (hi - lo) / span
            ))
        } else if fit.residual > rules.residual_cutoff {
            Some(format!("residual {:.3} above cutoff {}", fit.residual, rules.residual_cutoff))
        } else {
            None
        };
        Self {
            name,
            slope: fit.slope,
            target_slope,
            exponent,
            target_exponent,
            window,
            residual: fit.residual,
            points: fit.points,
            accepted: diagnostic.is_none(),
            diagnostic,
        }
    }

    fn rejected(name: ExponentName, window: (f64, f64), why: String) -> Self {
        let mut f = Self::build(name, &[], &[], window, 0.0, &FitRules::default());
        f.diagnostic = Some(why);
        f
    }
}

/// Empirical `P(|C(0)| >= n)` with censoring made explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub p: f64,
    pub trials: u64,
    pub n_max: usize,
    /// Clusters larger than `n_max` (never counted as finite).
    pub censored: u64,
    /// Sorted finite cluster sizes.
    pub sizes: Vec<usize>,
}

impl TailCurve {
    /// Number of trials with `|C| >= n`, censored trials included.
    pub fn count_at_least(&self, n: usize) -> u64 {
        let below = self.sizes.partition_point(|&s| s < n) as u64;
        self.trials - below
    }

    pub fn survival(&self, n: usize) -> f64 {
        self.count_at_least(n) as f64 / self.trials as f64
    }

    /// Roughly `per_decade` log-spaced integers in `[lo, hi]`.
    pub fn log_grid(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
        let (a, b) = ((lo.max(1) as f64).ln(), (hi.max(1) as f64).ln());
        let steps = (((b - a) / std::f64::consts::LN_10) * per_decade as f64).ceil().max(1.0) as usize;
        let mut out: Vec<usize> = (0..=steps)
            .map(|i| (a + (b - a) * i as f64 / steps as f64).exp().round() as usize)
            .collect();
        out.dedup();
        out
    }
}

/// Root-cluster sizes at `p`, capped at `n_max`. Trees are sampled as a
/// Galton–Watson process; other graphs by exploration of the word graph.
pub fn cluster_size_tail(
    spec: &GroupSpec,
    p: f64,
    n_max: usize,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> TailCurve {
    let d = spec.degree();
    let tree = spec.is_tree() && d >= 3;
    let samples: Vec<Option<usize>> = run_trials(trials, workers, |t| {
        if tree {
            let mut rng = CounterRng::new(seed, t);
            oracle::sample_total_progeny(d, p, n_max, &mut rng)
        } else {
            let o = explore_cluster(spec, p, seed, t, None, n_max + 1);
            (o.size <= n_max).then_some(o.size)
        }
    });
    let mut sizes: Vec<usize> = samples.iter().flatten().copied().collect();
    sizes.sort_unstable();
    let censored = trials - sizes.len() as u64;
    TailCurve { p, trials, n_max, censored, sizes }
}

/// Fits `log P(|C| >= n)` against `log n` over `window`; target slope `-1/2`.
pub fn fit_tail(curve: &TailCurve, window: (usize, usize), rules: &FitRules) -> ExponentFit {
    let grid = TailCurve::log_grid(window.0, window.1, 8);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &n in &grid {
        let k = curve.count_at_least(n);
        if k >= rules.min_events {
            xs.push((n as f64).ln());
            ys.push((k as f64 / curve.trials as f64).ln());
        }
    }
    let span = (window.1 as f64).ln() - (window.0 as f64).ln();
    ExponentFit::build(ExponentName::Delta, &xs, &ys, (window.0 as f64, window.1 as f64), span, rules)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityPoint {
    pub p: f64,
    pub mean: MeanSe,
    /// Trials whose cluster hit the size cap; their size enters as the cap.
    pub censored: u64,
    pub exact_tree: Option<f64>,
}

/// `E_p|C(0)|` on the word graph over a `p` grid.
pub fn susceptibility(
    spec: &GroupSpec,
    p_grid: &[f64],
    cap: usize,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Vec<SusceptibilityPoint> {
    p_grid
        .iter()
        .map(|&p| {
            let out = run_trials(trials, workers, |t| explore_cluster(spec, p, seed, t, None, cap));
            let sizes: Vec<f64> = out.iter().map(|o| o.size as f64).collect();
            let censored = out.iter().filter(|o| o.touched_boundary).count() as u64;
            SusceptibilityPoint {
                p,
                mean: mean_se(&sizes),
                censored,
                exact_tree: (spec.is_tree() && spec.degree() >= 3)
                    .then(|| oracle::mean_cluster_size(spec.degree(), p)),
            }
        })
        .collect()
}

/// Fits `log E|C|` against `log(p_c - p)`; target slope `-1`. Rejected if any
/// point lies at or above `pc_lo`.
pub fn fit_gamma(points: &[(f64, f64)], pc: f64, pc_lo: f64, rules: &FitRules) -> ExponentFit {
    let window = window_of(points);
    if window.1 >= pc_lo {
        return ExponentFit::rejected(
            ExponentName::Gamma,
            window,
            format!("sweep reaches p = {} inside the p_c interval (from {pc_lo})", window.1),
        );
    }
    let xs: Vec<f64> = points.iter().map(|(p, _)| (pc - p).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    ExponentFit::build(ExponentName::Gamma, &xs, &ys, window, 0.0, rules)
}

/// Fits `log θ` against `log(p - p_c)`; target slope `1`. Rejected if any
/// point lies at or below `pc_hi`.
pub fn fit_beta(points: &[(f64, f64)], pc: f64, pc_hi: f64, rules: &FitRules) -> ExponentFit {
    let window = window_of(points);
    if window.0 <= pc_hi {
        return ExponentFit::rejected(
            ExponentName::Beta,
            window,
            format!("sweep reaches p = {} inside the p_c interval (up to {pc_hi})", window.0),
        );
    }
    let xs: Vec<f64> = points.iter().map(|(p, _)| (p - pc).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    ExponentFit::build(ExponentName::Beta, &xs, &ys, window, 0.0, rules)
}

fn window_of(points: &[(f64, f64)]) -> (f64, f64) {
    let lo = points.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Evenly spaced grid over `[lo, hi]` with `n` points.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
