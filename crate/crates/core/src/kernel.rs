//! Simple and non-backtracking random-walk kernels on balls, spectral radius
//! estimates, and the two kernel comparison inequalities
//! `q^n(0,x) <= Σ_{j>=n} p^j(0,x)` and `q^n(0,x) <= ρ^n / (1-ρ)`.
//!
//! Kernels are propagated from the unit mass at the root; mass that would
//! leave the ball is dropped. Entries at step `n <= R` are therefore exact for
//! the infinite graph, and return probabilities `p^{2n}(0,0)` are exact for
//! `n <= R`.
//!
//! Exact mode stores integer walk counts over the known common denominator
//! (`d^n` for the simple walk, `d (d-1)^{n-1}` for the non-backtracking walk),
//! so every probability is an exact rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ball::{Ball, OUTSIDE};
use crate::certificate::{CertEntry, Relation};
use crate::group::GroupSpec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("non-backtracking walk needs degree >= 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("exact walk counts overflowed at step {0}")]
    Overflow(usize),
    #[error("horizon {0} must be even")]
    OddHorizon(usize),
    #[error("requested {requested} steps but only {available} are exact on this ball")]
    BeyondHorizon { requested: usize, available: usize },
    #[error("no certified upper bound on the spectral radius for {0}; supply one")]
    MissingRhoBound(String),
    #[error("spectral radius bound must lie in (0, 1), got {0}")]
    RhoOutOfRange(f64),
    #[error(transparent)]
    Ball(#[from] crate::ball::BallError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Srw,
    Nbw,
}

impl WalkKind {
    pub fn name(self) -> &'static str {
        match self {
            WalkKind::Srw => "srw",
            WalkKind::Nbw => "nbw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

/// Floating point kernel `n -> (vertex -> probability)`.
///
/// Row `n` covers the vertices at distance `<= min(n, R)`, in ball order.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub kind: WalkKind,
    pub horizon: usize,
    /// Steps `n <= validity` are exact for the infinite graph.
    pub validity: usize,
    rows: Vec<Vec<f64>>,
}

impl KernelTable {
    pub fn prob(&self, n: usize, v: u32) -> f64 {
        self.rows
            .get(n)
            .and_then(|r| r.get(v as usize))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    /// Total mass at step `n`.
    pub fn mass(&self, n: usize) -> f64 {
        self.rows[n].iter().sum()
    }
}

/// Exact kernel as integer counts over per-step denominators.
#[derive(Debug, Clone)]
pub struct ExactKernelTable {
    pub kind: WalkKind,
    pub horizon: usize,
    pub validity: usize,
    rows: Vec<Vec<u128>>,
    denominators: Vec<u128>,
}

impl ExactKernelTable {
    pub fn count(&self, n: usize, v: u32) -> u128 {
        self.rows
            .get(n)
            .and_then(|r| r.get(v as usize))
            .copied()
            .unwrap_or(0)
    }

    pub fn denominator(&self, n: usize) -> u128 {
        self.denominators[n]
    }

    pub fn prob(&self, n: usize, v: u32) -> BigRational {
        BigRational::new(BigInt::from(self.count(n, v)), BigInt::from(self.denominator(n)))
    }

    pub fn prob_f64(&self, n: usize, v: u32) -> f64 {
        self.count(n, v) as f64 / self.denominator(n) as f64
    }

    pub fn row(&self, n: usize) -> &[u128] {
        &self.rows[n]
    }

    pub fn to_float(&self) -> KernelTable {
        let rows = self
            .rows
            .iter()
            .zip(&self.denominators)
            .map(|(r, &den)| r.iter().map(|&c| c as f64 / den as f64).collect())
            .collect();
        KernelTable { kind: self.kind, horizon: self.horizon, validity: self.validity, rows }
    }
}

fn propagate_srw<T: Copy + Default>(
    ball: &Ball,
    steps: usize,
    start: T,
    transfer: impl Fn(T) -> T,
    add: impl Fn(T, T) -> Option<T>,
) -> Result<Vec<Vec<T>>, usize> {
    let d = ball.degree();
    let mut rows = vec![vec![start]];
    for n in 1..=steps {
        let prev = &rows[n - 1];
        let mut next = vec![T::default(); ball.prefix_len(n)];
        for (v, &m) in prev.iter().enumerate() {
            let share = transfer(m);
            for k in 0..d {
                let w = ball.neighbor(v as u32, k);
                if w != OUTSIDE {
                    let slot = &mut next[w as usize];
                    *slot = add(*slot, share).ok_or(n)?;
                }
            }
        }
        rows.push(next);
    }
    Ok(rows)
}

/// Non-backtracking propagation over arcs; `arcs[w*d + k]` is the mass that
/// arrived at `w` by generator `k`.
fn propagate_nbw<T: Copy + Default>(
    ball: &Ball,
    steps: usize,
    start: T,
    first: impl Fn(T) -> T,
    transfer: impl Fn(T) -> T,
    add: impl Fn(T, T) -> Option<T>,
) -> Result<Vec<Vec<T>>, usize> {
    let d = ball.degree();
    let spec = ball.spec();
    let mut rows = vec![vec![start]];
    if steps == 0 {
        return Ok(rows);
    }
    let mut arcs = vec![T::default(); ball.prefix_len(1) * d];
    let share = first(start);
    for k in 0..d {
        let w = ball.neighbor(0, k);
        if w != OUTSIDE {
            arcs[w as usize * d + k] = share;
        }
    }
    rows.push(vertex_mass(&arcs, d, &add).ok_or(1usize)?);
    for n in 2..=steps {
        let mut next = vec![T::default(); ball.prefix_len(n) * d];
        for v in 0..arcs.len() / d {
            for k in 0..d {
                let m = arcs[v * d + k];
                let back = spec.inverse_of(k);
                let share = transfer(m);
                for k2 in 0..d {
                    if k2 == back {
                        continue;
                    }
                    let w = ball.neighbor(v as u32, k2);
                    if w != OUTSIDE {
                        let slot = &mut next[w as usize * d + k2];
                        *slot = add(*slot, share).ok_or(n)?;
                    }
                }
            }
        }
        arcs = next;
        rows.push(vertex_mass(&arcs, d, &add).ok_or(n)?);
    }
    Ok(rows)
}

fn vertex_mass<T: Copy + Default>(arcs: &[T], d: usize, add: &impl Fn(T, T) -> Option<T>) -> Option<Vec<T>> {
    arcs.chunks(d)
        .map(|c| c.iter().try_fold(T::default(), |acc, &x| add(acc, x)))
        .collect()
}

/// `p^n(0, ·)` for `n <= steps`.
pub fn srw_kernel(ball: &Ball, steps: usize) -> KernelTable {
    let inv_d = 1.0 / ball.degree() as f64;
    let rows = propagate_srw(ball, steps, 1.0f64, |m| m * inv_d, |a, b| Some(a + b))
        .expect("float propagation cannot overflow");
    KernelTable { kind: WalkKind::Srw, horizon: steps, validity: steps.min(ball.radius()), rows }
}

pub fn srw_kernel_exact(ball: &Ball, steps: usize) -> Result<ExactKernelTable, KernelError> {
    let rows = propagate_srw(ball, steps, 1u128, |m| m, |a, b| a.checked_add(b))
        .map_err(KernelError::Overflow)?;
    let d = ball.degree() as u128;
    let mut denominators = vec![1u128];
    for n in 1..=steps {
        let prev = denominators[n - 1];
        denominators.push(prev.checked_mul(d).ok_or(KernelError::Overflow(n))?);
    }
    Ok(ExactKernelTable {
        kind: WalkKind::Srw,
        horizon: steps,
        validity: steps.min(ball.radius()),
        rows,
        denominators,
    })
}

/// `q^n(0, ·)` for `n <= steps`.
pub fn nbw_kernel(ball: &Ball, steps: usize) -> Result<KernelTable, KernelError> {
    let d = ball.degree();
    if d < 3 {
        return Err(KernelError::DegreeTooSmall(d));
    }
    let first = 1.0 / d as f64;
    let cont = 1.0 / (d - 1) as f64;
    let rows = propagate_nbw(ball, steps, 1.0f64, |m| m * first, |m| m * cont, |a, b| Some(a + b))
        .expect("float propagation cannot overflow");
    Ok(KernelTable { kind: WalkKind::Nbw, horizon: steps, validity: steps.min(ball.radius()), rows })
}

pub fn nbw_kernel_exact(ball: &Ball, steps: usize) -> Result<ExactKernelTable, KernelError> {
    let d = ball.degree();
    if d < 3 {
        return Err(KernelError::DegreeTooSmall(d));
    }
    let rows = propagate_nbw(ball, steps, 1u128, |m| m, |m| m, |a, b| a.checked_add(b))
        .map_err(KernelError::Overflow)?;
    let mut denominators = vec![1u128];
    for n in 1..=steps {
        let den = if n == 1 {
            d as u128
        } else {
            denominators[n - 1].checked_mul((d - 1) as u128).ok_or(KernelError::Overflow(n))?
        };
        denominators.push(den);
    }
    Ok(ExactKernelTable {
        kind: WalkKind::Nbw,
        horizon: steps,
        validity: steps.min(ball.radius()),
        rows,
        denominators,
    })
}

/// Spectral radius of the `d`-regular tree, `2 sqrt(d-1) / d`.
pub fn kesten_rho(d: usize) -> f64 {
    if d <= 2 {
        return 1.0;
    }
    2.0 * ((d - 1) as f64).sqrt() / d as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoProvenance {
    ExactFormula,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoBound {
    pub value: f64,
    pub provenance: RhoProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    /// `sequence[i] = (p^{2n}(0,0))^{1/2n}` with `n = i + 1`.
    pub sequence: Vec<f64>,
    /// Largest sequence element; a certified lower bound on ρ.
    pub lower_bound: f64,
    pub upper: Option<RhoBound>,
    pub radial: bool,
}

impl RhoEstimate {
    pub fn require_upper(&self, graph: &str) -> Result<RhoBound, KernelError> {
        self.upper.ok_or_else(|| KernelError::MissingRhoBound(graph.to_string()))
    }

    /// Indices `n` where the sequence exceeds the supplied upper bound. A
    /// nonempty result means the bound is wrong.
    pub fn violations(&self) -> Vec<usize> {
        match self.upper {
            Some(b) => self
                .sequence
                .iter()
                .enumerate()
                .filter(|(_, &s)| s > b.value)
                .map(|(i, _)| i + 1)
                .collect(),
            None => Vec::new(),
        }
    }
}

/// `ln p^{2n}(0,0)` for `n = 0..=steps/2` on the `d`-regular tree, using the
/// distance-from-root birth-death chain.
pub fn radial_log_returns(d: usize, steps: usize) -> Vec<f64> {
    let half = steps / 2;
    let up = if d == 0 { 0.0 } else { (d - 1) as f64 / d as f64 };
    let down = if d == 0 { 0.0 } else { 1.0 / d as f64 };
    // Distances beyond `half` cannot come back by time `steps`.
    let width = half + 2;
    let mut mass = vec![0.0f64; width];
    mass[0] = 1.0;
    let mut log_scale = 0.0f64;
    let mut out = vec![0.0];
    for t in 1..=2 * half {
        let mut next = vec![0.0f64; width];
        next[1] += mass[0];
        for k in 1..width {
            let m = mass[k];
            if m == 0.0 {
                continue;
            }
            next[k - 1] += m * down;
            if k + 1 < width {
                next[k + 1] += m * up;
            }
        }
        mass = next;
        let top = mass.iter().cloned().fold(0.0f64, f64::max);
        if top > 0.0 && top < 1e-200 {
            for m in mass.iter_mut() {
                *m /= top;
            }
            log_scale += top.ln();
        }
        if t % 2 == 0 {
            out.push(if mass[0] > 0.0 { mass[0].ln() + log_scale } else { f64::NEG_INFINITY });
        }
    }
    out
}

/// Estimates ρ from return probabilities up to `steps` (even) steps.
///
/// Trees use the radial chain, so `steps` in the thousands is cheap; other
/// graphs build a ball of radius `steps/2`. The upper bound is Kesten's value
/// for trees and `user_rho_ub` otherwise.
pub fn estimate_spectral_radius(
    spec: &GroupSpec,
    steps: usize,
    user_rho_ub: Option<f64>,
) -> Result<RhoEstimate, KernelError> {
    if !steps.is_multiple_of(2) {
        return Err(KernelError::OddHorizon(steps));
    }
    let d = spec.degree();
    let (sequence, radial) = if spec.is_tree() {
        let logs = radial_log_returns(d, steps);
        let seq: Vec<f64> = (1..logs.len())
            .map(|n| (logs[n] / (2 * n) as f64).exp())
            .collect();
        (seq, true)
    } else {
        let ball = Ball::build(spec, steps / 2)?;
        let table = srw_kernel(&ball, steps);
        let seq = (1..=steps / 2)
            .map(|n| table.prob(2 * n, 0).powf(1.0 / (2 * n) as f64))
            .collect();
        (seq, false)
    };
    let lower_bound = sequence.iter().cloned().fold(0.0f64, f64::max);
    let upper = if spec.is_tree() {
        Some(RhoBound { value: kesten_rho(d), provenance: RhoProvenance::ExactFormula })
    } else {
        user_rho_ub.map(|value| RhoBound { value, provenance: RhoProvenance::UserSupplied })
    };
    Ok(RhoEstimate { sequence, lower_bound, upper, radial })
}

/// One evaluated point of a kernel inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaPoint {
    pub n: usize,
    pub vertex: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub check: String,
    pub anchor: String,
    pub arithmetic: Arithmetic,
    pub rho_ub: f64,
    pub max_n: usize,
    /// Truncation point `J` of the simple-walk tail sum.
    pub horizon: usize,
    pub checked: usize,
    pub violations: Vec<LemmaPoint>,
    pub worst: Option<LemmaPoint>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_entry(&self, graph: &str) -> CertEntry {
        let entry = match self.worst {
            Some(w) => CertEntry::compare(&self.check, graph, &self.anchor, Relation::LessEq, w.lhs, w.rhs),
            None => CertEntry::compare(&self.check, graph, &self.anchor, Relation::LessEq, 0.0, 0.0),
        };
        let entry = entry
            .with_param("rho_ub", self.rho_ub)
            .with_param("max_n", self.max_n)
            .with_param("horizon", self.horizon)
            .with_param("points_checked", self.checked)
            .with_param("violations", self.violations.len())
            .with_param("arithmetic", format!("{:?}", self.arithmetic).to_lowercase());
        let entry = match self.worst {
            Some(w) => entry.with_param("worst_n", w.n).with_param("worst_vertex", w.vertex),
            None => entry,
        };
        if self.passed() {
            entry
        } else {
            entry.force_fail(format!("{} violating points", self.violations.len()))
        }
    }

    fn record(&mut self, p: LemmaPoint, ok: bool) {
        self.checked += 1;
        if !ok {
            self.violations.push(p);
        }
        if self.worst.is_none_or(|w| p.margin < w.margin) {
            self.worst = Some(p);
        }
    }
}

fn check_inputs(ball: &Ball, max_n: usize, rho_ub: f64) -> Result<(), KernelError> {
    if !(rho_ub > 0.0 && rho_ub < 1.0) {
        return Err(KernelError::RhoOutOfRange(rho_ub));
    }
    if max_n > ball.radius() {
        return Err(KernelError::BeyondHorizon { requested: max_n, available: ball.radius() });
    }
    Ok(())
}

fn default_test_set(ball: &Ball, max_n: usize) -> Vec<u32> {
    (0..ball.prefix_len(max_n) as u32).collect()
}

/// Checks `q^n(0,x) <= Σ_{j=n}^{J} p^j(0,x) + ρ^{J+1}/(1-ρ)` with `J` the
/// ball radius, for `n <= max_n` and `x` in `test_set` (default: every
/// vertex within distance `max_n`).
pub fn check_lemma_nbw_tail(
    ball: &Ball,
    max_n: usize,
    rho_ub: f64,
    arithmetic: Arithmetic,
    test_set: Option<&[u32]>,
) -> Result<LemmaReport, KernelError> {
    check_inputs(ball, max_n, rho_ub)?;
    let horizon = ball.radius();
    let tail = rho_ub.powi(horizon as i32 + 1) / (1.0 - rho_ub);
    let owned;
    let xs = match test_set {
        Some(s) => s,
        None => {
            owned = default_test_set(ball, max_n);
            &owned
        }
    };
    let mut report = LemmaReport {
        check: "kernel.nbw_vs_srw_tail".into(),
        anchor: "q^n(0,x) <= sum_{j>=n} p^j(0,x)".into(),
        arithmetic,
        rho_ub,
        max_n,
        horizon,
        checked: 0,
        violations: Vec::new(),
        worst: None,
    };
    match arithmetic {
        Arithmetic::Float => {
            let p = srw_kernel(ball, horizon);
            let q = nbw_kernel(ball, max_n)?;
            for &x in xs {
                let mut suffix = vec![0.0; horizon + 2];
                for j in (0..=horizon).rev() {
                    suffix[j] = suffix[j + 1] + p.prob(j, x);
                }
                for n in 0..=max_n {
                    let lhs = q.prob(n, x);
                    let rhs = suffix[n] + tail;
                    let pt = LemmaPoint { n, vertex: x, lhs, rhs, margin: rhs - lhs };
                    report.record(pt, lhs <= rhs);
                }
            }
        }
        Arithmetic::Exact => {
            let p = srw_kernel_exact(ball, horizon)?;
            let q = nbw_kernel_exact(ball, max_n)?;
            let big_den = p.denominator(horizon);
            for &x in xs {
                // suffix[n] = Σ_{j=n}^{H} count_j * d^{H-j}, over the common denominator d^H.
                let mut suffix = vec![0u128; horizon + 2];
                for j in (0..=horizon).rev() {
                    let scale = big_den / p.denominator(j);
                    let term = p.count(j, x).checked_mul(scale).ok_or(KernelError::Overflow(j))?;
                    suffix[j] = suffix[j + 1].checked_add(term).ok_or(KernelError::Overflow(j))?;
                }
                for n in 0..=max_n {
                    let qd = q.denominator(n);
                    let a = q.count(n, x).checked_mul(big_den).ok_or(KernelError::Overflow(n))?;
                    let b = suffix[n].checked_mul(qd).ok_or(KernelError::Overflow(n))?;
                    let joint = qd as f64 * big_den as f64;
                    let lhs = q.prob_f64(n, x);
                    let sum = suffix[n] as f64 / big_den as f64;
                    // Exact comparison of the finite parts; only the excess (if any)
                    // is weighed against the geometric tail.
                    let (ok, margin) = if a <= b {
                        (true, (b - a) as f64 / joint + tail)
                    } else {
                        let excess = (a - b) as f64 / joint;
                        (excess <= tail, tail - excess)
                    };
                    let pt = LemmaPoint { n, vertex: x, lhs, rhs: sum + tail, margin };
                    report.record(pt, ok);
                }
            }
        }
    }
    Ok(report)
}

/// Checks `q^n(0,x) <= ρ^n / (1-ρ)` for `n <= max_n`.
pub fn check_lemma_nbw_rho(
    ball: &Ball,
    max_n: usize,
    rho_ub: f64,
    arithmetic: Arithmetic,
    test_set: Option<&[u32]>,
) -> Result<LemmaReport, KernelError> {
    check_inputs(ball, max_n, rho_ub)?;
    let owned;
    let xs = match test_set {
        Some(s) => s,
        None => {
            owned = default_test_set(ball, max_n);
            &owned
        }
    };
    let q = match arithmetic {
        Arithmetic::Float => nbw_kernel(ball, max_n)?,
        Arithmetic::Exact => nbw_kernel_exact(ball, max_n)?.to_float(),
    };
    let mut report = LemmaReport {
        check: "kernel.nbw_vs_rho".into(),
        anchor: "q^n(0,x) <= rho^n / (1 - rho)".into(),
        arithmetic,
        rho_ub,
        max_n,
        horizon: max_n,
        checked: 0,
        violations: Vec::new(),
        worst: None,
    };
    for n in 0..=max_n {
        let rhs = rho_ub.powi(n as i32) / (1.0 - rho_ub);
        for &x in xs {
            let lhs = q.prob(n, x);
            report.record(LemmaPoint { n, vertex: x, lhs, rhs, margin: rhs - lhs }, lhs <= rhs);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ball(s: &str, r: usize) -> Ball {
        Ball::build(&GroupSpec::parse(s).unwrap(), r).unwrap()
    }

    #[test]
    fn first_steps_on_free_group() {
        let b = ball("Z*Z", 4);
        let p = srw_kernel_exact(&b, 4).unwrap();
        let a = b.index_of(&b.spec().parse_word("a").unwrap()).unwrap();
        assert_eq!(p.prob(1, a), BigRational::new(1.into(), 4.into()));
        assert_eq!(p.prob(2, 0), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn pentagon_ball_returns_like_tree_at_two_steps() {
        let b = ball("Z5*Z5", 3);
        let p = srw_kernel_exact(&b, 3).unwrap();
        assert_eq!(p.prob(2, 0), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn nbw_never_returns_on_tree() {
        let b = ball("Z*Z", 6);
        let q = nbw_kernel_exact(&b, 6).unwrap();
        for n in 1..=6 {
            assert_eq!(q.count(n, 0), 0);
        }
        for v in b.sphere(3) {
            assert_eq!(q.prob(3, v as u32), BigRational::new(1.into(), 36.into()));
        }
    }

    #[test]
    fn nbw_pentagon_return() {
        let b = ball("Z5*Z5", 5);
        let q = nbw_kernel_exact(&b, 5).unwrap();
        assert_eq!(q.prob(5, 0), BigRational::new(1.into(), 81.into()));
        assert_eq!(q.count(5, 0), 4);
    }

    #[test]
    fn mass_is_conserved_up_to_radius() {
        let b = ball("Z5*Z5", 6);
        let p = srw_kernel(&b, 8);
        let q = nbw_kernel(&b, 8).unwrap();
        for n in 0..=6 {
            assert!((p.mass(n) - 1.0).abs() < 1e-12);
            assert!((q.mass(n) - 1.0).abs() < 1e-12);
        }
        assert!(p.mass(7) < 1.0);
        let pe = srw_kernel_exact(&b, 6).unwrap();
        for n in 0..=6 {
            let total: u128 = pe.row(n).iter().sum();
            assert_eq!(total, pe.denominator(n));
        }
    }

    #[test]
    fn nbw_needs_degree_three() {
        let b = ball("Z", 3);
        assert_eq!(nbw_kernel(&b, 2).unwrap_err(), KernelError::DegreeTooSmall(2));
    }

    #[test]
    fn radial_chain_matches_ball_kernel() {
        let b = ball("Z*Z", 8);
        let p = srw_kernel(&b, 16);
        let logs = radial_log_returns(4, 16);
        for n in 1..=8 {
            let exact = p.prob(2 * n, 0);
            assert!((logs[n].exp() - exact).abs() < 1e-14 * exact.max(1e-300) + 1e-300, "n={n}");
        }
    }

    #[test]
    fn kesten_values() {
        assert!((kesten_rho(4) - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((kesten_rho(3) - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert_eq!(kesten_rho(2), 1.0);
    }

    #[test]
    fn spectral_estimate_needs_even_horizon() {
        let g = GroupSpec::parse("Z*Z").unwrap();
        assert_eq!(estimate_spectral_radius(&g, 7, None).unwrap_err(), KernelError::OddHorizon(7));
    }

    #[test]
    fn non_tree_rho_requires_user_bound() {
        let g = GroupSpec::parse("Z5*Z5").unwrap();
        let est = estimate_spectral_radius(&g, 8, None).unwrap();
        assert!(est.upper.is_none());
        assert!(matches!(est.require_upper("Z5*Z5"), Err(KernelError::MissingRhoBound(_))));
        assert!(est.lower_bound > 0.5);
    }

    #[test]
    fn lemma_points_on_small_tree() {
        let b = ball("Z*Z", 4);
        let rho = kesten_rho(4);
        let tail = check_lemma_nbw_tail(&b, 4, rho, Arithmetic::Exact, None).unwrap();
        assert!(tail.passed());
        let rho_rep = check_lemma_nbw_rho(&b, 4, rho, Arithmetic::Exact, None).unwrap();
        assert!(rho_rep.passed());
        // n = 0 at the root: 1 <= 1/(1-ρ).
        let r0 = rho_rep.worst.unwrap();
        assert!(r0.margin > 0.0);
    }

    #[test]
    fn exact_rational_agrees_with_float() {
        let b = ball("Z5*Z5", 5);
        let e = srw_kernel_exact(&b, 5).unwrap();
        let f = srw_kernel(&b, 5);
        for n in 0..=5 {
            for v in 0..b.prefix_len(n) as u32 {
                let x = e.prob(n, v).to_f64().unwrap();
                assert!((x - f.prob(n, v)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_bad_rho() {
        let b = ball("Z*Z", 3);
        assert!(matches!(
            check_lemma_nbw_rho(&b, 3, 1.0, Arithmetic::Float, None),
            Err(KernelError::RhoOutOfRange(_))
        ));
        assert!(matches!(
            check_lemma_nbw_tail(&b, 5, 0.5, Arithmetic::Float, None),
            Err(KernelError::BeyondHorizon { .. })
        ));
    }
}
