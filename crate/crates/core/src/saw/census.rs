//! Exact self-avoiding walk census by depth-first backtracking on a ball.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::ball::{Ball, OUTSIDE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("walks of length {n_max} need a ball of radius >= {n_max}, got {radius}")]
    BallTooSmall { n_max: usize, radius: usize },
    #[error("per-endpoint count overflowed 64 bits at length {0}")]
    Overflow(usize),
}

/// Exact counts `c_n` and `c_n(x)` for `n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SawCensus {
    pub n_max: usize,
    pub degree: usize,
    /// `counts[n] = c_n`.
    pub counts: Vec<BigUint>,
    /// `endpoint[n][v] = c_n(v)` over ball vertices within distance `n`.
    pub endpoint: Vec<Vec<u64>>,
    /// Distance from the root, per ball vertex within distance `n_max`.
    pub dist: Vec<u32>,
    /// Word labels of the same vertices.
    pub labels: Vec<String>,
}

struct Partial {
    rows: Vec<Vec<u64>>,
    overflow: Option<usize>,
}

fn dfs(ball: &Ball, n_max: usize, first: u32) -> Partial {
    let mut rows: Vec<Vec<u64>> = (0..=n_max).map(|n| vec![0u64; ball.prefix_len(n)]).collect();
    let mut on_path = vec![false; ball.prefix_len(n_max)];
    let mut overflow = None;
    on_path[0] = true;
    on_path[first as usize] = true;
    rows[1][first as usize] = 1;
    // Explicit stack of (vertex, next generator to try).
    let mut stack: Vec<(u32, usize)> = vec![(first, 0)];
    let d = ball.degree();
    while let Some(&(v, k)) = stack.last() {
        if stack.len() == n_max || k == d {
            on_path[v as usize] = false;
            stack.pop();
            continue;
        }
        stack.last_mut().expect("nonempty").1 += 1;
        let w = ball.neighbor(v, k);
        if w == OUTSIDE || on_path[w as usize] {
            continue;
        }
        let n = stack.len() + 1;
        let slot = &mut rows[n][w as usize];
        match slot.checked_add(1) {
            Some(x) => *slot = x,
            None => {
                overflow.get_or_insert(n);
            }
        }
        on_path[w as usize] = true;
        stack.push((w, 0));
    }
    Partial { rows, overflow }
}

/// Enumerates all self-avoiding walks of length `<= n_max` from the root.
///
/// The `d` subtrees below the first step are searched in parallel and merged
/// in generator order.
pub fn enumerate_saw(ball: &Ball, n_max: usize) -> Result<SawCensus, CensusError> {
    if n_max > ball.radius() {
        return Err(CensusError::BallTooSmall { n_max, radius: ball.radius() });
    }
    let d = ball.degree();
    let firsts: Vec<u32> = (0..d).map(|k| ball.neighbor(0, k)).filter(|&w| w != OUTSIDE).collect();
    let partials: Vec<Partial> = if n_max == 0 {
        Vec::new()
    } else {
        firsts.par_iter().map(|&w| dfs(ball, n_max, w)).collect()
    };
    let mut endpoint: Vec<Vec<u64>> = (0..=n_max).map(|n| vec![0u64; ball.prefix_len(n)]).collect();
    endpoint[0][0] = 1;
    for part in &partials {
        if let Some(n) = part.overflow {
            return Err(CensusError::Overflow(n));
        }
        for (n, row) in part.rows.iter().enumerate() {
            for (acc, &c) in endpoint[n].iter_mut().zip(row) {
                *acc = acc.checked_add(c).ok_or(CensusError::Overflow(n))?;
            }
        }
    }
    let counts = endpoint
        .iter()
        .map(|row| row.iter().fold(BigUint::zero(), |acc, &c| acc + c))
        .collect();
    let m = ball.prefix_len(n_max);
    Ok(SawCensus {
        n_max,
        degree: d,
        counts,
        endpoint,
        dist: ball.distances()[..m].to_vec(),
        labels: (0..m as u32).map(|v| ball.label(v)).collect(),
    })
}

impl SawCensus {
    pub fn count(&self, n: usize) -> &BigUint {
        &self.counts[n]
    }

    pub fn count_f64(&self, n: usize) -> f64 {
        self.counts[n].to_f64().unwrap_or(f64::INFINITY)
    }

    /// `d (d-1)^{n-1}`, the non-backtracking walk count.
    pub fn nbw_count(&self, n: usize) -> BigUint {
        if n == 0 {
            return BigUint::from(1u32);
        }
        BigUint::from(self.degree) * BigUint::from(self.degree - 1).pow(n as u32 - 1)
    }

    /// Largest endpoint multiplicity `max_x c_n(x)`.
    pub fn max_endpoint(&self, n: usize) -> (u32, u64) {
        self.endpoint[n]
            .iter()
            .enumerate()
            .map(|(v, &c)| (v as u32, c))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap_or((0, 0))
    }

    /// `Σ_x dist(x) c_n(x)`.
    pub fn distance_sum(&self, n: usize) -> BigUint {
        self.endpoint[n]
            .iter()
            .zip(&self.dist)
            .fold(BigUint::zero(), |acc, (&c, &r)| acc + BigUint::from(c) * BigUint::from(r))
    }

    /// First violated split of `c_{m+n} <= c_m c_n`, if any.
    pub fn submultiplicativity_violation(&self) -> Option<(usize, usize)> {
        for total in 0..=self.n_max {
            for m in 0..=total {
                if self.counts[total] > &self.counts[m] * &self.counts[total - m] {
                    return Some((m, total - m));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn census(s: &str, n: usize) -> SawCensus {
        let b = Ball::build(&GroupSpec::parse(s).unwrap(), n).unwrap();
        enumerate_saw(&b, n).unwrap()
    }

    #[test]
    fn tree_counts() {
        let c = census("Z*Z", 6);
        for n in 1..=6 {
            assert_eq!(c.counts[n], c.nbw_count(n));
        }
        assert_eq!(c.counts[3], BigUint::from(36u32));
    }

    #[test]
    fn pentagons_remove_closed_words() {
        let c = census("Z5*Z5", 6);
        assert_eq!(c.counts[5], BigUint::from(320u32));
        assert_eq!(c.counts[1], BigUint::from(4u32));
        assert!(c.submultiplicativity_violation().is_none());
    }

    #[test]
    fn endpoint_rows_sum_to_counts() {
        let c = census("Z3*Z", 6);
        for n in 0..=6 {
            let s: u64 = c.endpoint[n].iter().sum();
            assert_eq!(BigUint::from(s), c.counts[n]);
        }
    }

    #[test]
    fn rejects_small_ball() {
        let b = Ball::build(&GroupSpec::parse("Z*Z").unwrap(), 3).unwrap();
        assert!(matches!(enumerate_saw(&b, 4), Err(CensusError::BallTooSmall { .. })));
    }
}
