//! Explicit balls in Cayley graphs and girth detection.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupSpec, Word};
use crate::rng::edge_key;

/// Default limit on the number of ball vertices.
pub const DEFAULT_VERTEX_CAP: usize = 5_000_000;

/// Marker for a neighbour lying outside the ball.
pub const OUTSIDE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BallError {
    #[error("ball of radius {radius} exceeds the vertex cap {cap} (projected {projected} vertices)")]
    CapExceeded { radius: usize, cap: usize, projected: u128 },
}

/// Girth as seen from a ball of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Girth {
    Exact(u32),
    /// No cycle closes inside the ball: girth > the stored bound (= 2R).
    Exceeds(u32),
}

impl Girth {
    /// Best known lower bound on the girth.
    pub fn lower_bound(self) -> u32 {
        match self {
            Girth::Exact(g) => g,
            Girth::Exceeds(b) => b + 1,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Exact(g) => write!(f, "{g}"),
            Girth::Exceeds(b) => write!(f, ">{b}"),
        }
    }
}

/// Vertex count of the radius-`r` ball in the `d`-regular tree; an upper
/// bound for any `d`-regular graph.
pub fn tree_ball_size(d: usize, r: usize) -> u128 {
    let d = d as u128;
    let mut total: u128 = 1;
    let mut sphere: u128 = 1;
    for k in 1..=r {
        sphere = if k == 1 { d } else { sphere.saturating_mul(d.saturating_sub(1).max(1)) };
        if d <= 2 {
            sphere = d.min(sphere);
        }
        total = total.saturating_add(sphere);
    }
    total
}

/// The radius-`R` ball around the identity, with dense vertex indices in BFS
/// order (index 0 is the root).
#[derive(Debug, Clone)]
pub struct Ball {
    spec: GroupSpec,
    radius: usize,
    words: Vec<Word>,
    dist: Vec<u32>,
    fingerprints: Vec<u64>,
    index: HashMap<Word, u32>,
    /// `nbr[v*d + k]` is `v · g_k`, or [`OUTSIDE`].
    nbr: Vec<u32>,
    edges: Vec<(u32, u32)>,
    edge_keys: Vec<u64>,
    arc_edge: Vec<u32>,
    sphere_start: Vec<usize>,
    girth: Girth,
}

impl Ball {
    pub fn build(spec: &GroupSpec, radius: usize) -> Result<Self, BallError> {
        Self::build_with_cap(spec, radius, DEFAULT_VERTEX_CAP)
    }

    pub fn build_with_cap(spec: &GroupSpec, radius: usize, cap: usize) -> Result<Self, BallError> {
        let d = spec.degree();
        let projected = tree_ball_size(d, radius);
        let over = |_: usize| BallError::CapExceeded { radius, cap, projected };

        let mut words = vec![Word::identity()];
        let mut dist = vec![0u32];
        let mut parent = vec![OUTSIDE];
        let mut index = HashMap::new();
        index.insert(Word::identity(), 0u32);
        let mut sphere_start = vec![0usize, 1];
        let mut head = 0usize;
        for r in 0..radius {
            let end = words.len();
            while head < end {
                let v = head;
                head += 1;
                for k in 0..d {
                    let w = spec.mul_generator(&words[v], k);
                    if index.contains_key(&w) {
                        continue;
                    }
                    if words.len() >= cap {
                        return Err(over(cap));
                    }
                    index.insert(w.clone(), words.len() as u32);
                    words.push(w);
                    dist.push(r as u32 + 1);
                    parent.push(v as u32);
                }
            }
            sphere_start.push(words.len());
        }

        let n = words.len();
        let mut nbr = vec![OUTSIDE; n * d];
        for v in 0..n {
            for k in 0..d {
                let w = spec.mul_generator(&words[v], k);
                if let Some(&j) = index.get(&w) {
                    nbr[v * d + k] = j;
                }
            }
        }

        let fingerprints: Vec<u64> = words.iter().map(Word::fingerprint).collect();
        let mut edges = Vec::new();
        let mut edge_keys = Vec::new();
        let mut arc_edge = vec![OUTSIDE; n * d];
        for v in 0..n {
            for k in 0..d {
                let w = nbr[v * d + k];
                if w == OUTSIDE || (w as usize) < v {
                    continue;
                }
                let e = edges.len() as u32;
                edges.push((v as u32, w));
                edge_keys.push(edge_key(fingerprints[v], fingerprints[w as usize]));
                arc_edge[v * d + k] = e;
                arc_edge[w as usize * d + spec.inverse_of(k)] = e;
            }
        }

        let mut best: Option<u32> = None;
        for &(u, v) in &edges {
            if parent[v as usize] == u || parent[u as usize] == v {
                continue;
            }
            let len = dist[u as usize] + dist[v as usize] + 1;
            best = Some(best.map_or(len, |b| b.min(len)));
        }
        let girth = match best {
            Some(g) => Girth::Exact(g),
            None => Girth::Exceeds(2 * radius as u32),
        };

        Ok(Self {
            spec: spec.clone(),
            radius,
            words,
            dist,
            fingerprints,
            index,
            nbr,
            edges,
            edge_keys,
            arc_edge,
            sphere_start,
            girth,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn degree(&self) -> usize {
        self.spec.degree()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, v: u32) -> &Word {
        &self.words[v as usize]
    }

    pub fn label(&self, v: u32) -> String {
        self.spec.format_word(&self.words[v as usize])
    }

    pub fn dist(&self, v: u32) -> u32 {
        self.dist[v as usize]
    }

    pub fn distances(&self) -> &[u32] {
        &self.dist
    }

    pub fn fingerprint(&self, v: u32) -> u64 {
        self.fingerprints[v as usize]
    }

    pub fn index_of(&self, w: &Word) -> Option<u32> {
        self.index.get(w).copied()
    }

    /// `v · g_k`, or [`OUTSIDE`].
    #[inline]
    pub fn neighbor(&self, v: u32, k: usize) -> u32 {
        self.nbr[v as usize * self.degree() + k]
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let d = self.degree();
        self.nbr[v as usize * d..(v as usize + 1) * d]
            .iter()
            .copied()
            .filter(|&w| w != OUTSIDE)
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_key(&self, e: u32) -> u64 {
        self.edge_keys[e as usize]
    }

    /// Edge used by the arc `v --g_k--> v·g_k`.
    #[inline]
    pub fn arc_edge(&self, v: u32, k: usize) -> u32 {
        self.arc_edge[v as usize * self.degree() + k]
    }

    /// Vertex indices at exactly distance `r`.
    pub fn sphere(&self, r: usize) -> std::ops::Range<usize> {
        if r > self.radius {
            return 0..0;
        }
        self.sphere_start[r]..self.sphere_start[r + 1]
    }

    /// Number of vertices at distance at most `r`.
    pub fn prefix_len(&self, r: usize) -> usize {
        self.sphere_start[r.min(self.radius) + 1]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.radius).map(|r| self.sphere(r).len()).collect()
    }

    pub fn girth(&self) -> Girth {
        self.girth
    }

    /// Writes `u v` lines after a `#` header carrying R, d and the girth status.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# spec={} R={} d={} girth={} vertices={} edges={}",
            self.spec,
            self.radius,
            self.degree(),
            self.girth,
            self.len(),
            self.edges.len()
        )?;
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Girth from a ball of radius `r_max`; shortest cycle through the root,
/// which is the girth by vertex transitivity.
pub fn girth(spec: &GroupSpec, r_max: usize) -> Result<Girth, BallError> {
    let r_max = r_max.max(1);
    // Cycles of length g appear once R >= g/2, so grow until one closes.
    let mut r = 1;
    loop {
        let ball = Ball::build(spec, r)?;
        if let Girth::Exact(g) = ball.girth() {
            return Ok(Girth::Exact(g));
        }
        if r >= r_max {
            return Ok(ball.girth());
        }
        r = (r * 2).min(r_max);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    #[test]
    fn radius_zero_is_a_point() {
        for s in ["Z*Z", "Z5*Z5", "Z2*Z2*Z2", "Z3"] {
            let b = Ball::build(&spec(s), 0).unwrap();
            assert_eq!(b.len(), 1);
            assert!(b.edges().is_empty());
        }
    }

    #[test]
    fn small_balls_match_tree_counts() {
        assert_eq!(Ball::build(&spec("Z*Z"), 2).unwrap().len(), 17);
        assert_eq!(Ball::build(&spec("Z5*Z5"), 2).unwrap().len(), 17);
    }

    #[test]
    fn cap_is_enforced() {
        let err = Ball::build_with_cap(&spec("Z*Z"), 6, 100).unwrap_err();
        assert!(matches!(err, BallError::CapExceeded { cap: 100, .. }));
    }

    #[test]
    fn interior_vertices_have_full_degree() {
        let b = Ball::build(&spec("Z5*Z5"), 5).unwrap();
        for v in 0..b.len() as u32 {
            let deg = b.neighbors(v).count();
            if (b.dist(v) as usize) < b.radius() {
                assert_eq!(deg, 4);
            } else {
                assert!(deg <= 4);
            }
        }
    }

    #[test]
    fn distances_agree_with_word_length() {
        let s = spec("Z5*Z*Z2");
        let b = Ball::build(&s, 4).unwrap();
        for v in 0..b.len() as u32 {
            assert_eq!(b.dist(v), s.word_length(b.word(v)));
        }
    }

    #[test]
    fn girth_of_small_free_products() {
        assert_eq!(girth(&spec("Z*Z"), 10).unwrap(), Girth::Exceeds(20));
        assert_eq!(girth(&spec("Z5*Z5"), 6).unwrap(), Girth::Exact(5));
        assert_eq!(girth(&spec("Z3*Z3"), 6).unwrap(), Girth::Exact(3));
        assert_eq!(girth(&spec("Z4*Z"), 6).unwrap(), Girth::Exact(4));
    }

    #[test]
    fn edge_list_header() {
        let b = Ball::build(&spec("Z*Z"), 1).unwrap();
        let mut buf = Vec::new();
        b.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "# spec=Z*Z R=1 d=4 girth=>2 vertices=5 edges=4"
        );
        assert_eq!(lines.count(), 4);
    }
}
