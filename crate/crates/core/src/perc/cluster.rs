//! Single-trial cluster samplers.
//!
//! Edge `e` is open in trial `t` iff `edge_uniform(t, key(e)) < p`. The key
//! comes from the endpoint words, so the ball sampler, the implicit word-graph
//! explorer and the invasion process all see the same configuration, and
//! raising `p` only opens edges.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::ball::{Ball, OUTSIDE};
use crate::group::{GroupSpec, Word};
use crate::rng::{edge_key, edge_uniform, trial_key};
use crate::union_find::UnionFind;

/// Per-trial outcome of a root-cluster sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// Root-cluster vertex count (inside the ball or the exploration cap).
    pub size: usize,
    /// The cluster reached the boundary sphere (or the size cap).
    pub touched_boundary: bool,
    pub open_edges: usize,
}

#[inline]
fn is_open(key: u64, edge: u64, p: f64) -> bool {
    edge_uniform(key, edge) < p
}

/// All ball edges in one trial, clusters by union-find.
pub fn sample_clusters(ball: &Ball, p: f64, seed: u64, trial: u64) -> TrialOutcome {
    let key = trial_key(seed, trial);
    let mut uf = UnionFind::new(ball.len());
    let mut open_edges = 0;
    for (e, &(u, v)) in ball.edges().iter().enumerate() {
        if is_open(key, ball.edge_key(e as u32), p) {
            open_edges += 1;
            uf.union(u, v);
        }
    }
    let root = uf.find(0);
    let size = uf.size(0);
    let touched_boundary = ball
        .sphere(ball.radius())
        .any(|v| uf.find(v as u32) == root);
    TrialOutcome { size, touched_boundary, open_edges }
}

/// Open-edge partition of the ball, as a component label per vertex.
pub fn ball_partition_union_find(ball: &Ball, p: f64, seed: u64, trial: u64) -> Vec<u32> {
    let key = trial_key(seed, trial);
    let mut uf = UnionFind::new(ball.len());
    for (e, &(u, v)) in ball.edges().iter().enumerate() {
        if is_open(key, ball.edge_key(e as u32), p) {
            uf.union(u, v);
        }
    }
    (0..ball.len() as u32).map(|v| uf.find(v)).collect()
}

/// Same partition by breadth-first search; labels are the smallest vertex
/// of each component.
pub fn ball_partition_bfs(ball: &Ball, p: f64, seed: u64, trial: u64) -> Vec<u32> {
    let key = trial_key(seed, trial);
    let d = ball.degree();
    let mut label = vec![OUTSIDE; ball.len()];
    let mut queue = VecDeque::new();
    for s in 0..ball.len() as u32 {
        if label[s as usize] != OUTSIDE {
            continue;
        }
        label[s as usize] = s;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for k in 0..d {
                let w = ball.neighbor(v, k);
                if w == OUTSIDE || label[w as usize] != OUTSIDE {
                    continue;
                }
                let e = ball.arc_edge(v, k);
                if is_open(key, ball.edge_key(e), p) {
                    label[w as usize] = s;
                    queue.push_back(w);
                }
            }
        }
    }
    label
}

/// Vertices of the ball connected to the root in one trial.
pub fn root_cluster_in_ball(ball: &Ball, p: f64, seed: u64, trial: u64) -> Vec<bool> {
    let key = trial_key(seed, trial);
    let d = ball.degree();
    let mut seen = vec![false; ball.len()];
    seen[0] = true;
    let mut stack = vec![0u32];
    while let Some(v) = stack.pop() {
        for k in 0..d {
            let w = ball.neighbor(v, k);
            if w == OUTSIDE || seen[w as usize] {
                continue;
            }
            if is_open(key, ball.edge_key(ball.arc_edge(v, k)), p) {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Explores the root cluster on the infinite Cayley graph without building a
/// ball. Vertices farther than `radius` are not entered (`None` = no limit);
/// exploration stops once `cap` vertices are found.
pub fn explore_cluster(
    spec: &GroupSpec,
    p: f64,
    seed: u64,
    trial: u64,
    radius: Option<usize>,
    cap: usize,
) -> TrialOutcome {
    let key = trial_key(seed, trial);
    let d = spec.degree();
    let mut seen: HashSet<Word> = HashSet::new();
    let root = Word::identity();
    seen.insert(root.clone());
    let mut stack = vec![root];
    let mut open_edges = 0;
    let mut touched = radius == Some(0);
    while let Some(v) = stack.pop() {
        let fv = v.fingerprint();
        for k in 0..d {
            let w = spec.mul_generator(&v, k);
            if seen.contains(&w) {
                continue;
            }
            let rw = spec.word_length(&w) as usize;
            if radius.is_some_and(|lim| rw > lim) {
                continue;
            }
            if !is_open(key, edge_key(fv, w.fingerprint()), p) {
                continue;
            }
            open_edges += 1;
            if Some(rw) == radius {
                touched = true;
            }
            seen.insert(w.clone());
            if seen.len() >= cap {
                return TrialOutcome { size: seen.len(), touched_boundary: true, open_edges };
            }
            stack.push(w);
        }
    }
    TrialOutcome { size: seen.len(), touched_boundary: touched, open_edges }
}

/// Whether `target` is in the root cluster, exploring only within distance
/// `radius` of the root.
pub fn connected_within(
    spec: &GroupSpec,
    p: f64,
    seed: u64,
    trial: u64,
    target: &Word,
    radius: usize,
) -> bool {
    let key = trial_key(seed, trial);
    let d = spec.degree();
    let root = Word::identity();
    if *target == root {
        return true;
    }
    let mut seen: HashSet<Word> = HashSet::new();
    seen.insert(root.clone());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        let fv = v.fingerprint();
        for k in 0..d {
            let w = spec.mul_generator(&v, k);
            if seen.contains(&w) || spec.word_length(&w) as usize > radius {
                continue;
            }
            if is_open(key, edge_key(fv, w.fingerprint()), p) {
                if w == *target {
                    return true;
                }
                seen.insert(w.clone());
                stack.push(w);
            }
        }
    }
    false
}

/// Invasion bottlenecks: `out[i]` is the smallest `p` at which the root is
/// joined to the sphere of radius `radii[i]` in this trial. Crossing at `p`
/// happens iff `out[i] < p`.
///
/// Prim's algorithm from the root on the edge uniforms: the largest uniform
/// accepted before the cluster first reaches distance `r` is the minimax
/// path value to `S_r`.
pub fn invasion_bottlenecks(spec: &GroupSpec, seed: u64, trial: u64, radii: &[usize]) -> Vec<f64> {
    let key = trial_key(seed, trial);
    let d = spec.degree();
    let mut out = vec![f64::NAN; radii.len()];
    let r_max = radii.iter().copied().max().unwrap_or(0);
    for (i, &r) in radii.iter().enumerate() {
        if r == 0 {
            out[i] = f64::NEG_INFINITY;
        }
    }
    // Radii never reached (finite graphs) get +inf: no crossing at any p.
    let finish = |out: Vec<f64>| out.into_iter().map(|x| if x.is_nan() { f64::INFINITY } else { x }).collect();
    if r_max == 0 || d == 0 {
        return finish(out);
    }

    // Heap entries carry the uniform's raw bits so ordering is total.
    let mut heap: BinaryHeap<Reverse<(u64, u64)>> = BinaryHeap::new();
    let mut pending: HashMap<u64, Word> = HashMap::new();
    let mut inside: HashSet<Word> = HashSet::new();
    let mut next_id = 0u64;
    let root = Word::identity();
    inside.insert(root.clone());
    let mut push_boundary = |v: &Word,
                             inside: &HashSet<Word>,
                             heap: &mut BinaryHeap<Reverse<(u64, u64)>>,
                             pending: &mut HashMap<u64, Word>| {
        let fv = v.fingerprint();
        for k in 0..d {
            let w = spec.mul_generator(v, k);
            if inside.contains(&w) {
                continue;
            }
            let u = edge_uniform(key, edge_key(fv, w.fingerprint()));
            heap.push(Reverse((u.to_bits(), next_id)));
            pending.insert(next_id, w);
            next_id += 1;
        }
    };
    push_boundary(&root, &inside, &mut heap, &mut pending);
    let mut level = 0.0f64;
    let mut reached = 0usize;
    while let Some(Reverse((bits, id))) = heap.pop() {
        let w = pending.remove(&id).expect("heap entry has a target");
        if inside.contains(&w) {
            continue;
        }
        level = level.max(f64::from_bits(bits));
        let rw = spec.word_length(&w) as usize;
        if rw > reached {
            for (i, &r) in radii.iter().enumerate() {
                if r > reached && r <= rw {
                    out[i] = level;
                }
            }
            reached = rw;
            if reached >= r_max {
                break;
            }
        }
        inside.insert(w.clone());
        push_boundary(&w, &inside, &mut heap, &mut pending);
    }
    finish(out)
}
