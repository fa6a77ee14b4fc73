//! Random fixtures for property sweeps: simplex points, joints, partitions
//! and graphs. Every generator is driven by a caller-supplied RNG.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::WeightedGraph;
use crate::joint::JointDistribution;

/// Strictly positive point on the probability simplex. Raw weights are
/// drawn from `[0.01, 1)` so no coordinate is vanishingly small.
pub fn simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
    // push rounding error into the largest coordinate
    let drift = 1.0 - probs.iter().sum::<f64>();
    let biggest = (0..n).max_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap_or(0);
    if n > 0 {
        probs[biggest] += drift;
    }
    probs
}

/// Strictly positive `rows x cols` joint table.
pub fn joint<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> JointDistribution {
    let flat = simplex(rng, rows * cols);
    let table = flat.chunks(cols).map(<[f64]>::to_vec).collect();
    JointDistribution::new(table).expect("simplex point is a valid joint")
}

/// Square joint whose diagonal carries most of the mass.
pub fn diagonal_heavy_joint<R: Rng + ?Sized>(rng: &mut R, n: usize, off_diagonal: f64) -> JointDistribution {
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { rng.gen_range(0.5..1.0) } else { off_diagonal * rng.gen_range(0.5..1.0) })
                .collect()
        })
        .collect();
    JointDistribution::from_weights(rows).expect("positive weights")
}

/// Random set partition of `0..n` into at most `n` non-empty blocks.
pub fn partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let blocks = rng.gen_range(1..=n.max(1));
    let mut groups = vec![Vec::new(); blocks];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    // seed every block so none is empty, then scatter the rest
    for (b, &v) in order.iter().take(blocks).enumerate() {
        groups[b].push(v);
    }
    for &v in order.iter().skip(blocks) {
        groups[rng.gen_range(0..blocks)].push(v);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Graph on `n` vertices where each unordered pair is an edge with
/// probability `density`, weights in `[0.1, 2)`. An occasional self-loop is
/// added. At least one edge is always present.
pub fn graph<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((i, j, rng.gen_range(0.1..2.0)));
            }
        }
        if rng.gen_bool(0.1) {
            edges.push((i, i, rng.gen_range(0.1..1.0)));
        }
    }
    if edges.iter().all(|&(i, j, _)| i == j) && n >= 2 {
        edges.push((0, n - 1, 1.0));
    }
    WeightedGraph::new(n, edges).expect("generated edges are valid")
}

/// Bipartite graph with `n` left and `n` right vertices (`0..n`, `n..2n`)
/// where each cross pair is an edge with probability `density`.
pub fn sparse_bipartite<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                edges.push((i, n + j, rng.gen_range(0.1..2.0)));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, n, 1.0));
    }
    WeightedGraph::new(2 * n, edges).expect("generated edges are valid")
}

/// `n` points in `dim` dimensions with coordinates in `[-scale, scale)`.
pub fn points<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect()
}
