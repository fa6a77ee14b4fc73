//! Independent reference computations used as oracles by the integration
//! tests. Nothing here calls into the tree module.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-layer structural entropy straight from an edge list. Blocks of size
/// one are leaves under the root; larger blocks are internal nodes. The cut
/// of a block counts edges leaving it plus self-loops inside it.
pub fn reference_entropy(n: usize, edges: &[(usize, usize, f64)], blocks: &[Vec<usize>]) -> f64 {
    let mut degree = vec![0.0; n];
    for &(i, j, w) in edges {
        if i == j {
            degree[i] += w;
        } else {
            degree[i] += w;
            degree[j] += w;
        }
    }
    let total: f64 = degree.iter().sum();
    let mut h = 0.0;
    for block in blocks {
        let inside = |v: usize| block.contains(&v);
        let vol: f64 = block.iter().map(|&v| degree[v]).sum();
        if block.len() == 1 {
            let d = degree[block[0]];
            if d > 0.0 {
                h -= d / total * (d / total).log2();
            }
            continue;
        }
        let cut: f64 = edges
            .iter()
            .filter(|&&(i, j, _)| if i == j { inside(i) } else { inside(i) != inside(j) })
            .map(|&(_, _, w)| w)
            .sum();
        if cut > 0.0 {
            h -= cut / total * (vol / total).log2();
        }
        for &v in block {
            let d = degree[v];
            if d > 0.0 {
                h -= d / total * (d / vol).log2();
            }
        }
    }
    h
}

/// Every set partition of `0..n` (restricted growth strings).
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn grow(v: usize, n: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if v == n {
            let blocks = labels.iter().max().map_or(0, |m| m + 1);
            let mut parts = vec![Vec::new(); blocks];
            for (i, &l) in labels.iter().enumerate() {
                parts[l].push(i);
            }
            out.push(parts);
            return;
        }
        let next = labels.iter().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            labels.push(l);
            grow(v + 1, n, labels, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    grow(0, n, &mut Vec::new(), &mut out);
    out
}

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

pub fn edge_triples(graph: &si2e_core::WeightedGraph) -> Vec<(usize, usize, f64)> {
    graph.edges().iter().map(|e| (e.i, e.j, e.weight)).collect()
}

pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Brute-force `I(X;Y)` from a row-major table.
pub fn mutual_information(table: &[Vec<f64>]) -> f64 {
    let px: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..table[0].len()).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (px[i] * py[j])).log2();
            }
        }
    }
    mi
}
