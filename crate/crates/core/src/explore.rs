//! Value-conditional structural entropy over a batch of transitions.
//!
//! Records are grouped into communities by minimising the structural entropy
//! of a graph over their policy values. The k-NN entropy of all record
//! embeddings minus that of the community centroids is the batch estimate;
//! its per-record counterpart is the intrinsic reward.

use crate::graph::{degree_realization, value_graph_with, ValueKernel};
use crate::info::{check_simplex, entropy};
use crate::tree::{optimize_two_layer, structural_entropy, EncodingTree, OptimizeMode};
use crate::{Error, Result};

/// Floor applied to k-NN distances before taking logarithms.
pub const DISTANCE_FLOOR: f64 = 1e-12;

const SANDWICH_TOLERANCE: f64 = 1e-9;

/// One sampled transition.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRecord {
    pub state: usize,
    pub action: usize,
    pub next_state: usize,
    pub reward: f64,
    pub embedding: Vec<f64>,
    /// Policy-derived scalar used to build the value graph.
    pub value: f64,
}

/// A batch of at least two records whose embeddings share one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionBatch {
    records: Vec<TransitionRecord>,
    dim: usize,
    flat: Vec<f64>,
}

impl TransitionBatch {
    pub fn new(records: Vec<TransitionRecord>) -> Result<Self> {
        if records.len() < 2 {
            return Err(Error::InvalidBatch(format!("need at least 2 records, got {}", records.len())));
        }
        let dim = records[0].embedding.len();
        if dim == 0 {
            return Err(Error::BadDimension);
        }
        let mut flat = Vec::with_capacity(dim * records.len());
        for (i, r) in records.iter().enumerate() {
            if r.embedding.len() != dim {
                return Err(Error::InvalidBatch(format!(
                    "record {i} has dimension {}, expected {dim}",
                    r.embedding.len()
                )));
            }
            if !r.value.is_finite() || r.embedding.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidBatch(format!("record {i} has a non-finite entry")));
            }
            flat.extend_from_slice(&r.embedding);
        }
        Ok(Self { records, dim, flat })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn records(&self) -> &[TransitionRecord] {
        &self.records
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.value).collect()
    }

    fn embedding(&self, i: usize) -> &[f64] {
        &self.flat[i * self.dim..(i + 1) * self.dim]
    }
}

/// How a community is placed in embedding space for the community-level
/// k-NN term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CentroidRule {
    /// Arithmetic mean of member embeddings.
    #[default]
    Mean,
    /// The member closest (in total squared distance) to the others.
    Medoid,
    /// Mean weighted by member values; falls back to the plain mean when
    /// the weights sum to zero.
    ValueWeighted,
}

/// Partition of a batch into communities, with one point per community.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityAssignment {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
    centroids: Vec<f64>,
    dim: usize,
}

impl CommunityAssignment {
    /// Communities are renumbered by smallest member.
    pub fn from_groups(batch: &TransitionBatch, groups: &[Vec<usize>], rule: CentroidRule) -> Result<Self> {
        let n = batch.len();
        let mut members: Vec<Vec<usize>> = groups.to_vec();
        let mut labels = vec![usize::MAX; n];
        for g in members.iter_mut() {
            if g.is_empty() {
                return Err(Error::InvalidBatch("empty community".into()));
            }
            g.sort_unstable();
        }
        members.sort_by_key(|g| g[0]);
        for (c, g) in members.iter().enumerate() {
            for &i in g {
                if i >= n || labels[i] != usize::MAX {
                    return Err(Error::InvalidBatch(format!("record {i} is out of range or repeated")));
                }
                labels[i] = c;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::InvalidBatch("communities do not cover the batch".into()));
        }
        let dim = batch.dim();
        let mut centroids = vec![0.0; members.len() * dim];
        for (c, g) in members.iter().enumerate() {
            place(batch, g, rule, &mut centroids[c * dim..(c + 1) * dim]);
        }
        Ok(Self { labels, members, centroids, dim })
    }

    pub fn community_count(&self) -> usize {
        self.members.len()
    }

    pub fn label(&self, record: usize) -> usize {
        self.labels[record]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn centroid(&self, community: usize) -> &[f64] {
        &self.centroids[community * self.dim..(community + 1) * self.dim]
    }
}

fn place(batch: &TransitionBatch, group: &[usize], rule: CentroidRule, out: &mut [f64]) {
    let mean = |out: &mut [f64], weights: &dyn Fn(usize) -> f64, total: f64| {
        for &i in group {
            let w = weights(i) / total;
            for (o, x) in out.iter_mut().zip(batch.embedding(i)) {
                *o += w * x;
            }
        }
    };
    match rule {
        CentroidRule::Mean => mean(out, &|_| 1.0, group.len() as f64),
        CentroidRule::ValueWeighted => {
            let total: f64 = group.iter().map(|&i| batch.records[i].value).sum();
            if total > 0.0 && group.iter().all(|&i| batch.records[i].value >= 0.0) {
                mean(out, &|i| batch.records[i].value, total);
            } else {
                mean(out, &|_| 1.0, group.len() as f64);
            }
        }
        CentroidRule::Medoid => {
            let best = group
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let cost = |i: usize| -> f64 {
                        group.iter().map(|&j| squared(batch.embedding(i), batch.embedding(j))).sum()
                    };
                    cost(a).total_cmp(&cost(b))
                })
                .expect("community is non-empty");
            out.copy_from_slice(batch.embedding(best));
        }
    }
}

#[inline]
fn squared(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Twice the distance from point `i` to its `k`-th nearest other point.
fn knn_diameter(flat: &[f64], dim: usize, i: usize, k: usize, scratch: &mut Vec<f64>) -> f64 {
    let n = flat.len() / dim;
    let p = &flat[i * dim..(i + 1) * dim];
    scratch.clear();
    scratch.extend((0..n).filter(|&j| j != i).map(|j| squared(p, &flat[j * dim..(j + 1) * dim])));
    let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    2.0 * kth.sqrt()
}

fn knn_entropy_flat(flat: &[f64], dim: usize, k: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::BadDimension);
    }
    let n = flat.len() / dim;
    if k == 0 || n <= k {
        return Err(Error::TooFewPoints { k, n });
    }
    let mut scratch = Vec::with_capacity(n);
    let sum: f64 = (0..n)
        .map(|i| knn_diameter(flat, dim, i, k, &mut scratch).max(DISTANCE_FLOOR).log2())
        .sum();
    Ok(dim as f64 / n as f64 * sum)
}

/// k-NN entropy estimate `(d / n) * sum log2 max(2 * dist_k(x_i), 1e-12)`
/// without its additive constant.
pub fn knn_entropy(points: &[Vec<f64>], k: usize) -> Result<f64> {
    let dim = points.first().map_or(0, Vec::len);
    if dim == 0 {
        return Err(Error::BadDimension);
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::BadDimension);
    }
    let flat: Vec<f64> = points.iter().flatten().copied().collect();
    knn_entropy_flat(&flat, dim, k)
}

/// Groups records by minimising the structural entropy of their value
/// graph. A graph with no weight (all values tied) yields one community.
pub fn build_hierarchy(batch: &TransitionBatch, kernel: ValueKernel, rule: CentroidRule) -> Result<CommunityAssignment> {
    let graph = value_graph_with(&batch.values(), kernel)?;
    let groups = match optimize_two_layer(&graph, OptimizeMode::Community) {
        Ok(tree) => tree.communities(),
        Err(Error::ZeroVolume) => vec![(0..batch.len()).collect()],
        Err(e) => return Err(e),
    };
    CommunityAssignment::from_groups(batch, &groups, rule)
}

fn community_k(k: usize, communities: usize) -> Option<usize> {
    (communities >= 2).then(|| k.min(communities - 1))
}

fn require_k(batch: &TransitionBatch, k: usize) -> Result<()> {
    if k == 0 || k >= batch.len() {
        return Err(Error::TooFewPoints { k, n: batch.len() });
    }
    Ok(())
}

/// Batch estimate of `H(V0) - H(V1)`: k-NN entropy of all embeddings minus
/// k-NN entropy of the community centroids (with `min(k, n1 - 1)`
/// neighbours; zero for a single community).
pub fn vcse_estimate(batch: &TransitionBatch, assignment: &CommunityAssignment, k: usize) -> Result<f64> {
    require_k(batch, k)?;
    let first = knn_entropy_flat(&batch.flat, batch.dim, k)?;
    let second = match community_k(k, assignment.community_count()) {
        Some(k1) => knn_entropy_flat(&assignment.centroids, assignment.dim, k1)?,
        None => 0.0,
    };
    Ok(first - second)
}

/// Intrinsic reward of one record:
/// `log2(1 + d0(i)) - log2(1 + d1(community of i))`.
pub fn intrinsic_reward_at(
    batch: &TransitionBatch,
    assignment: &CommunityAssignment,
    k: usize,
    record: usize,
) -> Result<f64> {
    require_k(batch, k)?;
    let mut scratch = Vec::with_capacity(batch.len());
    let d0 = knn_diameter(&batch.flat, batch.dim, record, k, &mut scratch);
    let d1 = match community_k(k, assignment.community_count()) {
        Some(k1) => knn_diameter(&assignment.centroids, assignment.dim, assignment.label(record), k1, &mut scratch),
        None => 0.0,
    };
    Ok((1.0 + d0).log2() - (1.0 + d1).log2())
}

/// [`intrinsic_reward_at`] for every record, in batch order.
pub fn intrinsic_rewards(batch: &TransitionBatch, assignment: &CommunityAssignment, k: usize) -> Result<Vec<f64>> {
    (0..batch.len())
        .map(|i| intrinsic_reward_at(batch, assignment, k, i))
        .collect()
}

/// `r_e + beta * r_i`.
pub fn combine_reward(r_ext: f64, r_int: f64, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::NegativeCoefficient(beta));
    }
    Ok(r_ext + beta * r_int)
}

/// Exact quantities of the value-conditional entropy sandwich
/// `zeta H(V0) <= H(V0) - H(V1) <= H^T(G') <= H(V0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactVcse {
    pub h_v0: f64,
    pub h_v1: f64,
    pub h_tree: f64,
    pub zeta: f64,
    pub holds: bool,
}

/// Evaluates the sandwich for a distribution over records and a partition
/// of them. `G'` is the degree realization of `probs`; the tree has the
/// partition's blocks as root children.
pub fn exact_vcse(probs: &[f64], communities: &[Vec<usize>]) -> Result<ExactVcse> {
    check_simplex(probs)?;
    let graph = degree_realization(probs)?;
    let tree = EncodingTree::from_partition(&graph, communities)?;
    let h_tree = structural_entropy(&graph, &tree)?;
    let h_v0 = entropy(probs);
    let community_mass: Vec<f64> = tree
        .communities()
        .iter()
        .map(|c| c.iter().map(|&i| probs[i]).sum())
        .collect();
    let h_v1 = entropy(&community_mass);
    let mut zeta = 1.0f64;
    for (c, members) in tree.communities().iter().enumerate() {
        for &i in members {
            let p = probs[i];
            if p < 1.0 {
                zeta = zeta.min((p / community_mass[c]).ln() / p.ln());
            }
        }
    }
    let gap = h_v0 - h_v1;
    let t = SANDWICH_TOLERANCE;
    let holds = zeta * h_v0 <= gap + t && gap <= h_tree + t && h_tree <= h_v0 + t;
    Ok(ExactVcse { h_v0, h_v1, h_tree, zeta, holds })
}
