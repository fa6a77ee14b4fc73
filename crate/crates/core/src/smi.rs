//! Structural mutual information of a square joint distribution.
//!
//! The joint is viewed as a bipartite graph (`x` vertices `0..n`, `y`
//! vertices `n..2n`, volume 2) partitioned into `n` pairs. Shifting which
//! `x` is paired with each `y` gives `n` trees; structural MI sums, over
//! those trees, how far the pair entropy falls below the two single-variable
//! structural entropies.

use crate::graph::bipartite_from_joint;
use crate::info::{check_simplex, entropy, xlog2};
use crate::joint::{Axis, JointDistribution};
use crate::tree::{structural_entropy, EncodingTree};
use crate::Result;

const SANDWICH_TOLERANCE: f64 = 1e-9;

/// `H^SI` of one marginal: `-sum (p / 2) log2(p / 2)`.
pub fn marginal_structural_entropy(joint: &JointDistribution, axis: Axis) -> f64 {
    joint
        .marginal(axis)
        .iter()
        .map(|&p| -xlog2(p / 2.0, p / 2.0))
        .sum()
}

/// Structural entropy of the bipartite graph under the tree pairing
/// `x_{(i + l) mod n}` with `y_i`, evaluated node by node.
pub fn joint_structural_entropy(joint: &JointDistribution, l: usize) -> Result<f64> {
    let n = joint.require_square()?;
    let (px, py) = (joint.px(), joint.py());
    let mut h = 0.0;
    for i in 0..n {
        let xi = (i + l) % n;
        let vol = px[xi] + py[i];
        let g = vol - 2.0 * joint.p(xi, i);
        if g > 0.0 {
            h -= g / 2.0 * (vol / 2.0).log2();
        }
        h -= xlog2(px[xi] / 2.0, px[xi] / vol);
        h -= xlog2(py[i] / 2.0, py[i] / vol);
    }
    Ok(h)
}

/// `sum_ij p(x_i, y_j) log2(2 / (p(x_i) + p(y_j)))`.
pub fn smi_closed_form(joint: &JointDistribution) -> Result<f64> {
    joint.require_square()?;
    let (px, py) = (joint.px(), joint.py());
    Ok(joint
        .iter()
        .filter(|&(_, _, p)| p > 0.0)
        .map(|(i, j, p)| p * (2.0 / (px[i] + py[j])).log2())
        .sum())
}

/// Structural MI by its definition: builds the bipartite graph and each of
/// the `n` shifted pair trees, then sums `H^SI(X) + H^SI(Y) - H^T(G)`.
/// Requires a strictly positive table.
pub fn smi_by_definition(joint: &JointDistribution) -> Result<f64> {
    let n = joint.require_square()?;
    let graph = bipartite_from_joint(joint)?;
    let singles = marginal_structural_entropy(joint, Axis::X) + marginal_structural_entropy(joint, Axis::Y);
    let mut total = 0.0;
    for l in 0..n {
        let groups: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + l) % n, n + i]).collect();
        let tree = EncodingTree::from_partition(&graph, &groups)?;
        total += singles - structural_entropy(&graph, &tree)?;
    }
    Ok(total)
}

/// Classical information quantities of a joint, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shannon {
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
    pub h_x_given_y: f64,
    pub mutual_information: f64,
}

pub fn shannon(joint: &JointDistribution) -> Shannon {
    let h_x = entropy(joint.px());
    let h_y = entropy(joint.py());
    let h_xy = -joint.iter().map(|(_, _, p)| xlog2(p, p)).sum::<f64>();
    Shannon {
        h_x,
        h_y,
        h_xy,
        h_x_given_y: h_xy - h_y,
        mutual_information: h_x + h_y - h_xy,
    }
}

/// A checked sandwich `lhs <= mid <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremReport {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub epsilon: f64,
    pub holds: bool,
}

impl TheoremReport {
    fn new(lhs: f64, mid: f64, rhs: f64, epsilon: f64) -> Self {
        let holds = lhs <= mid + SANDWICH_TOLERANCE && mid <= rhs + SANDWICH_TOLERANCE;
        Self { lhs, mid, rhs, epsilon, holds }
    }
}

/// Exponent `epsilon = min over cells of min(log_p p(x_i), log_p p(y_j))`
/// with `p = p(x_i, y_j)`; zero cells are skipped, and a single certain cell
/// gives 1.
pub fn sandwich_epsilon(joint: &JointDistribution) -> f64 {
    let (px, py) = (joint.px(), joint.py());
    joint
        .iter()
        .filter(|&(_, _, p)| p > 0.0 && p < 1.0)
        .map(|(i, j, p)| {
            let lp = p.ln();
            (px[i].ln() / lp).min(py[j].ln() / lp)
        })
        .fold(1.0, f64::min)
}

/// `I(X;Y) <= I^SI(X;Y) <= I(X;Y) + (1 - epsilon) H(X,Y)`.
pub fn theorem32_report(joint: &JointDistribution) -> Result<TheoremReport> {
    let smi = smi_closed_form(joint)?;
    let s = shannon(joint);
    let epsilon = sandwich_epsilon(joint);
    Ok(TheoremReport::new(
        s.mutual_information,
        smi,
        s.mutual_information + (1.0 - epsilon) * s.h_xy,
        epsilon,
    ))
}

/// `(I^SI, I)` for the one-to-one joint `p(x_i, y_i) = p_i`, evaluated from
/// closed forms because the table has zero off-diagonal cells. Both equal
/// `H(X)`.
pub fn theorem41_check(marginal: &[f64]) -> Result<(f64, f64)> {
    check_simplex(marginal)?;
    // diagonal cell p_i with p(x_i) = p(y_i) = p_i: log2(2 / 2p_i)
    let smi: f64 = marginal.iter().map(|&p| p * (1.0 / p).log2()).sum();
    let h = entropy(marginal);
    // H(X) + H(Y) - H(X,Y) with all three equal to H
    let mi = h + h - h;
    Ok((smi, mi))
}
