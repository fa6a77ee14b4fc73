//! Exact tabular evaluation of the representation losses and the bounds
//! they stand for.
//!
//! Joints are passed with `Z` on the rows and the state variable (`S` or
//! `S'`) on the columns.

use crate::info::xlog2;
use crate::joint::{Axis, JointDistribution};
use crate::smi::{shannon, smi_closed_form};
use crate::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-12;
const CHECK_TOLERANCE: f64 = 1e-9;

/// Conditional table `q(outcome | given)`; a single row is an unconditional
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularChannel {
    given: usize,
    outcomes: usize,
    table: Vec<f64>,
}

impl TabularChannel {
    /// Rows are indexed by the conditioning value; entries must be positive
    /// and each row must sum to 1.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let given = rows.len();
        let outcomes = rows.first().map_or(0, Vec::len);
        if given == 0 || outcomes == 0 || rows.iter().any(|r| r.len() != outcomes) {
            return Err(Error::BadShape);
        }
        for row in &rows {
            if let Some((index, &value)) = row.iter().enumerate().find(|(_, &q)| !(q > 0.0 && q <= 1.0)) {
                return Err(Error::InvalidProbability { index, value });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::NotNormalized(sum));
            }
        }
        Ok(Self { given, outcomes, table: rows.into_iter().flatten().collect() })
    }

    /// Single-row distribution over outcomes.
    pub fn marginal(probs: Vec<f64>) -> Result<Self> {
        Self::new(vec![probs])
    }

    /// The joint's own marginal along `axis`.
    pub fn marginal_of(joint: &JointDistribution, axis: Axis) -> Result<Self> {
        Self::marginal(joint.marginal(axis).to_vec())
    }

    /// The joint's exact conditional of the other variable given `given`.
    /// With `Axis::Y` the rows are indexed by column values: `q(row | col)`.
    pub fn conditional_of(joint: &JointDistribution, given: Axis) -> Result<Self> {
        let rows = match given {
            Axis::Y => (0..joint.cols())
                .map(|j| (0..joint.rows()).map(|i| joint.p(i, j) / joint.py()[j]).collect())
                .collect(),
            Axis::X => (0..joint.rows())
                .map(|i| (0..joint.cols()).map(|j| joint.p(i, j) / joint.px()[i]).collect())
                .collect(),
        };
        Self::new(rows)
    }

    /// Laplace-smoothed conditional from co-occurrence counts
    /// (`counts[given][outcome]`).
    pub fn from_counts(counts: &[Vec<f64>], alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::NegativeCoefficient(alpha));
        }
        let rows = counts
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum::<f64>() + alpha * row.len() as f64;
                row.iter().map(|&c| (c + alpha) / total).collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn given_count(&self) -> usize {
        self.given
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes
    }

    #[inline]
    pub fn q(&self, given: usize, outcome: usize) -> f64 {
        self.table[given * self.outcomes + outcome]
    }

    fn require_shape(&self, given: usize, outcomes: usize) -> Result<()> {
        if self.outcomes != outcomes {
            return Err(Error::AlphabetMismatch { expected: outcomes, got: self.outcomes });
        }
        if self.given != given {
            return Err(Error::AlphabetMismatch { expected: given, got: self.given });
        }
        Ok(())
    }
}

/// `sum_s p(s) KL(p(z|s) || q_m(z))`, an upper bound on `I(Z;S)`.
pub fn l_up(joint_zs: &JointDistribution, q_m: &TabularChannel) -> Result<f64> {
    q_m.require_shape(1, joint_zs.rows())?;
    let ps = joint_zs.py();
    Ok(joint_zs
        .iter()
        .map(|(z, s, p)| xlog2(p, p / (ps[s] * q_m.q(0, z))))
        .sum())
}

/// `sum p(z,s) log2(1 / q(z|s))`, an upper bound on `H(Z|S)`. `q` has one
/// row per `s`.
pub fn l_zgs(joint_zs: &JointDistribution, q: &TabularChannel) -> Result<f64> {
    q.require_shape(joint_zs.cols(), joint_zs.rows())?;
    Ok(-joint_zs.iter().map(|(z, s, p)| xlog2(p, q.q(s, z))).sum::<f64>())
}

/// `sum p(z,s') log2 q(s'|z)`, a lower bound on `I(Z;S')`. `q` has one row
/// per `z`.
pub fn l_sgz(joint_zs_next: &JointDistribution, q: &TabularChannel) -> Result<f64> {
    q.require_shape(joint_zs_next.rows(), joint_zs_next.cols())?;
    Ok(joint_zs_next.iter().map(|(z, s, p)| xlog2(p, q.q(z, s))).sum())
}

/// `I^SI(X;Y) <= I(X;Y) + H(X|Y) + H(Y)` within `1e-9`.
pub fn smi_upper_decomposition_check(joint: &JointDistribution) -> Result<bool> {
    let smi = smi_closed_form(joint)?;
    let s = shannon(joint);
    Ok(smi <= s.mutual_information + s.h_x_given_y + s.h_y + CHECK_TOLERANCE)
}

/// The three losses and their weighted sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBundle {
    pub l_up: f64,
    pub l_zgs: f64,
    pub l_sgz: f64,
    pub eta: f64,
    pub combined: f64,
}

/// `l_up + l_zgs + eta * l_sgz`.
pub fn combined_loss(l_up: f64, l_zgs: f64, l_sgz: f64, eta: f64) -> Result<LossBundle> {
    if !(eta >= 0.0) {
        return Err(Error::NegativeCoefficient(eta));
    }
    Ok(LossBundle { l_up, l_zgs, l_sgz, eta, combined: l_up + l_zgs + eta * l_sgz })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn joint() -> JointDistribution {
        JointDistribution::new(vec![vec![0.1, 0.2, 0.05], vec![0.3, 0.15, 0.2]]).unwrap()
    }

    #[test]
    fn tight_at_true_decoders() {
        let j = joint();
        let s = shannon(&j);
        let up = l_up(&j, &TabularChannel::marginal_of(&j, Axis::X).unwrap()).unwrap();
        assert!((up - s.mutual_information).abs() < 1e-12);

        let zgs = l_zgs(&j, &TabularChannel::conditional_of(&j, Axis::Y).unwrap()).unwrap();
        assert!((zgs - (s.h_xy - s.h_y)).abs() < 1e-12);

        let sgz = l_sgz(&j, &TabularChannel::conditional_of(&j, Axis::X).unwrap()).unwrap();
        assert!((sgz - (s.mutual_information - s.h_y)).abs() < 1e-12);
    }

    #[test]
    fn independent_joint_has_zero_l_up() {
        let j = JointDistribution::new(vec![vec![0.12, 0.28], vec![0.18, 0.42]]).unwrap();
        let up = l_up(&j, &TabularChannel::marginal_of(&j, Axis::X).unwrap()).unwrap();
        assert!(up.abs() < 1e-12);
    }

    #[test]
    fn deterministic_encoder_with_soft_decoder() {
        // Z = S over two symbols
        let j = JointDistribution::new_nonnegative(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let q = TabularChannel::new(vec![vec![0.999, 0.001], vec![0.001, 0.999]]).unwrap();
        let zgs = l_zgs(&j, &q).unwrap();
        assert!((zgs - (-(0.999f64).log2())).abs() < 1e-12);
        assert!((zgs - 0.0014).abs() < 1e-4);
    }

    #[test]
    fn constant_next_state() {
        let j = JointDistribution::new(vec![vec![0.4], vec![0.6]]).unwrap();
        let q = TabularChannel::new(vec![vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(l_sgz(&j, &q).unwrap(), 0.0);
    }

    #[test]
    fn shape_checks() {
        let j = joint();
        let wrong = TabularChannel::marginal(vec![0.5, 0.25, 0.25]).unwrap();
        assert!(matches!(l_up(&j, &wrong), Err(Error::AlphabetMismatch { .. })));
        let wrong = TabularChannel::new(vec![vec![0.5, 0.5]; 2]).unwrap();
        assert!(l_zgs(&j, &wrong).is_err());
        assert!(TabularChannel::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(TabularChannel::new(vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn combined_examples() {
        assert_eq!(combined_loss(0.0, 0.0, 0.0, 1.0).unwrap().combined, 0.0);
        let b = combined_loss(0.4, 0.3, -0.2, 0.5).unwrap();
        assert!((b.combined - 0.6).abs() < 1e-12);
        assert_eq!(combined_loss(0.4, 0.3, -7.0, 0.0).unwrap().combined, 0.4 + 0.3);
        assert!(matches!(combined_loss(0.0, 0.0, 0.0, -0.1), Err(Error::NegativeCoefficient(_))));
    }

    #[test]
    fn decomposition_examples() {
        let u = JointDistribution::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert!(smi_upper_decomposition_check(&u).unwrap());
        let d = JointDistribution::new(vec![vec![0.499, 0.001], vec![0.001, 0.499]]).unwrap();
        assert!(smi_upper_decomposition_check(&d).unwrap());
    }

    #[test]
    fn smoothed_counts() {
        let q = TabularChannel::from_counts(&[vec![3.0, 0.0], vec![0.0, 0.0]], 1.0).unwrap();
        assert!((q.q(0, 0) - 0.8).abs() < 1e-15);
        assert!((q.q(1, 1) - 0.5).abs() < 1e-15);
    }
}
