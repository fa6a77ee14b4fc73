//! Representation-loss diagnostics for the fixed state-action code.
//!
//! The code of a transition is `z = s * |A| + a`. At each update window the
//! empirical joints of `(z, s)` and `(z, s')` over the window are scored
//! against Laplace-smoothed decoders fitted to all earlier windows, then the
//! window is folded into the decoders. Nothing is trained from these
//! numbers; they are logged.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use si2e_core::bounds::{combined_loss, l_sgz, l_up, l_zgs, LossBundle, TabularChannel};
use si2e_core::JointDistribution;

use crate::agent::Transition;
use crate::Result;

const SMOOTHING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    /// Environment step at which the window closed.
    pub step: usize,
    pub losses: LossBundle,
}

#[derive(Debug, Clone)]
pub struct LossTracker {
    eta: f64,
    z_counts: HashMap<usize, f64>,
    zs_counts: HashMap<(usize, usize), f64>,
    znext_counts: HashMap<(usize, usize), f64>,
}

fn relabel(values: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    values
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect()
}

fn joint(pairs: &[(usize, usize)], rows: &BTreeMap<usize, usize>, cols: &BTreeMap<usize, usize>) -> Result<JointDistribution> {
    let mut table = vec![vec![0.0; cols.len()]; rows.len()];
    for (r, c) in pairs {
        table[rows[r]][cols[c]] += 1.0;
    }
    Ok(JointDistribution::from_weights(table)?)
}

impl LossTracker {
    pub fn new(eta: f64) -> Self {
        Self { eta, z_counts: HashMap::new(), zs_counts: HashMap::new(), znext_counts: HashMap::new() }
    }

    /// Scores `window` against the current decoders, then absorbs it.
    pub fn observe(&mut self, step: usize, actions: usize, window: &[Transition]) -> Result<LossRecord> {
        let zs: Vec<(usize, usize)> = window.iter().map(|t| (t.state * actions + t.action, t.state)).collect();
        let znext: Vec<(usize, usize)> =
            window.iter().map(|t| (t.state * actions + t.action, t.next_state)).collect();
        let z_ids = relabel(zs.iter().map(|p| p.0));
        let s_ids = relabel(zs.iter().map(|p| p.1));
        let next_ids = relabel(znext.iter().map(|p| p.1));

        let count = |map: &HashMap<(usize, usize), f64>, key| map.get(&key).copied().unwrap_or(0.0);
        let marginal: Vec<f64> = z_ids.keys().map(|z| self.z_counts.get(z).copied().unwrap_or(0.0)).collect();
        let q_m = TabularChannel::from_counts(&[marginal], SMOOTHING)?;
        let z_given_s: Vec<Vec<f64>> = s_ids
            .keys()
            .map(|&s| z_ids.keys().map(|&z| count(&self.zs_counts, (z, s))).collect())
            .collect();
        let q_zgs = TabularChannel::from_counts(&z_given_s, SMOOTHING)?;
        let next_given_z: Vec<Vec<f64>> = z_ids
            .keys()
            .map(|&z| next_ids.keys().map(|&n| count(&self.znext_counts, (z, n))).collect())
            .collect();
        let q_sgz = TabularChannel::from_counts(&next_given_z, SMOOTHING)?;

        let joint_zs = joint(&zs, &z_ids, &s_ids)?;
        let joint_znext = joint(&znext, &z_ids, &next_ids)?;
        let losses = combined_loss(
            l_up(&joint_zs, &q_m)?,
            l_zgs(&joint_zs, &q_zgs)?,
            l_sgz(&joint_znext, &q_sgz)?,
            self.eta,
        )?;

        for &(z, s) in &zs {
            *self.z_counts.entry(z).or_default() += 1.0;
            *self.zs_counts.entry((z, s)).or_default() += 1.0;
        }
        for &key in &znext {
            *self.znext_counts.entry(key).or_default() += 1.0;
        }
        Ok(LossRecord { step, losses })
    }
}
