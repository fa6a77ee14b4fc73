//! Per-method aggregation over seeds.
//!
//! A seed that never reaches the success threshold ranks after every seed
//! that does. Medians and quartiles that land on such a seed are reported
//! as `null`.

use serde::{Deserialize, Serialize};

/// Number of episodes completed when the success rate over the trailing
/// `window` episodes first reaches `threshold`.
pub fn episodes_to_threshold(successes: &[bool], window: usize, threshold: f64) -> Option<usize> {
    if window == 0 || successes.len() < window {
        return None;
    }
    let mut hits = successes[..window].iter().filter(|&&s| s).count();
    if hits as f64 / window as f64 >= threshold {
        return Some(window);
    }
    for end in window..successes.len() {
        hits += usize::from(successes[end]);
        hits -= usize::from(successes[end - window]);
        if hits as f64 / window as f64 >= threshold {
            return Some(end + 1);
        }
    }
    None
}

/// Success rate over the last `window` episodes (all of them if fewer).
pub fn final_success_rate(successes: &[bool], window: usize) -> f64 {
    let tail = &successes[successes.len().saturating_sub(window)..];
    if tail.is_empty() {
        return 0.0;
    }
    tail.iter().filter(|&&s| s).count() as f64 / tail.len() as f64
}

/// Linear-interpolation quantile of `values`, where `None` sorts last and
/// poisons any interpolation it takes part in.
pub fn quantile(values: &[Option<f64>], q: f64) -> Option<f64> {
    let mut sorted: Vec<f64> = values.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
    if sorted.is_empty() {
        return None;
    }
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, frac) = (pos.floor() as usize, pos - pos.floor());
    let value = if frac == 0.0 { sorted[lo] } else { sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]) };
    value.is_finite().then_some(value)
}

pub fn median(values: &[Option<f64>]) -> Option<f64> {
    quantile(values, 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub episodes: usize,
    pub episodes_to_threshold: Option<usize>,
    pub final_success_rate: f64,
    /// Share of steps on the watched pairs over the last `watch_last`
    /// episodes, when pairs are watched.
    pub watched_visitation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub seeds: Vec<SeedSummary>,
    pub median_episodes_to_threshold: Option<f64>,
    pub q1_episodes_to_threshold: Option<f64>,
    pub q3_episodes_to_threshold: Option<f64>,
    pub iqr_episodes_to_threshold: Option<f64>,
    pub mean_final_success_rate: f64,
    pub median_watched_visitation: Option<f64>,
}

impl MethodSummary {
    pub fn new(method: &str, seeds: Vec<SeedSummary>) -> Self {
        let thresholds: Vec<Option<f64>> =
            seeds.iter().map(|s| s.episodes_to_threshold.map(|e| e as f64)).collect();
        let (q1, q3) = (quantile(&thresholds, 0.25), quantile(&thresholds, 0.75));
        let watched: Vec<Option<f64>> = seeds.iter().map(|s| s.watched_visitation).collect();
        let median_watched = if watched.iter().all(Option::is_some) { median(&watched) } else { None };
        let mean_final = seeds.iter().map(|s| s.final_success_rate).sum::<f64>() / seeds.len().max(1) as f64;
        Self {
            method: method.to_string(),
            median_episodes_to_threshold: median(&thresholds),
            q1_episodes_to_threshold: q1,
            q3_episodes_to_threshold: q3,
            iqr_episodes_to_threshold: q1.zip(q3).map(|(a, b)| b - a),
            mean_final_success_rate: mean_final,
            median_watched_visitation: median_watched,
            seeds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub env: String,
    pub total_steps: usize,
    pub success_threshold: f64,
    pub success_window: usize,
    pub watch_pairs: Vec<(usize, usize)>,
    pub watch_last: usize,
    pub methods: Vec<MethodSummary>,
}

impl Summary {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == name)
    }
}
