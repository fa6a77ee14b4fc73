//! Tabular softmax actor-critic trained on extrinsic plus intrinsic reward.
//!
//! Randomness is split into independent streams (action sampling, the
//! environment, batch sampling for intrinsic rewards) so that turning the
//! intrinsic path off leaves the action and environment streams untouched.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use si2e_core::explore::{
    build_hierarchy, combine_reward, intrinsic_reward_at, CentroidRule, CommunityAssignment, TransitionBatch,
    TransitionRecord,
};
use si2e_core::ValueKernel;

use crate::diagnostics::{LossRecord, LossTracker};
use crate::env::Mdp;
use crate::{Error, Result};

const ACT_STREAM: u64 = 0;
const ENV_STREAM: u64 = 1;
const BATCH_STREAM: u64 = 2;
const UPDATE_STREAM: u64 = 3;

/// Intrinsic reward source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Extrinsic reward only.
    None,
    /// k-NN entropy of all batch embeddings, no communities.
    ShannonEntropy,
    /// Value-conditional structural entropy.
    Si2e,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::None, Method::ShannonEntropy, Method::Si2e];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::ShannonEntropy => "shannon-entropy",
            Method::Si2e => "si2e",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

/// Scalar attached to each record for the value graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolicyValue {
    /// `pi(a | s)` under the current policy.
    #[default]
    Probability,
    /// One-step estimate `r_e + gamma * V(s')` (no bootstrap past a terminal).
    ActionValue,
}

impl FromStr for PolicyValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probability" => Ok(Self::Probability),
            "action-value" => Ok(Self::ActionValue),
            _ => Err(Error::InvalidConfig(format!("unknown policy value {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub method: Method,
    pub beta: f64,
    pub k: usize,
    pub gamma: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Steps between policy updates.
    pub update_interval: usize,
    /// Records per intrinsic-reward batch, including the current one.
    pub batch_size: usize,
    /// Transitions replayed from the buffer at each update, after the most
    /// recent window.
    pub replay_size: usize,
    pub buffer_capacity: usize,
    pub total_steps: usize,
    pub seed: u64,
    pub eta: f64,
    pub policy_value: PolicyValue,
    pub value_kernel: ValueKernel,
    pub centroid_rule: CentroidRule,
    pub diagnostics: bool,
    pub record_trajectories: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            method: Method::Si2e,
            beta: 0.005,
            k: 5,
            gamma: 0.99,
            actor_lr: 0.1,
            critic_lr: 0.1,
            update_interval: 16,
            batch_size: 64,
            replay_size: 64,
            buffer_capacity: 10_000,
            total_steps: 20_000,
            seed: 0,
            eta: 1.0,
            policy_value: PolicyValue::Probability,
            value_kernel: ValueKernel::Complement,
            centroid_rule: CentroidRule::Mean,
            diagnostics: false,
            record_trajectories: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return fail("beta must be a non-negative number");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return fail("gamma must lie in [0, 1]");
        }
        if !(self.actor_lr > 0.0) || !(self.critic_lr > 0.0) {
            return fail("learning rates must be positive");
        }
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        if self.batch_size <= self.k {
            return fail("batch_size must exceed k");
        }
        if self.update_interval == 0 {
            return fail("update_interval must be at least 1");
        }
        if self.buffer_capacity < self.batch_size.max(self.update_interval) {
            return fail("buffer_capacity must hold a batch and an update window");
        }
        if self.total_steps == 0 {
            return fail("total_steps must be positive");
        }
        if !(self.eta >= 0.0) {
            return fail("eta must be non-negative");
        }
        Ok(())
    }
}

/// A stored transition with its reward frozen at insertion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub next_state: usize,
    pub reward_ext: f64,
    pub reward_int: f64,
    /// `reward_ext + beta * reward_int`.
    pub reward: f64,
    pub terminal: bool,
}

/// Softmax policy logits and state values.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    actions: usize,
    logits: Vec<f64>,
    values: Vec<f64>,
    actor_lr: f64,
    critic_lr: f64,
    gamma: f64,
}

impl PolicyTable {
    pub fn new(states: usize, actions: usize, actor_lr: f64, critic_lr: f64, gamma: f64) -> Self {
        Self {
            actions,
            logits: vec![0.0; states * actions],
            values: vec![0.0; states],
            actor_lr,
            critic_lr,
            gamma,
        }
    }

    pub fn state_count(&self) -> usize {
        self.values.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    pub fn logits(&self, state: usize) -> &[f64] {
        &self.logits[state * self.actions..(state + 1) * self.actions]
    }

    pub fn set_logits(&mut self, state: usize, logits: &[f64]) {
        self.logits[state * self.actions..(state + 1) * self.actions].copy_from_slice(logits);
    }

    pub fn value(&self, state: usize) -> f64 {
        self.values[state]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `pi(. | state)`.
    pub fn probs(&self, state: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.actions];
        self.probs_into(state, &mut out);
        out
    }

    fn probs_into(&self, state: usize, out: &mut [f64]) {
        let row = self.logits(state);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (o, &l) in out.iter_mut().zip(row) {
            *o = (l - max).exp();
            total += *o;
        }
        out.iter_mut().for_each(|o| *o /= total);
    }

    pub fn prob(&self, state: usize, action: usize) -> f64 {
        let row = self.logits(state);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = row.iter().map(|&l| (l - max).exp()).sum();
        (row[action] - max).exp() / total
    }

    /// Samples an action from `pi(. | state)`.
    pub fn act<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let mut probs = [0.0; 16];
        let mut heap;
        let probs: &mut [f64] = if self.actions <= probs.len() {
            &mut probs[..self.actions]
        } else {
            heap = vec![0.0; self.actions];
            &mut heap
        };
        self.probs_into(state, probs);
        let mut u: f64 = rng.gen();
        for (a, &p) in probs.iter().enumerate() {
            u -= p;
            if u < 0.0 {
                return a;
            }
        }
        self.actions - 1
    }

    /// `r + gamma * V(s') * (1 - terminal) - V(s)`.
    pub fn td_error(&self, t: &Transition) -> f64 {
        let bootstrap = if t.terminal { 0.0 } else { self.gamma * self.values[t.next_state] };
        t.reward + bootstrap - self.values[t.state]
    }

    /// One actor-critic step per transition, in the given order.
    pub fn update(&mut self, batch: &[Transition]) -> Result<()> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let mut probs = vec![0.0; self.actions];
        for t in batch {
            let delta = self.td_error(t);
            self.values[t.state] += self.critic_lr * delta;
            self.probs_into(t.state, &mut probs);
            let step = self.actor_lr * delta;
            let row = &mut self.logits[t.state * self.actions..(t.state + 1) * self.actions];
            for (a, (l, &p)) in row.iter_mut().zip(&probs).enumerate() {
                *l += if a == t.action { step * (1.0 - p) } else { -step * p };
            }
        }
        Ok(())
    }
}

/// Fixed-capacity ring buffer of transitions.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, items: Vec::with_capacity(capacity.min(1 << 16)), next: 0 }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    /// `n` distinct transitions chosen uniformly; `None` if fewer are stored.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Option<Vec<Transition>> {
        if n > self.items.len() {
            return None;
        }
        Some(index::sample(rng, self.items.len(), n).into_iter().map(|i| self.items[i]).collect())
    }

    /// The last `n` transitions, oldest first.
    pub fn recent(&self, n: usize) -> Vec<Transition> {
        let n = n.min(self.items.len());
        let len = self.items.len();
        let end = if len < self.capacity { len } else { self.next + self.capacity };
        (end - n..end).map(|i| self.items[i % len]).collect()
    }
}

/// Embedding of a state-action pair: state features followed by a one-hot
/// action.
pub fn embedding(mdp: &Mdp, state: usize, action: usize) -> Vec<f64> {
    let mut e = mdp.features(state).to_vec();
    e.extend((0..mdp.action_count()).map(|a| if a == action { 1.0 } else { 0.0 }));
    e
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    /// Sum of extrinsic rewards.
    pub ret: f64,
    pub success: bool,
    pub steps: usize,
    /// Mean intrinsic reward over the episode's steps.
    pub intrinsic_mean: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    pub episodes: Vec<EpisodeRecord>,
    /// `(state, action)` per step of each completed episode, when recorded.
    pub trajectories: Vec<Vec<(usize, usize)>>,
    pub losses: Vec<LossRecord>,
}

impl EpisodeLog {
    pub const CSV_HEADER: &'static str = "episode,return,success,steps,intrinsic_mean";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (i, e) in self.episodes.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i,
                e.ret,
                u8::from(e.success),
                e.steps,
                e.intrinsic_mean
            ));
        }
        out
    }

    /// Fraction of steps in the last `last` episodes spent on `pairs`.
    pub fn visitation_frequency(&self, pairs: &[(usize, usize)], last: usize) -> f64 {
        let start = self.trajectories.len().saturating_sub(last);
        let (mut hits, mut total) = (0usize, 0usize);
        for traj in &self.trajectories[start..] {
            total += traj.len();
            hits += traj.iter().filter(|sa| pairs.contains(sa)).count();
        }
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

struct IntrinsicContext<'a> {
    mdp: &'a Mdp,
    config: &'a TrainConfig,
    rng: ChaCha8Rng,
}

impl IntrinsicContext<'_> {
    fn record(&self, policy: &PolicyTable, t: &Transition) -> TransitionRecord {
        let value = match self.config.policy_value {
            PolicyValue::Probability => policy.prob(t.state, t.action),
            PolicyValue::ActionValue => {
                let bootstrap = if t.terminal { 0.0 } else { self.config.gamma * policy.value(t.next_state) };
                t.reward_ext + bootstrap
            }
        };
        TransitionRecord {
            state: t.state,
            action: t.action,
            next_state: t.next_state,
            reward: t.reward_ext,
            embedding: embedding(self.mdp, t.state, t.action),
            value,
        }
    }

    /// Intrinsic reward of `current` against a batch drawn from `buffer`;
    /// zero until the buffer holds enough records for `k` neighbours.
    fn reward(&mut self, policy: &PolicyTable, buffer: &ReplayBuffer, current: &Transition) -> Result<f64> {
        let others = (self.config.batch_size - 1).min(buffer.len());
        if others < self.config.k {
            return Ok(0.0);
        }
        let sampled = buffer.sample(others, &mut self.rng).expect("enough stored transitions");
        let mut records = Vec::with_capacity(others + 1);
        records.push(self.record(policy, current));
        records.extend(sampled.iter().map(|t| self.record(policy, t)));
        let batch = TransitionBatch::new(records)?;
        let assignment = match self.config.method {
            Method::Si2e => build_hierarchy(&batch, self.config.value_kernel, self.config.centroid_rule)?,
            _ => CommunityAssignment::from_groups(&batch, &[(0..batch.len()).collect()], self.config.centroid_rule)?,
        };
        Ok(intrinsic_reward_at(&batch, &assignment, self.config.k, 0)?)
    }
}

/// Runs the full collection / intrinsic reward / update loop for
/// `config.total_steps` environment steps. Every `update_interval` steps the
/// policy is updated on the latest window (newest first) followed by
/// `replay_size` transitions sampled from the buffer.
pub fn train(mdp: &Mdp, config: &TrainConfig) -> Result<EpisodeLog> {
    config.validate()?;
    let mut act_rng = stream(config.seed, ACT_STREAM);
    let mut env_rng = stream(config.seed, ENV_STREAM);
    let mut update_rng = stream(config.seed, UPDATE_STREAM);
    let intrinsic_on = config.method != Method::None && config.beta > 0.0;
    let mut intrinsic = IntrinsicContext { mdp, config, rng: stream(config.seed, BATCH_STREAM) };

    let mut policy = PolicyTable::new(
        mdp.state_count(),
        mdp.action_count(),
        config.actor_lr,
        config.critic_lr,
        config.gamma,
    );
    let mut buffer = ReplayBuffer::new(config.buffer_capacity);
    let mut tracker = config.diagnostics.then(|| LossTracker::new(config.eta));
    let mut log = EpisodeLog::default();

    let mut state = mdp.reset();
    let (mut ep_return, mut ep_steps, mut ep_intrinsic) = (0.0, 0usize, 0.0);
    let mut trajectory = Vec::new();

    for t in 1..=config.total_steps {
        let action = policy.act(state, &mut act_rng);
        let step = mdp.step(state, action, &mut env_rng)?;
        let mut transition = Transition {
            state,
            action,
            next_state: step.next,
            reward_ext: step.reward,
            reward_int: 0.0,
            reward: step.reward,
            terminal: step.terminal,
        };
        if intrinsic_on {
            transition.reward_int = intrinsic.reward(&policy, &buffer, &transition)?;
            transition.reward = combine_reward(step.reward, transition.reward_int, config.beta)?;
        }
        buffer.push(transition);

        ep_return += step.reward;
        ep_intrinsic += transition.reward_int;
        ep_steps += 1;
        if config.record_trajectories {
            trajectory.push((state, action));
        }

        if t % config.update_interval == 0 {
            let mut window = buffer.recent(config.update_interval);
            if let Some(tracker) = tracker.as_mut() {
                log.losses.push(tracker.observe(t, mdp.action_count(), &window)?);
            }
            // newest first so a reward reaches earlier states within one pass
            window.reverse();
            let replay = config.replay_size.min(buffer.len());
            window.extend(buffer.sample(replay, &mut update_rng).expect("replay size within buffer"));
            policy.update(&window)?;
        }

        if step.terminal || ep_steps >= mdp.step_cap() {
            log.episodes.push(EpisodeRecord {
                ret: ep_return,
                success: step.terminal,
                steps: ep_steps,
                intrinsic_mean: ep_intrinsic / ep_steps as f64,
            });
            if config.record_trajectories {
                log.trajectories.push(std::mem::take(&mut trajectory));
            }
            state = mdp.reset();
            ep_return = 0.0;
            ep_steps = 0;
            ep_intrinsic = 0.0;
        } else {
            state = step.next;
        }
    }
    Ok(log)
}
