//! Small fully observed MDPs: the six-state detour fixture and gridworlds
//! loaded from character maps.

use std::collections::VecDeque;
use std::path::Path;

use rand::Rng;

use crate::{Error, Result};

const PROB_TOLERANCE: f64 = 1e-12;

/// One possible result of taking an action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub next: usize,
    pub prob: f64,
    pub reward: f64,
    /// Entering `next` through this outcome ends the episode.
    pub terminal: bool,
}

/// Result of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub next: usize,
    pub reward: f64,
    pub terminal: bool,
}

/// Tabular MDP with per-state feature vectors used for embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    name: String,
    states: usize,
    actions: usize,
    initial: usize,
    step_cap: usize,
    outcomes: Vec<Vec<Outcome>>,
    features: Vec<Vec<f64>>,
}

impl Mdp {
    /// `outcomes[s * actions + a]` lists the results of `(s, a)`. Empty
    /// `features` means one-hot state features.
    pub fn new(
        name: impl Into<String>,
        states: usize,
        actions: usize,
        initial: usize,
        step_cap: usize,
        outcomes: Vec<Vec<Outcome>>,
        features: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMdp(msg));
        if states == 0 || actions == 0 {
            return bad("need at least one state and one action".into());
        }
        if initial >= states {
            return bad(format!("initial state {initial} out of range"));
        }
        if step_cap == 0 {
            return bad("step cap must be positive".into());
        }
        if outcomes.len() != states * actions {
            return bad(format!("expected {} outcome rows, got {}", states * actions, outcomes.len()));
        }
        for (idx, row) in outcomes.iter().enumerate() {
            let (s, a) = (idx / actions, idx % actions);
            if row.is_empty() {
                return bad(format!("no transition for state {s}, action {a}"));
            }
            let total: f64 = row.iter().map(|o| o.prob).sum();
            if (total - 1.0).abs() > PROB_TOLERANCE {
                return bad(format!("state {s}, action {a}: probabilities sum to {total}"));
            }
            for o in row {
                if o.next >= states || !(o.prob > 0.0) || !o.reward.is_finite() {
                    return bad(format!("state {s}, action {a}: invalid outcome {o:?}"));
                }
            }
        }
        let features = if features.is_empty() {
            (0..states)
                .map(|s| (0..states).map(|i| if i == s { 1.0 } else { 0.0 }).collect())
                .collect()
        } else {
            features
        };
        let dim = features[0].len();
        if features.len() != states || dim == 0 || features.iter().any(|f| f.len() != dim) {
            return bad("need one feature vector of equal length per state".into());
        }
        Ok(Self { name: name.into(), states, actions, initial, step_cap, outcomes, features })
    }

    /// Parses the text table format:
    ///
    /// ```text
    /// name <name>
    /// states <n>
    /// actions <m>
    /// initial <s>
    /// cap <steps>
    /// t <state> <action|*> <next> <prob> <reward> [end]
    /// f <state> <feature values...>
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = String::from("mdp");
        let (mut states, mut actions, mut initial, mut cap) = (None, None, 0usize, None);
        let mut rules: Vec<(usize, Option<usize>, Outcome)> = Vec::new();
        let mut feats: Vec<(usize, Vec<f64>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Map { line: lineno + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<usize> {
                toks.get(i)
                    .ok_or_else(|| err("missing field".into()))?
                    .parse::<usize>()
                    .map_err(|e| err(e.to_string()))
            };
            let real = |i: usize| -> Result<f64> {
                toks.get(i)
                    .ok_or_else(|| err("missing field".into()))?
                    .parse::<f64>()
                    .map_err(|e| err(e.to_string()))
            };
            match toks[0] {
                "name" => name = toks.get(1).map_or(name.clone(), |s| s.to_string()),
                "states" => states = Some(num(1)?),
                "actions" => actions = Some(num(1)?),
                "initial" => initial = num(1)?,
                "cap" => cap = Some(num(1)?),
                "t" => {
                    let action = if toks.get(2) == Some(&"*") { None } else { Some(num(2)?) };
                    let terminal = match toks.get(6) {
                        None => false,
                        Some(&"end") => true,
                        Some(other) => return Err(err(format!("unexpected {other:?}"))),
                    };
                    let outcome = Outcome { next: num(3)?, prob: real(4)?, reward: real(5)?, terminal };
                    rules.push((num(1)?, action, outcome));
                }
                "f" => {
                    let values = (2..toks.len()).map(real).collect::<Result<Vec<f64>>>()?;
                    feats.push((num(1)?, values));
                }
                other => return Err(err(format!("unknown directive {other:?}"))),
            }
        }
        let states = states.ok_or(Error::Map { line: 0, msg: "missing 'states'".into() })?;
        let actions = actions.ok_or(Error::Map { line: 0, msg: "missing 'actions'".into() })?;
        let cap = cap.ok_or(Error::Map { line: 0, msg: "missing 'cap'".into() })?;
        let mut outcomes = vec![Vec::new(); states * actions];
        for (s, a, o) in rules {
            if s >= states {
                return Err(Error::InvalidState { state: s, count: states });
            }
            match a {
                Some(a) if a >= actions => return Err(Error::InvalidAction { action: a, count: actions }),
                Some(a) => outcomes[s * actions + a].push(o),
                None => (0..actions).for_each(|a| outcomes[s * actions + a].push(o)),
            }
        }
        let features = if feats.is_empty() {
            Vec::new()
        } else {
            let mut table = vec![Vec::new(); states];
            for (s, f) in feats {
                if s >= states {
                    return Err(Error::InvalidState { state: s, count: states });
                }
                table[s] = f;
            }
            table
        };
        Self::new(name, states, actions, initial, cap, outcomes, features)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    pub fn step_cap(&self) -> usize {
        self.step_cap
    }

    pub fn features(&self, state: usize) -> &[f64] {
        &self.features[state]
    }

    pub fn feature_dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn outcomes(&self, state: usize, action: usize) -> &[Outcome] {
        &self.outcomes[state * self.actions + action]
    }

    pub fn reset(&self) -> usize {
        self.initial
    }

    /// Samples the result of `(state, action)`. Deterministic transitions do
    /// not consume randomness.
    pub fn step<R: Rng + ?Sized>(&self, state: usize, action: usize, rng: &mut R) -> Result<Step> {
        if state >= self.states {
            return Err(Error::InvalidState { state, count: self.states });
        }
        if action >= self.actions {
            return Err(Error::InvalidAction { action, count: self.actions });
        }
        let row = self.outcomes(state, action);
        let chosen = if row.len() == 1 {
            &row[0]
        } else {
            let mut u: f64 = rng.gen();
            row.iter()
                .find(|o| {
                    u -= o.prob;
                    u < 0.0
                })
                .unwrap_or(&row[row.len() - 1])
        };
        Ok(Step { next: chosen.next, reward: chosen.reward, terminal: chosen.terminal })
    }
}

/// The six-state detour fixture (see `fixtures/figure1.mdp`).
pub fn figure1_mdp() -> Mdp {
    Mdp::parse(include_str!("../fixtures/figure1.mdp")).expect("bundled fixture is valid")
}

pub const ACTION_NAMES: [&str; 4] = ["north", "east", "south", "west"];
const MOVES: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

/// A rectangular grid parsed from a character map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridworldSpec {
    pub width: usize,
    pub height: usize,
    pub walls: Vec<bool>,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    pub key: Option<(usize, usize)>,
    pub door: Option<(usize, usize)>,
}

impl GridworldSpec {
    /// `#` wall, `.` floor, `S` start, `G` goal, `K` key, `D` door.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        if rows.is_empty() {
            return Err(Error::Map { line: 0, msg: "empty map".into() });
        }
        let width = rows[0].1.chars().count();
        let height = rows.len();
        let mut walls = vec![false; width * height];
        let (mut start, mut goal, mut key, mut door) = (None, None, None, None);
        for (r, &(line, text)) in rows.iter().enumerate() {
            if text.chars().count() != width {
                return Err(Error::Map { line, msg: format!("expected {width} columns") });
            }
            for (c, ch) in text.chars().enumerate() {
                let slot = match ch {
                    '#' => {
                        walls[r * width + c] = true;
                        continue;
                    }
                    '.' => continue,
                    'S' => &mut start,
                    'G' => &mut goal,
                    'K' => &mut key,
                    'D' => &mut door,
                    other => return Err(Error::Map { line, msg: format!("unknown cell {other:?}") }),
                };
                if slot.replace((r, c)).is_some() {
                    return Err(Error::Map { line, msg: format!("more than one {ch:?}") });
                }
            }
        }
        let start = start.ok_or(Error::Map { line: 0, msg: "no start cell".into() })?;
        let goal = goal.ok_or(Error::Map { line: 0, msg: "no goal cell".into() })?;
        if key.is_some() != door.is_some() {
            return Err(Error::Map { line: 0, msg: "key and door must appear together".into() });
        }
        Ok(Self { width, height, walls, start, goal, key, door })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Map { line: 0, msg: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    fn has_key(&self) -> bool {
        self.key.is_some()
    }

    fn cell(&self, (r, c): (usize, usize)) -> usize {
        r * self.width + c
    }

    /// State index of `cell` with the given key flag.
    pub fn state(&self, cell: (usize, usize), holding_key: bool) -> usize {
        let base = self.cell(cell);
        if holding_key {
            base + self.width * self.height
        } else {
            base
        }
    }

    /// Cell and key flag of a state index.
    pub fn decode(&self, state: usize) -> ((usize, usize), bool) {
        let cells = self.width * self.height;
        let (cell, key) = (state % cells, state >= cells);
        ((cell / self.width, cell % self.width), key)
    }

    fn blocked(&self, cell: (usize, usize), holding_key: bool) -> bool {
        self.walls[self.cell(cell)] || (self.door == Some(cell) && !holding_key)
    }

    fn move_from(&self, cell: (usize, usize), holding_key: bool, action: usize) -> ((usize, usize), bool) {
        let (dr, dc) = MOVES[action];
        let (r, c) = (cell.0 as isize + dr, cell.1 as isize + dc);
        if r < 0 || c < 0 || r >= self.height as isize || c >= self.width as isize {
            return (cell, holding_key);
        }
        let next = (r as usize, c as usize);
        if self.blocked(next, holding_key) {
            return (cell, holding_key);
        }
        (next, holding_key || self.key == Some(next))
    }

    /// Shortest number of moves from start to goal, if reachable.
    pub fn shortest_path(&self) -> Option<usize> {
        let states = self.width * self.height * if self.has_key() { 2 } else { 1 };
        let mut dist = vec![usize::MAX; states];
        let start = self.state(self.start, false);
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            let (cell, key) = self.decode(s);
            if cell == self.goal {
                return Some(dist[s]);
            }
            for a in 0..4 {
                let (nc, nk) = self.move_from(cell, key, a);
                let ns = self.state(nc, nk);
                if dist[ns] == usize::MAX {
                    dist[ns] = dist[s] + 1;
                    queue.push_back(ns);
                }
            }
        }
        None
    }
}

/// Deterministic four-action gridworld. Reaching the goal pays 1 and ends
/// the episode; the step cap is four times the cell count. State features
/// are the normalised row and column, plus the key flag when the map has a
/// key.
pub fn gridworld(spec: &GridworldSpec) -> Result<Mdp> {
    if spec.walls[spec.cell(spec.start)] {
        return Err(Error::Map { line: 0, msg: "start cell is a wall".into() });
    }
    if spec.shortest_path().is_none() {
        return Err(Error::UnreachableGoal);
    }
    let cells = spec.width * spec.height;
    let layers = if spec.has_key() { 2 } else { 1 };
    let states = cells * layers;
    let mut outcomes = Vec::with_capacity(states * 4);
    let mut features = Vec::with_capacity(states);
    let norm = |x: usize, n: usize| if n > 1 { x as f64 / (n - 1) as f64 } else { 0.0 };
    for s in 0..states {
        let (cell, key) = spec.decode(s);
        let mut f = vec![norm(cell.0, spec.height), norm(cell.1, spec.width)];
        if spec.has_key() {
            f.push(if key { 1.0 } else { 0.0 });
        }
        features.push(f);
        for a in 0..4 {
            let (nc, nk) = spec.move_from(cell, key, a);
            let at_goal = nc == spec.goal;
            outcomes.push(vec![Outcome {
                next: spec.state(nc, nk),
                prob: 1.0,
                reward: if at_goal { 1.0 } else { 0.0 },
                terminal: at_goal,
            }]);
        }
    }
    Mdp::new("gridworld", states, 4, spec.state(spec.start, false), 4 * cells, outcomes, features)
}

/// Bundled maps: `empty5`, `four_rooms`, `doorkey`.
pub fn builtin_map(name: &str) -> Option<&'static str> {
    match name {
        "empty5" => Some(include_str!("../maps/empty5.txt")),
        "four_rooms" => Some(include_str!("../maps/four_rooms.txt")),
        "doorkey" => Some(include_str!("../maps/doorkey.txt")),
        _ => None,
    }
}

/// Resolves an environment name: `figure1`, a bundled map name, or a path
/// to a map file.
pub fn load_env(name: &str) -> Result<Mdp> {
    if name == "figure1" {
        return Ok(figure1_mdp());
    }
    let spec = match builtin_map(name) {
        Some(text) => GridworldSpec::parse(text)?,
        None => GridworldSpec::from_file(name)?,
    };
    let mut mdp = gridworld(&spec)?;
    mdp.name = name.to_string();
    Ok(mdp)
}
