//! Experiment configuration: plain `key = value` lines, `#` comments.
//!
//! | key | value |
//! |-----|-------|
//! | `env` | `figure1`, a bundled map (`empty5`, `four_rooms`, `doorkey`) or a map file path, relative to the config file |
//! | `method` | one or more of `none`, `shannon-entropy`, `si2e`, comma separated |
//! | `seeds` | inclusive range `0..9` or a comma list |
//! | `out` | output directory, relative to the working directory |
//! | `beta`, `k`, `gamma`, `actor_lr`, `critic_lr`, `eta` | agent hyperparameters |
//! | `update_interval`, `batch_size`, `replay_size`, `buffer_capacity`, `total_steps` | loop sizes |
//! | `policy_value` | `probability` or `action-value` |
//! | `value_kernel` | `complement` or `difference` |
//! | `centroid_rule` | `mean`, `medoid` or `value-weighted` |
//! | `success_threshold`, `success_window` | episodes-to-threshold criterion (trailing window success rate) |
//! | `watch_pairs`, `watch_last` | `(state:action)` pairs whose visitation share over the last episodes is summarised, e.g. `2:3, 5:3` |
//! | `plot`, `diagnostics` | `true` / `false` |
//! | `jobs` | worker threads (default: available parallelism) |

use std::path::{Path, PathBuf};

use si2e_core::explore::CentroidRule;
use si2e_core::ValueKernel;
use si2e_rl::{Method, TrainConfig};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: String,
    /// Directory relative map paths resolve against.
    pub base_dir: PathBuf,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    /// Hyperparameters shared by every run; `method` and `seed` are
    /// overwritten per run.
    pub train: TrainConfig,
    pub success_threshold: f64,
    pub success_window: usize,
    pub watch_pairs: Vec<(usize, usize)>,
    pub watch_last: usize,
    pub plot: bool,
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: String::new(),
            base_dir: PathBuf::from("."),
            methods: vec![Method::Si2e],
            seeds: (0..10).collect(),
            out: PathBuf::from("results"),
            train: TrainConfig::default(),
            success_threshold: 0.9,
            success_window: 20,
            watch_pairs: Vec::new(),
            watch_last: 100,
            plot: true,
            jobs: None,
        }
    }
}

fn value_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Value { key: key.to_string(), msg: msg.into() }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| value_err(key, format!("{value:?}: {e}")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(value_err(key, format!("expected true or false, got {value:?}"))),
    }
}

/// `0..9` (inclusive) or `0, 3, 7`.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let seeds = if let Some((lo, hi)) = value.split_once("..") {
        let (lo, hi): (u64, u64) = (num("seeds", lo.trim())?, num("seeds", hi.trim())?);
        if lo > hi {
            return Err(value_err("seeds", format!("empty range {value:?}")));
        }
        (lo..=hi).collect()
    } else {
        value
            .split(',')
            .map(|s| num("seeds", s.trim()))
            .collect::<Result<Vec<u64>>>()?
    };
    if seeds.is_empty() {
        return Err(value_err("seeds", "no seeds given"));
    }
    Ok(seeds)
}

pub fn parse_methods(value: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for name in value.split(',').map(str::trim) {
        let m: Method = name.parse().map_err(|e: si2e_rl::Error| value_err("method", e.to_string()))?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    Ok(methods)
}

fn parse_pairs(value: &str) -> Result<Vec<(usize, usize)>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (s, a) = pair
                .split_once(':')
                .ok_or_else(|| value_err("watch_pairs", format!("expected state:action, got {pair:?}")))?;
            Ok((num("watch_pairs", s.trim())?, num("watch_pairs", a.trim())?))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut config = Self { base_dir: base_dir.into(), ..Self::default() };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config { line: i + 1, msg: format!("expected `key = value`, got {line:?}") })?;
            config.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Value { key, msg } => Error::Config { line: i + 1, msg: format!("`{key}`: {msg}") },
                other => other,
            })?;
        }
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.train;
        match key {
            "env" => self.env = value.to_string(),
            "method" | "methods" => self.methods = parse_methods(value)?,
            "seeds" => self.seeds = parse_seeds(value)?,
            "out" => self.out = PathBuf::from(value),
            "beta" => t.beta = num(key, value)?,
            "k" => t.k = num(key, value)?,
            "gamma" => t.gamma = num(key, value)?,
            "actor_lr" => t.actor_lr = num(key, value)?,
            "critic_lr" => t.critic_lr = num(key, value)?,
            "eta" => t.eta = num(key, value)?,
            "update_interval" => t.update_interval = num(key, value)?,
            "batch_size" => t.batch_size = num(key, value)?,
            "replay_size" => t.replay_size = num(key, value)?,
            "buffer_capacity" => t.buffer_capacity = num(key, value)?,
            "total_steps" => t.total_steps = num(key, value)?,
            "policy_value" => t.policy_value = value.parse().map_err(|e: si2e_rl::Error| value_err(key, e.to_string()))?,
            "value_kernel" => {
                t.value_kernel = match value {
                    "complement" => ValueKernel::Complement,
                    "difference" => ValueKernel::Difference,
                    _ => return Err(value_err(key, format!("unknown kernel {value:?}"))),
                }
            }
            "centroid_rule" => {
                t.centroid_rule = match value {
                    "mean" => CentroidRule::Mean,
                    "medoid" => CentroidRule::Medoid,
                    "value-weighted" => CentroidRule::ValueWeighted,
                    _ => return Err(value_err(key, format!("unknown centroid rule {value:?}"))),
                }
            }
            "diagnostics" => t.diagnostics = boolean(key, value)?,
            "success_threshold" => self.success_threshold = num(key, value)?,
            "success_window" => self.success_window = num(key, value)?,
            "watch_pairs" => self.watch_pairs = parse_pairs(value)?,
            "watch_last" => self.watch_last = num(key, value)?,
            "plot" => self.plot = boolean(key, value)?,
            "jobs" => self.jobs = Some(num(key, value)?),
            _ => return Err(value_err(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key=value` override from the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| value_err(assignment, "expected KEY=VALUE"))?;
        self.set(key.trim(), value.trim())
    }

    pub fn validate(&self) -> Result<()> {
        if self.env.is_empty() {
            return Err(value_err("env", "no environment given"));
        }
        if self.seeds.is_empty() {
            return Err(value_err("seeds", "no seeds given"));
        }
        if self.methods.is_empty() {
            return Err(value_err("method", "no method given"));
        }
        if !(self.success_threshold > 0.0 && self.success_threshold <= 1.0) {
            return Err(value_err("success_threshold", "must lie in (0, 1]"));
        }
        if self.success_window == 0 {
            return Err(value_err("success_window", "must be at least 1"));
        }
        if self.jobs == Some(0) {
            return Err(value_err("jobs", "must be at least 1"));
        }
        for &method in &self.methods {
            TrainConfig { method, ..self.train.clone() }.validate()?;
        }
        Ok(())
    }

    /// The environment argument for [`si2e_rl::load_env`]: names pass
    /// through, relative paths are joined onto the config directory.
    pub fn env_location(&self) -> String {
        if self.env == "figure1" || si2e_rl::env::builtin_map(&self.env).is_some() {
            return self.env.clone();
        }
        let path = Path::new(&self.env);
        if path.is_absolute() {
            self.env.clone()
        } else {
            self.base_dir.join(path).to_string_lossy().into_owned()
        }
    }

    /// Per-run training config.
    pub fn train_config(&self, method: Method, seed: u64) -> TrainConfig {
        TrainConfig { method, seed, record_trajectories: !self.watch_pairs.is_empty(), ..self.train.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let text = "env = four_rooms  # bundled\nmethod = none, si2e\nseeds = 2..4\nbeta = 0.01\n\nplot = false\n";
        let c = ExperimentConfig::parse(text, "/tmp").unwrap();
        assert_eq!(c.env, "four_rooms");
        assert_eq!(c.methods, vec![Method::None, Method::Si2e]);
        assert_eq!(c.seeds, vec![2, 3, 4]);
        assert_eq!(c.train.beta, 0.01);
        assert!(!c.plot);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn reports_line_numbers() {
        let err = ExperimentConfig::parse("env = figure1\nbeta = lots\n", ".").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err}");
        let err = ExperimentConfig::parse("colour = blue\n", ".").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }));
        assert!(ExperimentConfig::parse("just words\n", ".").is_err());
    }

    #[test]
    fn seeds_and_pairs() {
        assert_eq!(parse_seeds("0..9").unwrap().len(), 10);
        assert_eq!(parse_seeds("5, 1").unwrap(), vec![5, 1]);
        assert!(parse_seeds("3..1").is_err());
        assert_eq!(parse_pairs("2:3, 5:3").unwrap(), vec![(2, 3), (5, 3)]);
        assert!(parse_pairs("2-3").is_err());
    }

    #[test]
    fn overrides_and_validation() {
        let mut c = ExperimentConfig::parse("env = figure1\n", ".").unwrap();
        c.apply_override("total_steps=500").unwrap();
        assert_eq!(c.train.total_steps, 500);
        c.apply_override("k = 70").unwrap();
        assert!(c.validate().is_err());
        assert!(c.apply_override("nonsense").is_err());
    }

    #[test]
    fn relative_maps_resolve_against_config_dir() {
        let c = ExperimentConfig::parse("env = maps/x.txt\n", "/data/exp").unwrap();
        assert_eq!(c.env_location(), "/data/exp/maps/x.txt");
        let c = ExperimentConfig::parse("env = empty5\n", "/data/exp").unwrap();
        assert_eq!(c.env_location(), "empty5");
    }
}
