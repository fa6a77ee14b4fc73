//! Multi-seed orchestration. Training runs go to a bounded worker pool;
//! every file is written afterwards by the calling thread.
//!
//! Output layout under `out`:
//!
//! ```text
//! <method>/seed_<n>.csv          per-episode log
//! <method>/seed_<n>_losses.csv   representation losses (diagnostics only)
//! summary.json
//! curves.svg                     (plot = true)
//! ```

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use si2e_rl::{load_env, train, EpisodeLog, Method};

use crate::config::ExperimentConfig;
use crate::plot::{learning_curves_svg, median_curve};
use crate::summary::{episodes_to_threshold, final_success_rate, MethodSummary, SeedSummary, Summary};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub method: Method,
    pub seed: u64,
    pub log: EpisodeLog,
}

fn successes(log: &EpisodeLog) -> Vec<bool> {
    log.episodes.iter().map(|e| e.success).collect()
}

/// Trains every (method, seed) pair; results come back in config order.
pub fn train_all(config: &ExperimentConfig) -> Result<Vec<SeedRun>> {
    config.validate()?;
    let mdp = load_env(&config.env_location())?;
    let jobs: Vec<(Method, u64)> =
        config.methods.iter().flat_map(|&m| config.seeds.iter().map(move |&s| (m, s))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Pool(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(method, seed)| {
                let log = train(&mdp, &config.train_config(method, seed))?;
                Ok(SeedRun { method, seed, log })
            })
            .collect()
    })
}

pub fn summarize(config: &ExperimentConfig, runs: &[SeedRun]) -> Summary {
    let methods = config
        .methods
        .iter()
        .map(|&method| {
            let seeds = runs
                .iter()
                .filter(|r| r.method == method)
                .map(|r| {
                    let s = successes(&r.log);
                    SeedSummary {
                        seed: r.seed,
                        episodes: s.len(),
                        episodes_to_threshold: episodes_to_threshold(&s, config.success_window, config.success_threshold),
                        final_success_rate: final_success_rate(&s, config.success_window),
                        watched_visitation: (!config.watch_pairs.is_empty())
                            .then(|| r.log.visitation_frequency(&config.watch_pairs, config.watch_last)),
                    }
                })
                .collect();
            MethodSummary::new(method.as_str(), seeds)
        })
        .collect();
    Summary {
        env: config.env.clone(),
        total_steps: config.train.total_steps,
        success_threshold: config.success_threshold,
        success_window: config.success_window,
        watch_pairs: config.watch_pairs.clone(),
        watch_last: config.watch_last,
        methods,
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn losses_csv(log: &EpisodeLog) -> String {
    let mut out = String::from("step,l_up,l_zgs,l_sgz,eta,combined\n");
    for r in &log.losses {
        let l = r.losses;
        out.push_str(&format!("{},{},{},{},{},{}\n", r.step, l.l_up, l.l_zgs, l.l_sgz, l.eta, l.combined));
    }
    out
}

pub fn write_outputs(config: &ExperimentConfig, runs: &[SeedRun], summary: &Summary) -> Result<()> {
    let out = &config.out;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for &method in &config.methods {
        let dir = out.join(method.as_str());
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    for run in runs {
        let dir = out.join(run.method.as_str());
        write(&dir.join(format!("seed_{}.csv", run.seed)), &run.log.to_csv())?;
        if config.train.diagnostics {
            write(&dir.join(format!("seed_{}_losses.csv", run.seed)), &losses_csv(&run.log))?;
        }
    }
    write(&out.join("summary.json"), &(serde_json::to_string_pretty(summary)? + "\n"))?;
    if config.plot {
        let series: Vec<(String, Vec<f64>)> = config
            .methods
            .iter()
            .map(|&m| {
                let per_seed: Vec<Vec<bool>> =
                    runs.iter().filter(|r| r.method == m).map(|r| successes(&r.log)).collect();
                (m.as_str().to_string(), median_curve(&per_seed, config.success_window))
            })
            .collect();
        let title = format!("{}: median success rate over {} seeds", config.env, config.seeds.len());
        write(&out.join("curves.svg"), &learning_curves_svg(&title, &series, config.success_threshold))?;
    }
    Ok(())
}

/// Trains, summarises and writes everything; returns the summary.
pub fn run(config: &ExperimentConfig) -> Result<Summary> {
    let runs = train_all(config)?;
    let summary = summarize(config, &runs);
    write_outputs(config, &runs, &summary)?;
    Ok(summary)
}

/// One line per method for the terminal.
pub fn render(summary: &Summary) -> String {
    let fmt = |v: Option<f64>| v.map_or_else(|| "unreached".to_string(), |x| format!("{x:.1}"));
    let mut out = format!(
        "{} ({} steps, threshold {} over {} episodes)\n",
        summary.env, summary.total_steps, summary.success_threshold, summary.success_window
    );
    for m in &summary.methods {
        out.push_str(&format!(
            "  {:<16} median episodes-to-threshold {:>9}  IQR {:>9}  final success {:.3}",
            m.method,
            fmt(m.median_episodes_to_threshold),
            fmt(m.iqr_episodes_to_threshold),
            m.mean_final_success_rate
        ));
        if let Some(v) = m.median_watched_visitation {
            out.push_str(&format!("  watched visitation {v:.4}"));
        }
        out.push('\n');
    }
    out
}
