use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;

use crate::calibration::{episode_ln_likelihood, EpisodeLikelihood, ProposalModel};
use crate::error::{Error, Result};
use crate::rng::round_seed;

use super::config::ExperimentConfig;
use super::episode::{initial_scene, run_episode, EpisodeRecord};
use super::io::{write_convergence, write_episodes, write_summary};
use super::metrics::{compute_metrics, convergence, AggregateMetrics, ConvergencePoint, EpisodeRow};

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Ordered by round index.
    pub records: Vec<EpisodeRecord>,
    pub rows: Vec<EpisodeRow>,
    pub metrics: AggregateMetrics,
    pub convergence: Vec<ConvergencePoint>,
}

/// Runs every round of a configuration. Round `i` always uses
/// `round_seed(seed, i)`, so configurations sharing a master seed see the
/// same initial traffic round by round.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let run = |i: u64| run_episode(cfg, i, round_seed(cfg.seed, i));
    let rounds = 0..cfg.rounds as u64;
    let mut records: Vec<EpisodeRecord> = match cfg.threads {
        1 => rounds.map(run).collect(),
        0 => rounds.into_par_iter().map(run).collect(),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(e.to_string()))?
            .install(|| rounds.into_par_iter().map(run).collect()),
    };
    records.sort_by_key(|r| r.round);
    let rows: Vec<EpisodeRow> = records.iter().map(EpisodeRow::from_record).collect();
    Ok(ExperimentResult {
        config: cfg.clone(),
        metrics: compute_metrics(&rows),
        convergence: convergence(&rows),
        records,
        rows,
    })
}

impl ExperimentResult {
    /// Writes `episodes.csv`, `summary.csv`, `convergence.csv` and the
    /// effective configuration `config.toml` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_episodes(&self.rows, BufWriter::new(File::create(dir.join("episodes.csv"))?))?;
        write_summary(
            &[(self.config.label.clone(), self.metrics)],
            BufWriter::new(File::create(dir.join("summary.csv"))?),
        )?;
        write_convergence(&self.convergence, BufWriter::new(File::create(dir.join("convergence.csv"))?))?;
        fs::write(dir.join("config.toml"), self.config.to_toml())?;
        Ok(())
    }
}

/// Re-weights recorded episodes under the configuration's naturalistic
/// model. The sampled parameters are regenerated from each episode's seed.
pub fn recalibrate(rows: &[EpisodeRow], cfg: &ExperimentConfig) -> Result<Vec<EpisodeLikelihood>> {
    let q = ProposalModel::from_spawn(&cfg.traffic.behavior);
    rows.iter()
        .map(|r| {
            let (world, spawned) = initial_scene(cfg, r.seed);
            let ln = episode_ln_likelihood(&world, &spawned, &q, &cfg.calibration)?;
            Ok(EpisodeLikelihood {
                episode: r.round,
                likelihood: ln.exp(),
                collided: r.collided,
            })
        })
        .collect()
}

/// Rows with their likelihood ratios replaced by a re-weighting.
pub fn with_likelihoods(rows: &[EpisodeRow], lik: &[EpisodeLikelihood]) -> Vec<EpisodeRow> {
    rows.iter()
        .zip(lik)
        .map(|(r, l)| EpisodeRow {
            ln_likelihood_ratio: super::metrics::round6(l.likelihood.ln()),
            ..*r
        })
        .collect()
}
