use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dpas_core::calibration::is_estimate;
use dpas_core::harness::{
    compute_metrics, format_report, read_episodes, recalibrate, run_experiment, with_likelihoods,
    write_summary, ExperimentConfig, Group, SafeguardKind,
};

#[derive(Parser)]
#[command(name = "dpas", about = "Highway safeguard experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write episodes.csv, summary.csv,
    /// convergence.csv and config.toml.
    Run {
        /// Test setting A1, A2, B1, B2, C1 or C2.
        #[arg(long)]
        group: Option<Group>,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<usize>,
        /// Worker threads (0: all cores, 1: sequential).
        #[arg(long)]
        threads: Option<usize>,
        /// Disable the safeguard (the driving policy acts alone).
        #[arg(long)]
        unsupervised: bool,
        /// Flat TOML configuration; command-line flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Re-weight an episodes.csv under a naturalistic model.
    Calibrate {
        episodes: PathBuf,
        /// Configuration holding the traffic and naturalistic settings; by
        /// default the config.toml next to the episodes file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the re-weighted episodes here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate run directories into one summary table.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExperimentConfig::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            group,
            rounds,
            seed,
            iterations,
            threads,
            unsupervised,
            config,
            out,
        } => {
            let mut cfg = match &config {
                Some(p) => load_config(p)?,
                None => ExperimentConfig::default(),
            };
            if let Some(g) = group {
                cfg.set_group(g);
            }
            if unsupervised {
                cfg.safeguard = SafeguardKind::None;
                cfg.label = format!("{}-none", cfg.label);
            }
            if let Some(r) = rounds {
                cfg.rounds = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = iterations {
                cfg.planner.mcts.iterations = n;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let result = run_experiment(&cfg)?;
            result.write(&out)?;
            println!("{}", format_report(&[(cfg.label.clone(), result.metrics)]));
            println!("wrote {}", out.display());
        }
        Command::Calibrate { episodes, config, out } => {
            let cfg_path = match config {
                Some(p) => p,
                None => episodes.parent().unwrap_or(Path::new(".")).join("config.toml"),
            };
            let cfg = load_config(&cfg_path)?;
            let rows = read_episodes(File::open(&episodes).with_context(|| format!("opening {}", episodes.display()))?)?;
            if rows.is_empty() {
                bail!("{} holds no episodes", episodes.display());
            }
            let lik = recalibrate(&rows, &cfg)?;
            let est = is_estimate(&lik);
            let rows = with_likelihoods(&rows, &lik);
            let m = compute_metrics(&rows);
            println!("episodes: {}", rows.len());
            println!("collision probability per episode: {:.6e} (std error {:.6e})", est.rate, est.std_error);
            match (m.naturalistic_rate, m.naturalistic_std_error) {
                (Some(r), Some(se)) => println!("naturalistic collisions per 1e6 km: {r:.6e} (std error {se:.6e})"),
                _ => println!("naturalistic collisions per 1e6 km: undefined (no distance driven)"),
            }
            if let Some(path) = out {
                dpas_core::harness::write_episodes(&rows, BufWriter::new(File::create(&path)?))?;
                println!("wrote {}", path.display());
            }
        }
        Command::Report { dirs, out } => {
            let mut entries = Vec::new();
            for dir in &dirs {
                let file = dir.join("episodes.csv");
                let rows = read_episodes(File::open(&file).with_context(|| format!("opening {}", file.display()))?)?;
                let label = match load_config(&dir.join("config.toml")) {
                    Ok(c) => c.label,
                    Err(_) => dir.display().to_string(),
                };
                entries.push((label, compute_metrics(&rows)));
            }
            print!("{}", format_report(&entries));
            if let Some(path) = out {
                write_summary(&entries, BufWriter::new(File::create(&path)?))?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
