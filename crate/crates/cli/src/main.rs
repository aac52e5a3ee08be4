use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ein_cli::error::AtStage;
use ein_cli::{ExperimentConfig, RawConfig, Stage, StageError};

#[derive(Parser)]
#[command(
    name = "ein",
    version,
    about = "Emotion-aware false-information classification experiments"
)]
struct Cli {
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean and split the corpus, write the emotion feature matrix.
    Prepare,
    /// Train and evaluate the configured model.
    Train,
    /// Re-evaluate a saved model on the test part.
    Evaluate,
    /// Information gain, real-vs-false t-tests, top emotions, word lists.
    Analyze,
    /// Export the network's last hidden layer and project it to 2-d.
    Project,
    /// Per-class corpus statistics.
    Stats,
    /// Write the synthetic demo bundle into --out.
    Synth {
        #[arg(long, default_value_t = 200)]
        docs_per_class: usize,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig, StageError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| ein_core::Error::Config("--config is required".into()))
        .at(Stage::Config)?;
    let mut raw = RawConfig::load(path).at(Stage::Config)?;
    if let Some(seed) = cli.seed {
        raw.set("seed", seed.to_string());
    }
    if let Some(out) = &cli.out {
        let abs = std::env::current_dir()
            .map(|d| d.join(out))
            .unwrap_or_else(|_| out.clone());
        raw.set("out", abs.display().to_string());
    }
    ExperimentConfig::from_raw(&raw, path.parent().unwrap_or(Path::new("."))).at(Stage::Config)
}

fn run(cli: &Cli) -> Result<String, StageError> {
    if let Command::Synth { docs_per_class } = cli.command {
        let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("demo"));
        let seed = cli.seed.unwrap_or(42);
        let written =
            ein_cli::synth::write_demo_bundle(&dir, docs_per_class, seed).at(Stage::Write)?;
        return Ok(format!(
            "wrote {} files to {}",
            written.len(),
            dir.display()
        ));
    }
    let config = load(cli)?;
    let out = config.out.display().to_string();
    Ok(match cli.command {
        Command::Prepare => {
            let m = ein_cli::run_prepare(&config)?;
            format!("prepared {} artifacts in {out}", m.artifacts.len())
        }
        Command::Train => {
            let r = ein_cli::run_experiment(&config)?;
            format!(
                "{} {}: accuracy {:.2}  macro-P {:.2}  macro-R {:.2}  macro-F1 {:.2}  ({out})",
                r.metrics.model,
                r.metrics.evaluation,
                r.metrics.mean.accuracy,
                r.metrics.mean.macro_precision,
                r.metrics.mean.macro_recall,
                r.metrics.mean.macro_f1
            )
        }
        Command::Evaluate => {
            let m = ein_cli::run_evaluation(&config)?;
            format!("{} test macro-F1 {:.2} ({out})", m.model, m.mean.macro_f1)
        }
        Command::Analyze => {
            let r = ein_cli::run_analysis(&config)?;
            let top: Vec<String> = r
                .information_gain
                .emotions
                .iter()
                .take(3)
                .map(|(n, _)| n.clone())
                .collect();
            format!(
                "analysed {} documents, top IG emotions: {} ({out})",
                r.documents,
                top.join(", ")
            )
        }
        Command::Project => {
            let r = ein_cli::run_projection(&config)?;
            format!(
                "projected {} documents, explained variance {:?} ({out})",
                r.documents, r.explained_variance_ratio
            )
        }
        Command::Stats => {
            let r = ein_cli::run_stats(&config)?;
            let mut s = format!(
                "{} documents after preprocessing ({} before)",
                r.prepared.total, r.raw.total
            );
            for c in &r.prepared.classes {
                s.push_str(&format!(
                    "\n  {:<12} {:>6} {:>6.2}%",
                    c.label, c.count, c.percentage
                ));
            }
            s
        }
        Command::Synth { .. } => unreachable!("handled above"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
