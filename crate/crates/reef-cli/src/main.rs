//! `reef`: train the regression roster on tank-chemistry CSVs, score new
//! rows with saved models, and export per-feature plot data.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reef_core::pipeline::{self, RunConfig};

#[derive(Parser)]
#[command(
    name = "reef",
    version,
    about = "Regression toolkit for predicting reef gross community production"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the configured model roster and write reports, model files,
    /// and a run manifest.
    Train(TrainArgs),
    /// Score a feature CSV with a saved model or ensemble document.
    Predict(PredictArgs),
    /// Write one feature-vs-target CSV per retained numeric feature.
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Input data CSV.
    #[arg(long)]
    data: PathBuf,
    /// Run configuration JSON; omit for the default seven-model run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for all artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Root seed, overriding the config value.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model JSON or ensemble document from a training run.
    #[arg(long)]
    model: PathBuf,
    /// CSV of feature rows to score.
    #[arg(long)]
    data: PathBuf,
    /// Output directory; predictions land in predictions.csv inside it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotdataArgs {
    /// Input data CSV.
    #[arg(long)]
    data: PathBuf,
    /// Run configuration JSON; only its schema section is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the per-feature CSVs.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> reef_core::Result<RunConfig> {
    match path {
        Some(path) => RunConfig::from_file(path),
        None => Ok(RunConfig::default()),
    }
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Train(args) => {
            let mut config = load_config(&args.config).inspect_err(|e| {
                // Config problems still leave a manifest naming the stage.
                pipeline::write_config_failure_manifest(&args.out, &args.data, e);
            })?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let outcome = pipeline::run_train(&config, &args.data, &args.out)?;
            print!("{}", outcome.report.render_text());
            for name in &outcome.unconverged {
                eprintln!(
                    "warning: '{name}' hit its iteration budget before reaching tolerance"
                );
            }
            println!(
                "\ntrained {} rows / evaluated {} rows; artifacts in {}",
                outcome.train_rows,
                outcome.test_rows,
                args.out.display()
            );
            Ok(())
        }
        Command::Predict(args) => {
            let out_file = args.out.join("predictions.csv");
            let rows = pipeline::run_predict(&args.model, &args.data, &out_file)?;
            println!("wrote {rows} predictions to {}", out_file.display());
            Ok(())
        }
        Command::Plotdata(args) => {
            let schema = load_config(&args.config)?.schema;
            let files = pipeline::run_plotdata(&schema, &args.data, &args.out)?;
            println!("wrote {} plot files to {}", files.len(), args.out.display());
            Ok(())
        }
    }
}
