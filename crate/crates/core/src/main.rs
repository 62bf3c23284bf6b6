use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mfspec::cli::{self, RunConfig, SynthKind, SynthParams};

#[derive(Parser)]
#[command(name = "mfspec", version, about = "Multifractal spectra of audio clips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment and analyse every clip in a manifest.
    Analyze {
        /// CSV with header path,raga,artist,instrument,valence.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// TOML or JSON run configuration (a previous run.json works).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-segment surface/hurst/spectrum CSVs.
        #[arg(long)]
        emit_plots: bool,
    },
    /// Generate a synthetic test series.
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long)]
        n: Option<usize>,
        /// Hurst exponent for fgn.
        #[arg(long)]
        h: Option<f64>,
        /// Cascade levels.
        #[arg(long)]
        k: Option<u32>,
        /// Cascade weight.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Series to shuffle (CSV or WAV).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Sample rate for WAV output.
        #[arg(long, default_value_t = 22_050)]
        rate: u32,
        /// Output path; `.wav` writes float WAV, anything else CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn per-instrument thresholds from analysed segments.
    Classify {
        /// Directory holding segments.csv.
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render tables and charts for a run directory.
    Report {
        #[arg(long)]
        run: PathBuf,
    },
}

fn run(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Analyze {
            manifest,
            config,
            out,
            emit_plots,
        } => {
            let mut run = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig::default(),
            };
            if manifest.is_some() {
                run.manifest = manifest;
            }
            run.emit_plots |= emit_plots;
            let outcome = cli::cmd_analyze(&run, &out)?;
            log::info!(
                "{} segment reports, {} clip errors",
                outcome.reports.len(),
                outcome.errors.len()
            );
            Ok(outcome.errors.is_empty())
        }
        Command::Synth {
            kind,
            n,
            h,
            k,
            a,
            seed,
            input,
            rate,
            out,
        } => {
            let params = SynthParams {
                kind,
                n,
                h,
                k,
                a,
                seed,
                input,
                rate,
            };
            cli::cmd_synth(&params, &out)?;
            Ok(true)
        }
        Command::Classify { reports, labels, out } => {
            let outcome = cli::cmd_classify(&reports, &labels, &out)?;
            for t in &outcome.thresholds {
                println!("{}\t{:.6}\t{:?}", t.instrument, t.threshold, t.orientation);
            }
            Ok(outcome.errors.is_empty())
        }
        Command::Report { run } => {
            let outcome = cli::cmd_report(&run)?;
            for path in &outcome.written {
                println!("{}", path.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Cli::parse();
    match run(args.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
