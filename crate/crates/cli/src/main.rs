//! Command-line front end for the uplink joint-transmission simulator.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dmimo_core::figures::{default_figure_filename, reproduce_figure, FigureId, FigureOverrides};
use dmimo_core::harness::{emit_csv, run_experiment, ExperimentSpec};
use dmimo_core::rfenv::{LosMode, PowerMode};

#[derive(Parser)]
#[command(
    name = "dmimo",
    about = "Monte Carlo link-level simulator for two-phase distributed uplink joint transmission",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML spec file.
    Run {
        /// Experiment spec (TOML, field names as in ExperimentSpec).
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reproduce one of the built-in figure presets (fig3..fig9).
    Figure {
        /// Figure id: fig3, fig4, fig5, fig6, fig7, fig8, or fig9.
        #[arg(value_parser = parse_figure_id)]
        id: FigureId,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV path (default: report.csv, or <figure>.csv).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Phase-2 transmit power mode.
    #[arg(long, value_enum)]
    power_mode: Option<PowerModeArg>,
    /// Line-of-sight handling for the UE-to-BS links.
    #[arg(long, value_enum)]
    los: Option<LosArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PowerModeArg {
    /// Every transmitting UE spends its full budget.
    Full,
    /// One UE budget split across the transmit set.
    Normalized,
}

#[derive(Clone, Copy, ValueEnum)]
enum LosArg {
    Los,
    Nlos,
    /// Drawn per link from the distance-dependent LOS probability.
    Prob,
}

impl From<PowerModeArg> for PowerMode {
    fn from(arg: PowerModeArg) -> PowerMode {
        match arg {
            PowerModeArg::Full => PowerMode::FullPower,
            PowerModeArg::Normalized => PowerMode::Normalized,
        }
    }
}

impl From<LosArg> for LosMode {
    fn from(arg: LosArg) -> LosMode {
        match arg {
            LosArg::Los => LosMode::Los,
            LosArg::Nlos => LosMode::Nlos,
            LosArg::Prob => LosMode::Probabilistic,
        }
    }
}

fn parse_figure_id(raw: &str) -> Result<FigureId, String> {
    raw.parse().map_err(|e| format!("{e}"))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { spec, common } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("reading spec file {}", spec.display()))?;
            let mut experiment: ExperimentSpec<f64> = toml::from_str(&text)
                .with_context(|| format!("parsing spec file {}", spec.display()))?;
            if let Some(seed) = common.seed {
                experiment.scenario.rng_seed = seed;
            }
            if let Some(trials) = common.trials {
                experiment.trials = trials;
            }
            if let Some(mode) = common.power_mode {
                experiment.scenario.power_mode = mode.into();
            }
            if let Some(los) = common.los {
                experiment.scenario.los_mode_bs = los.into();
            }
            let reports = run_experiment(&experiment)?;
            let out = common.output.unwrap_or_else(|| PathBuf::from("report.csv"));
            emit_csv(&reports, &out)?;
            println!("wrote {} report rows to {}", reports.len(), out.display());
        }
        Command::Figure { id, common } => {
            let overrides = FigureOverrides {
                seed: common.seed,
                trials: common.trials,
                power_mode: common.power_mode.map(Into::into),
                los_mode_bs: common.los.map(Into::into),
            };
            let reports = reproduce_figure::<f64>(id, &overrides)?;
            let out = common
                .output
                .unwrap_or_else(|| PathBuf::from(default_figure_filename(id)));
            emit_csv(&reports, &out)?;
            println!("wrote {} report rows to {}", reports.len(), out.display());
        }
    }
    Ok(())
}
