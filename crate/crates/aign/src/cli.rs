//! Command-line interface: argument definitions and dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{
    command_defaults, DiversityConfig, EstimateConfig, MiConfig, Preset, SepConfig, Settings, SweepVar, ValidateConfig,
};
use crate::error::{CliError, Result};
use crate::table::{render, Table};

#[derive(Debug, Parser)]
#[command(
    name = "aign",
    version,
    about = "Additive inverse Gaussian noise channel experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file of configuration keys; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Monte Carlo trials per point (validate: sample size; estimate: k).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Report information in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Transmitter-receiver distance d.
    #[arg(long)]
    pub distance: Option<f64>,
    /// Wiener variance sigma^2.
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Explicit sweep points, comma separated (replaces from/to/step).
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AlphabetArgs {
    /// Transmit times, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Prior probabilities matching --times (default: equiprobable).
    #[arg(long, value_delimiter = ',')]
    pub priors: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity bounds and mutual information over a velocity or sigma^2 sweep.
    MiSweep {
        #[arg(long)]
        defaults: Option<Preset>,
        #[arg(long)]
        sweep: Option<SweepVar>,
        /// Fixed velocity when sweeping sigma2.
        #[arg(long)]
        velocity: Option<f64>,
        /// Mean constraint m on the release time.
        #[arg(long)]
        mean: Option<f64>,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Simulated single-molecule SEP against its bound, over velocity.
    SepSweep {
        #[arg(long)]
        defaults: Option<Preset>,
        /// Alphabet sizes T, each with times 1 + (i-1)/(T-1).
        #[arg(long, value_delimiter = ',')]
        symbols: Option<Vec<usize>>,
        #[command(flatten)]
        alphabet: AlphabetArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Multi-molecule ML detection against the averaging filter.
    Diversity {
        #[arg(long)]
        defaults: Option<Preset>,
        /// Molecules per symbol, comma separated.
        #[arg(long, value_delimiter = ',')]
        molecules: Option<Vec<usize>>,
        #[command(flatten)]
        alphabet: AlphabetArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Checks simulated first-passage times against the inverse Gaussian law.
    Validate {
        #[arg(long)]
        velocity: Option<f64>,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Simulation time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Disable the crossing correction and the step-size check.
        #[arg(long)]
        no_bridge: bool,
    },
    /// Estimates (mu, lambda) from training molecules released at t0.
    Estimate {
        #[arg(long)]
        velocity: Option<f64>,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Number of simulated training molecules.
        #[arg(long)]
        k: Option<usize>,
        /// Known release time.
        #[arg(long)]
        t0: Option<f64>,
        /// Measured arrival times, comma separated (replaces simulation).
        #[arg(long, value_delimiter = ',')]
        arrivals: Option<Vec<f64>>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::MiSweep { .. } => "mi-sweep",
            Command::SepSweep { .. } => "sep-sweep",
            Command::Diversity { .. } => "diversity",
            Command::Validate { .. } => "validate",
            Command::Estimate { .. } => "estimate",
        }
    }

    fn preset(&self) -> Option<Preset> {
        match self {
            Command::MiSweep { defaults, .. }
            | Command::SepSweep { defaults, .. }
            | Command::Diversity { defaults, .. } => *defaults,
            _ => None,
        }
    }

    fn settings(&self) -> Settings {
        let channel = |c: &ChannelArgs| Settings {
            distance: c.distance,
            sigma2: c.sigma2,
            ..Settings::default()
        };
        let grid = |g: &GridArgs, s: Settings| Settings {
            from: g.from,
            to: g.to,
            step: g.step,
            values: g.values.clone(),
            ..s
        };
        let alphabet = |a: &AlphabetArgs, s: Settings| Settings {
            times: a.times.clone(),
            priors: a.priors.clone(),
            ..s
        };
        match self {
            Command::MiSweep {
                sweep,
                velocity,
                mean,
                channel: c,
                grid: g,
                ..
            } => grid(
                g,
                Settings {
                    sweep: *sweep,
                    velocity: *velocity,
                    mean: *mean,
                    ..channel(c)
                },
            ),
            Command::SepSweep {
                symbols,
                alphabet: a,
                channel: c,
                grid: g,
                ..
            } => grid(
                g,
                alphabet(
                    a,
                    Settings {
                        symbols: symbols.clone(),
                        ..channel(c)
                    },
                ),
            ),
            Command::Diversity {
                molecules,
                alphabet: a,
                channel: c,
                grid: g,
                ..
            } => grid(
                g,
                alphabet(
                    a,
                    Settings {
                        molecules: molecules.clone(),
                        ..channel(c)
                    },
                ),
            ),
            Command::Validate {
                velocity,
                channel: c,
                dt,
                no_bridge,
            } => Settings {
                velocity: *velocity,
                dt: *dt,
                bridge: no_bridge.then_some(false),
                ..channel(c)
            },
            Command::Estimate {
                velocity,
                channel: c,
                k,
                t0,
                arrivals,
            } => Settings {
                velocity: *velocity,
                k: *k,
                t0: *t0,
                arrivals: arrivals.clone(),
                ..channel(c)
            },
        }
    }
}

/// A finished experiment, ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub command: &'static str,
    pub config: Vec<(&'static str, String)>,
    pub table: Table,
    /// Validation verdict was FAIL.
    pub failed: bool,
}

impl Output {
    pub fn render(&self) -> String {
        render(self.command, &self.config, &self.table)
    }
}

/// Preset, then config file, then flags.
pub fn resolve_settings(cli: &Cli) -> Result<Settings> {
    let command = cli.command.name();
    let mut settings = command_defaults(command, cli.command.preset())?;
    if let Some(path) = &cli.global.config {
        settings = settings.overridden_by(&Settings::load(path)?);
    }
    let mut flags = cli.command.settings();
    flags.seed = cli.global.seed;
    flags.bits = cli.global.bits.then_some(true);
    match cli.command {
        Command::Estimate { .. } => flags.k = flags.k.or(cli.global.trials.map(|n| n as usize)),
        _ => flags.trials = cli.global.trials,
    }
    Ok(settings.overridden_by(&flags))
}

pub fn run(cli: &Cli) -> Result<Output> {
    let s = resolve_settings(cli)?;
    let command = cli.command.name();
    let (config, table, failed) = match cli.command {
        Command::MiSweep { .. } => {
            let cfg = MiConfig::resolve(&s)?;
            let rows = commands::mi_sweep(&cfg)?;
            (cfg.describe(), commands::mi_table(&cfg, &rows), false)
        }
        Command::SepSweep { .. } => {
            let cfg = SepConfig::resolve(&s)?;
            (cfg.describe(), commands::sep_table(&commands::sep_sweep(&cfg)?), false)
        }
        Command::Diversity { .. } => {
            let cfg = DiversityConfig::resolve(&s)?;
            let rows = commands::diversity(&cfg)?;
            (cfg.describe(), commands::diversity_table(&cfg, &rows), false)
        }
        Command::Validate { .. } => {
            let cfg = ValidateConfig::resolve(&s)?;
            let report = commands::validate(&cfg)?;
            (cfg.describe(), commands::validation_table(&report), !report.pass())
        }
        Command::Estimate { .. } => {
            let cfg = EstimateConfig::resolve(&s)?;
            (
                cfg.describe(),
                commands::estimate_table(&commands::estimate(&cfg)?),
                false,
            )
        }
    };
    Ok(Output {
        command,
        config,
        table,
        failed,
    })
}

pub fn write_document(out: Option<&Path>, document: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, document).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(document.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// Runs the command and writes its document; a failed validation is
/// reported after its report has been written.
pub fn execute(cli: &Cli) -> Result<()> {
    let output = run(cli)?;
    write_document(cli.global.out.as_deref(), &output.render())?;
    if output.failed {
        return Err(CliError::ValidationFailed);
    }
    Ok(())
}
