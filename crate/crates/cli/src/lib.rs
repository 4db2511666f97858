//! Command-line experiments over the `spdc-core` numerics: configuration,
//! result files and the five subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{parse_weight, Experiment, KernelKind, Overrides, Preset, StateSource, Weight};
use output::Writer;

#[derive(Debug, Parser)]
#[command(name = "spdc", version, about = "Structured-pump SPDC experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML experiment file, merged over the preset when both are given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; falls back to `output.directory` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelKind>,
}

fn parse_mode(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s.split_once(',').ok_or_else(|| format!("expected n,m, got {s:?}"))?;
    Ok((n.trim().parse().map_err(|e| format!("{e}"))?, m.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_alpha(s: &str) -> Result<Weight, String> {
    parse_weight(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mode-decomposition histogram for the configured pump.
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Single pump mode `n,m`, replacing `pump.terms`.
        #[arg(long, value_parser = parse_mode)]
        pump: Option<(usize, usize)>,
    },
    /// Schmidt number against pump waist.
    SchmidtCurve {
        #[command(flatten)]
        common: Common,
    },
    /// Coincidence fringes and the CHSH value.
    Bell {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        source: Option<StateSource>,
    },
    /// Simulated records and maximum-likelihood style reconstruction.
    Tomography {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_enum)]
        source: Option<StateSource>,
    },
    /// Overlap of the correlated pump family with a Φ state.
    Phi {
        #[command(flatten)]
        common: Common,
        /// Pump weight `a` in [-1, 1], or `optimize`.
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<Weight>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Self::Decompose { common, .. }
            | Self::SchmidtCurve { common }
            | Self::Bell { common, .. }
            | Self::Tomography { common, .. }
            | Self::Phi { common, .. } => common,
        }
    }

    fn overrides(&self) -> Overrides {
        let c = self.common();
        let mut o = Overrides { seed: c.seed, kernel: c.kernel, ..Default::default() };
        match self {
            Self::Decompose { pump, .. } => o.pump = *pump,
            Self::Bell { source, .. } => o.source = *source,
            Self::Tomography { dim, source, .. } => {
                o.dim = *dim;
                o.source = *source;
            }
            Self::Phi { alpha, .. } => o.alpha = *alpha,
            Self::SchmidtCurve { .. } => {}
        }
        o
    }
}

/// Runs one command and returns the warnings it raised.
pub fn run(cli: &Cli) -> Result<Vec<String>> {
    let common = cli.command.common();
    let exp = Experiment::load(common.preset, common.config.as_deref(), &cli.command.overrides())?;
    let dir = common
        .out
        .clone()
        .or_else(|| exp.output.as_ref().map(PathBuf::from))
        .context("no output directory: pass --out <dir> or set output.directory")?;
    let mut w = Writer::new(&dir, exp.hash())?;
    match &cli.command {
        Command::Decompose { .. } => commands::decompose(&exp, &mut w)?,
        Command::SchmidtCurve { .. } => commands::schmidt_curve(&exp, &mut w)?,
        Command::Bell { .. } => commands::bell(&exp, &mut w)?,
        Command::Tomography { .. } => commands::tomography(&exp, &mut w)?,
        Command::Phi { .. } => commands::phi(&exp, &mut w)?,
    }
    Ok(w.warnings().to_vec())
}
