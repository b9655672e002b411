//! `qtv`: evaluate Turaev-Viro and Reshetikhin-Turaev invariants from the
//! command line.

mod cache;
mod commands;
mod range;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtv_core::jones::Knot;

use crate::record::Format;

#[derive(Parser, Debug)]
#[command(name = "qtv", version, about = "Quantum invariants of 3-manifolds at roots of unity")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Built-in census manifold (unknot, fig8, k52, m36, k61, mmin, ...).
    #[arg(long)]
    pub census: Option<String>,
    /// Triangulation file in the qtv text format.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Levels: `11`, `11,13,17` or `start:end:step` (inclusive).
    #[arg(long)]
    pub r: String,
    /// Requested verified decimal digits.
    #[arg(long, default_value_t = 12)]
    pub digits: u32,
    /// Worker threads for each state sum.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Precision cap in bits.
    #[arg(long, default_value_t = 16384)]
    pub max_prec: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Leave `elapsed_ms` empty so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Directory for cached results.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    Orthogonality,
    Be,
    Symmetry,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// TV_r at q = exp(k·πi/r), plus QV_r when k = 2.
    Tv {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        k: i64,
    },
    /// QV_r = 2π/(r−2)·log TV_r for odd r.
    Qv {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Q_r of p-surgery along fig8 or k52.
    Rt {
        #[arg(long)]
        knot: Knot,
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Numerically check a 6j-symbol identity.
    Verify {
        #[arg(long, value_enum)]
        identity: Identity,
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = 1)]
        k: i64,
        /// Random admissible inputs to check (default 1000).
        #[arg(long, conflicts_with = "exhaustive")]
        samples: Option<usize>,
        /// Check every admissible input.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pass iff the maximum residual is below this.
        #[arg(long, default_value_t = 1e-30)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        no_timing: bool,
    },
    /// Least-squares fit of Φ_r = ln|TV_r| − (r−2)·vol/(2π) against ln(r−2).
    Fit {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Hyperbolic volume; defaults to the census value.
        #[arg(long)]
        vol: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Tv { source, common, k } => commands::tv(&source, &common, k, false),
        Cmd::Qv { source, common } => commands::tv(&source, &common, 2, true),
        Cmd::Rt { knot, p, common } => commands::rt(knot, p, &common),
        Cmd::Verify { identity, r, k, samples, exhaustive, seed, threshold, format, no_timing } => {
            let sampling = if exhaustive {
                qtv_core::sixj::Sampling::Exhaustive
            } else {
                qtv_core::sixj::Sampling::Random { samples: samples.unwrap_or(1000), seed }
            };
            commands::verify(identity, &r, k, sampling, threshold, format, no_timing)
        }
        Cmd::Fit { source, common, vol } => commands::fit(&source, &common, vol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    std::panic::set_hook(Box::new(|info| eprintln!("qtv: internal error: {info}")));
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(msg)) => {
            eprintln!("qtv: {msg}");
            ExitCode::from(1)
        }
        Err(_) => ExitCode::from(1),
    }
}
