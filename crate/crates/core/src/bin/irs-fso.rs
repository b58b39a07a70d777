use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use irs_fso::cir::CirMethod;
use irs_fso::cli::{run, Subcommand};
use irs_fso::config::{parse_config, Config};
use irs_fso::equalize::EqualizerKind;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Delay profile, spread and regime checks.
    Delay,
    /// Sampled channel impulse response.
    Cir,
    /// Symbol-spaced effective taps.
    Taps,
    /// Monte Carlo BER at the configured geometry.
    Ber,
    /// BER over the configured theta_p grid.
    Sweep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Oracle,
    Theorem1,
    Corollary1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Equalizer {
    None,
    Zf,
    Mmse,
    Zfdfe,
    Mlse,
    All,
}

/// Delay dispersion, CIR, taps and BER for IRS-assisted FSO links.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration; omitted fields take the evaluation defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write CSV here (the report then goes to stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long, value_enum)]
    equalizer: Option<Equalizer>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(args: &Args) -> anyhow::Result<()> {
    let mut cfg = match &args.config {
        Some(p) => parse_config(p)?,
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        cfg.sim.seed = seed;
    }
    if let Some(m) = args.method {
        cfg.method = match m {
            Method::Oracle => CirMethod::OracleLemma1,
            Method::Theorem1 => CirMethod::Theorem1,
            Method::Corollary1 => CirMethod::Corollary1,
        };
    }
    if let Some(e) = args.equalizer {
        cfg.sim.equalizers = match e {
            Equalizer::None => vec![EqualizerKind::None],
            Equalizer::Zf => vec![EqualizerKind::Zf],
            Equalizer::Mmse => vec![EqualizerKind::Mmse],
            Equalizer::Zfdfe => vec![EqualizerKind::ZfDfe],
            Equalizer::Mlse => vec![EqualizerKind::Mlse],
            Equalizer::All => EqualizerKind::ALL.to_vec(),
        };
    }
    let sub = match args.command {
        Command::Delay => Subcommand::Delay,
        Command::Cir => Subcommand::Cir,
        Command::Taps => Subcommand::Taps,
        Command::Ber => Subcommand::Ber,
        Command::Sweep => Subcommand::Sweep,
    };
    run(sub, &cfg, args.out.as_deref())?;
    Ok(())
}
