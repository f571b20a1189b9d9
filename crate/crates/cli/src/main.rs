//! `stokesheat`: eigenbases, spectral-inequality sweeps, observability
//! constants and staged null controls from the command line.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{parse_config, Format, Overrides};

#[derive(Parser, Debug)]
#[command(name = "stokesheat", version, about = "Spectral analysis and null control of the Stokes-heat strip")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Spectral cutoff of the basis.
    #[arg(long = "lambda-max", visible_alias = "Lambda-max", global = true)]
    lambda_max: Option<f64>,

    /// Highest Fourier sector (default derived from the cutoff).
    #[arg(long = "k-max", global = true)]
    k_max: Option<u32>,

    #[arg(long, global = true)]
    gamma: Option<f64>,

    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Control horizon T.
    #[arg(long, global = true)]
    horizon: Option<f64>,

    #[arg(long = "lambda-cap", global = true)]
    lambda_cap: Option<f64>,

    /// Observation rectangle as `a1,b1,a2,b2`.
    #[arg(long, global = true, value_parser = parse_region)]
    region: Option<[f64; 4]>,

    /// Comma-separated cutoffs for sweeps.
    #[arg(long = "lambda-list", global = true, value_delimiter = ',')]
    lambda_list: Option<Vec<f64>>,

    /// Comma-separated horizons for sweeps.
    #[arg(long = "t-list", global = true, value_delimiter = ',')]
    t_list: Option<Vec<f64>>,

    #[arg(long = "out-dir", global = true)]
    out_dir: Option<PathBuf>,

    /// Basis cache file (read if compatible, written otherwise).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Assemble the eigenbasis and check orthonormality.
    Eigens,
    /// Minimal eigenvalue of the cosh-weighted Gramian over Lambda_list.
    Specineq,
    /// Observability constants over the Lambda_list x T_list grid.
    Observe,
    /// Staged null control of a random initial state.
    Control,
    /// Run the invariant suite.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eigens => "eigens",
            Command::Specineq => "specineq",
            Command::Observe => "observe",
            Command::Control => "control",
            Command::Verify => "verify",
        }
    }
}

fn parse_region(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected a1,b1,a2,b2, got {s:?}"));
    }
    let mut r = [0.0; 4];
    for (v, p) in r.iter_mut().zip(parts) {
        *v = p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let over = Overrides {
        lambda_max: cli.lambda_max,
        k_max: cli.k_max,
        gamma: cli.gamma,
        epsilon: cli.epsilon,
        horizon: cli.horizon,
        lambda_cap: cli.lambda_cap,
        region: cli.region,
        lambda_list: cli.lambda_list.clone(),
        t_list: cli.t_list.clone(),
        out_dir: cli.out_dir.clone(),
        cache: cli.cache.clone(),
        format: cli.format,
    };
    let cfg = match parse_config(cli.config.as_deref(), &over) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: configuration: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }

    println!("# stokesheat {} {}", env!("CARGO_PKG_VERSION"), cli.command.name());
    println!("# effective configuration:");
    for line in cfg.echo().lines() {
        println!("#   {line}");
    }

    let result = match cli.command {
        Command::Eigens => commands::cmd_eigens(&cfg),
        Command::Specineq => commands::cmd_specineq(&cfg),
        Command::Observe => commands::cmd_observe(&cfg),
        Command::Control => commands::cmd_control(&cfg),
        Command::Verify => commands::cmd_verify(&cfg),
    };
    match result {
        Ok(()) => {
            println!("result: pass");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            println!("result: fail");
            ExitCode::from(f.exit_code())
        }
    }
}
