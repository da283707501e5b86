use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use starlab::lab::{self, ExperimentConfig, Report};
use starlab::{Error, Result};

#[derive(Parser)]
#[command(name = "starlab", version, about = "Rank-one vertex coupling experiments on star graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; the built-in reference (lambda1 = -1) when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overrides STARLAB_OUT and the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    quad_order: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Coupling constants and boundary matrices.
    Constants,
    /// Limit eigenvalue and eps-eigenvalues with predictor and FD column.
    Spectrum,
    /// Eigenvalue, Hilbert-Schmidt and S-matrix distances with rate fits.
    Converge,
    /// Finite-difference cross-checks; exit 4 when a check fails.
    Oracle,
}

fn run(cli: &Cli) -> Result<PathBuf> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::reference(-1.0),
    };
    if let Some(order) = cli.quad_order {
        cfg.quadrature.order = order;
        cfg.validate()?;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("STARLAB_OUT").filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.dir.clone());

    let command = cli.command;
    let report = lab::with_threads(cli.parallel, || -> Result<Report> {
        Ok(match command {
            Command::Constants => Report::Constants(lab::cmd_constants(&cfg)?),
            Command::Spectrum => Report::Spectrum(lab::cmd_spectrum(&cfg)?),
            Command::Converge => Report::Converge(lab::cmd_converge(&cfg)?),
            Command::Oracle => Report::Oracle(lab::cmd_oracle(&cfg)?),
        })
    })??;
    let (csv, json) = lab::write_report(&report, &out)?;
    println!("wrote {} and {}", csv.display(), json.display());
    if let Report::Oracle(r) = &report {
        for c in &r.checks {
            println!(
                "{:<22} error {:.3e}  tolerance {:.1e}  {}",
                c.check,
                c.error,
                c.tolerance,
                if c.passed { "ok" } else { "FAILED" }
            );
        }
        if !r.all_passed {
            let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.check.as_str()).collect();
            return Err(Error::ToleranceFailure(failed.join(", ")));
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
