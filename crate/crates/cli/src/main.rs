//! `opinv` — runs the cross-validation checks and writes a JSON report.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use opinv_core::harness::{run_command, Command, RunConfig};

#[derive(Parser)]
#[command(name = "opinv", version, about = "Cross-validate the inverse routes of the operator L")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// B·A = A·B = I for the hypergeometric inversion pair.
    VerifyPair(Common),
    /// apply_l followed by each inverse route, plus route agreement.
    Roundtrip(Common),
    /// Volterra form of M, kernel singularity and branch inverses.
    Volterra(Common),
    /// Closed-form image of z·e^{(1−x)z}.
    RemarkCheck(Common),
    /// Everything above.
    All(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path; overrides `output_path` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write per-sample residuals as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_path = out.display().to_string();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let (command, common) = match cli.command {
        Cmd::VerifyPair(c) => (Command::VerifyPair, c),
        Cmd::Roundtrip(c) => (Command::Roundtrip, c),
        Cmd::Volterra(c) => (Command::Volterra, c),
        Cmd::RemarkCheck(c) => (Command::RemarkCheck, c),
        Cmd::All(c) => (Command::All, c),
    };
    let cfg = load_config(&common)?;
    let report = run_command(command, &cfg).with_context(|| format!("{} rejected the configuration", command.name()))?;

    fs::write(&cfg.output_path, report.to_json() + "\n")
        .with_context(|| format!("writing {}", cfg.output_path))?;
    if let Some(path) = &common.csv {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(file)?;
    }
    for check in &report.checks {
        println!(
            "{} {:<44} residual {:>10.3e}  tol {:.0e}",
            if check.pass { "PASS" } else { "FAIL" },
            check.check_name,
            check.max_residual,
            check.tolerance
        );
        if let Some(err) = &check.error {
            println!("     {err}");
        }
    }
    Ok(report.all_pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
