//! qthermo: decay factors, QFI sweeps and optimal probes for qubit
//! thermometry in a squeezed thermal bath.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use config::CommonArgs;

/// Exit codes: 0 ok, 1 verify failure, 2 bad input, 3 series not converged,
/// 4 internal mismatch.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        Self { code: 2, message }
    }
}

impl From<qthermo::Error> for CliError {
    fn from(e: qthermo::Error) -> Self {
        use qthermo::Error as E;
        let code = match e {
            E::NotConverged { .. } => 3,
            E::ClosedFormMismatch { .. } | E::NotHermitian(_) | E::IncompletePovm(_) | E::NonPositiveElement(_) => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qthermo", version, about = "Qubit thermometry in a squeezed thermal Ohmic bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay factor Γ(t) and both temperature derivatives on a time grid
    Gamma,
    /// QFI against time, or against N for parallel GHZ/W probes
    Qfi,
    /// QFI next to the closed and generic Kraus-derivative bounds
    Bound,
    /// Symmetric logarithmic derivative and its consistency checks
    Sld,
    /// Optimal GHZ register size from Γ, or from the bath at --t
    OptN,
    /// Best of many Haar-random probes against GHZ and W references
    Search,
    /// Run the invariant and oracle-equivalence suites
    Verify {
        /// Perturb the reference values of one suite (harness self-test)
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

fn run_verify(fault: Option<&str>) -> Result<ExitCode, CliError> {
    if let Some(f) = fault {
        if !verify::SUITES.contains(&f) {
            return Err(CliError::input(format!("unknown suite {f:?}")));
        }
    }
    let reports = verify::run(fault)?;
    for r in &reports {
        match &r.failure {
            None => println!("PASS {:<16} {} cases", r.name, r.cases),
            Some(msg) => println!("FAIL {:<16} {} cases; first failure: {msg}", r.name, r.cases),
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("verify: {}/{} suites passed", reports.len() - failed, reports.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    if let Command::Verify { inject_fault } = &cli.command {
        return run_verify(inject_fault.as_deref());
    }
    let cfg = cli.common.resolve()?;
    let report = match cli.command {
        Command::Gamma => commands::gamma(&cfg)?,
        Command::Qfi => commands::qfi(&cfg)?,
        Command::Bound => commands::bound(&cfg)?,
        Command::Sld => commands::sld(&cfg)?,
        Command::OptN => commands::opt_n(&cfg)?,
        Command::Search => commands::search(&cfg)?,
        Command::Verify { .. } => unreachable!("handled above"),
    };
    report
        .write(cfg.format, cfg.out.as_deref())
        .map_err(|e| CliError::input(format!("cannot write output: {e}")))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
