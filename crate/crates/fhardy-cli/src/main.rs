//! `fhardy`: constants, kernel profiles and numerical checks for fractional
//! Hardy operators from the command line.
//!
//! Exit status is 0 when every check passes, 1 on invalid input, 2 when a
//! check fails and 3 when a computation does not converge.

mod commands;
mod config;
mod output;
mod suite;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Flags;
use output::Output;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Library(#[from] fhardy::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use fhardy::Error as E;
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Library(E::Convergence(_) | E::NonFinite(_) | E::Eigen(_)) => 3,
            CliError::Library(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "fhardy", version, about = "Fractional Hardy operator constants, kernels and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sharp constant, critical couplings and δ for each --a.
    Constants,
    /// Ψ(σ) for each --sigma.
    Psi,
    /// δ = Ψ⁻¹(a) for each --a.
    PsiInv,
    /// Heat profiles and envelopes at one configuration (--rx, --ry, --rxy).
    KernelEval,
    /// Riesz kernel equivalence band over random configurations.
    RieszVerify,
    /// Discrete heat kernel against the two-sided profile.
    HeatVerify,
    /// Free minus perturbed heat kernel against its envelope; with
    /// --a-tilde, a potential sandwiched between the two couplings.
    DiffVerify,
    /// The weight integral behind the Schur test (--beta, --delta-plus).
    Schur,
    /// Norm ratios over a test family for each --s.
    Sweep,
    /// The full verification battery.
    Suite,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Psi => "psi",
            Command::PsiInv => "psi-inv",
            Command::KernelEval => "kernel-eval",
            Command::RieszVerify => "riesz-verify",
            Command::HeatVerify => "heat-verify",
            Command::DiffVerify => "diff-verify",
            Command::Schur => "schur",
            Command::Sweep => "sweep",
            Command::Suite => "suite",
        }
    }

    fn header(self) -> Vec<&'static str> {
        match self {
            Command::Constants => vec!["quantity", "a", "value"],
            Command::Psi => vec!["sigma", "psi"],
            Command::PsiInv => vec!["a", "delta"],
            Command::KernelEval => vec!["t", "rx", "ry", "rxy", "lambda", "stable", "hardy", "l_envelope", "m_envelope"],
            Command::RieszVerify => vec![
                "s",
                "lower",
                "upper",
                "near_lower",
                "near_upper",
                "near_samples",
                "far_lower",
                "far_upper",
                "far_samples",
                "verdict",
            ],
            Command::HeatVerify | Command::DiffVerify => vec!["t", "check", "lower", "upper", "verdict"],
            Command::Schur => vec!["beta", "delta_plus", "d", "value", "status"],
            Command::Sweep => {
                vec!["d", "alpha", "a", "delta", "s", "family", "member_id", "ratio_forward", "ratio_backward"]
            }
            Command::Suite => vec!["check", "passed", "measured", "limit", "detail"],
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match cli.flags.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cmd = cli.command;
    let mut out = Output::new(cmd.header());
    let result = match cmd {
        Command::Constants => commands::constants(&cfg, &mut out),
        Command::Psi => commands::psi_cmd(&cfg, &mut out),
        Command::PsiInv => commands::psi_inv_cmd(&cfg, &mut out),
        Command::KernelEval => commands::kernel_eval(&cfg, &mut out),
        Command::RieszVerify => commands::riesz_verify(&cfg, &mut out),
        Command::HeatVerify => commands::heat_verify(&cfg, &mut out),
        Command::DiffVerify => commands::diff_verify(&cfg, &mut out),
        Command::Schur => commands::schur(&cfg, &mut out),
        Command::Sweep => commands::sweep(&cfg, &mut out),
        Command::Suite => suite::run(&cfg, &mut out),
    };
    let (passed, err) = match result {
        Ok(p) => (p, None),
        Err(e) => (false, Some(e)),
    };
    if let Err(e) = out.emit(cmd.name(), &cfg, passed, err.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match err {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        None if passed => ExitCode::SUCCESS,
        None => ExitCode::from(2),
    }
}
