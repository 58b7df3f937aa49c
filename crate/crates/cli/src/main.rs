//! Command-line surface of the multi-phase trial persuasion solver.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error,
//! 3 internal consistency failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "persuasion",
    version,
    about = "Exact solver for Bayesian persuasion in multi-phase trials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a trial at one prior and report the optimal commitment.
    Solve {
        /// Tree file (JSON syntax).
        tree: PathBuf,
        /// Prior belief of state 1; overrides the one in the tree file.
        #[arg(long)]
        prior: Option<String>,
        /// Write the full strategy report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Break ties among optimal splits against the receiver.
        #[arg(long)]
        pessimal_ties: bool,
    },
    /// Emit a value curve as CSV.
    Curve {
        tree: PathBuf,
        /// Number of evenly spaced sample rows.
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        /// Interior node path like "0.1"; defaults to the root.
        #[arg(long)]
        node: Option<String>,
        /// Add a receiver-utility column (sender plays optimally).
        #[arg(long)]
        receiver: bool,
    },
    /// Analytic two-phase solution: potentials, thresholds, type curves.
    TwoPhase {
        /// First determined experiment as "q1,q2".
        #[arg(long)]
        qa: String,
        /// Second determined experiment as "q1,q2".
        #[arg(long)]
        qb: String,
        /// Report values at this prior.
        #[arg(long)]
        prior: Option<String>,
        /// Write the baseline comparison (optimal vs mixing-one-signal
        /// strategies vs single-phase) instead of the type-curve table.
        #[arg(long)]
        bbp: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Replace trivial subtrees over non-trivial determined children by
    /// the revealing experiment.
    Prune {
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite n-ary nodes into equivalent binary levels.
    Expand {
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether the trial is worth exactly min(2p,1) to the sender.
    CheckEquivalence { tree: PathBuf },
    /// Compare the solver against the brute-force oracles.
    Oracle {
        tree: PathBuf,
        #[arg(long)]
        prior: String,
        #[arg(long, default_value_t = 40)]
        grid: u32,
        #[arg(long, default_value_t = 2)]
        refine: u32,
    },
    /// Sweep one determined-node parameter and track the utility of
    /// re-solving versus keeping the original commitment.
    Perturb {
        tree: PathBuf,
        /// Path of the determined node, like "0.1".
        #[arg(long)]
        node: String,
        /// Which parameter to sweep: q1 or q2.
        #[arg(long)]
        param: String,
        /// Sweep as "lo,hi,steps".
        #[arg(long)]
        range: String,
        #[arg(long)]
        prior: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Receiver-side maximin selection of the second experiment.
    ReceiverSelect {
        /// Fixed experiment as "q1,q2".
        #[arg(long)]
        ea: String,
        /// File with one candidate "q1,q2" per line.
        #[arg(long)]
        candidates: PathBuf,
        /// Prior interval as "a,b".
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long)]
        pessimal_ties: bool,
        /// Write the per-candidate table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in reference checks and print the discrepancy report.
    Fixtures,
}

/// Errors mapped onto exit codes.
pub enum CliError {
    /// Bad input: exit 2.
    Validation(String),
    /// The solver contradicted an oracle or a self-check: exit 3.
    Consistency(String),
}

impl From<persuasion_core::Error> for CliError {
    fn from(e: persuasion_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes, anything else is a
            // usage error.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Consistency(msg)) => {
            eprintln!("consistency failure: {msg}");
            ExitCode::from(3)
        }
    }
}
