//! `unibraid`: batch verifier for braided categories, twists and Hopf models of nilpotent Lie algebras.
//!
//! Exit status: 0 all checks pass, 1 a mathematical check failed, 2 malformed input.

mod commands;
mod output;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "unibraid", version, about = "Exact braided-category, Yang-Baxter and Hopf verifications over the rationals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the command's series, or the report when it has none, to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

/// Workspace file plus the registered modules to use.
#[derive(Args, Debug, Clone)]
pub struct Corpus {
    /// Workspace file.
    pub workspace: PathBuf,
    /// Comma-separated module names; default: every module over the algebra.
    #[arg(long, value_delimiter = ',')]
    pub modules: Option<Vec<String>>,
    /// Truncation degree; default: the least sufficient one.
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify every section of a workspace.
    Validate { workspace: PathBuf },
    /// Basis of the symmetric invariant 2-tensors.
    Invariants {
        workspace: PathBuf,
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Solve for a Lie associator to the given degree.
    Associator {
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Pentagon, hexagons, naturality and braiding square on registered modules.
    Coherence {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        tensor: Option<String>,
    },
    /// The category with `t` replaced by `lambda t`.
    Rescale {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        tensor: Option<String>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
    },
    /// `t = log(beta^2)` and the infinitesimal hexagon.
    RecoverT {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        tensor: Option<String>,
    },
    /// Classical Yang-Baxter residuals, or a bounded search over a linear family.
    Cybe {
        workspace: PathBuf,
        /// Comma-separated r-matrices to check; default: all.
        #[arg(long, value_delimiter = ',')]
        rmatrix: Option<Vec<String>>,
        /// Comma-separated r-matrices spanning a family to search.
        #[arg(long, value_delimiter = ',')]
        ansatz: Option<Vec<String>>,
        /// Search coefficients `p/q` with `|p|, q <= height`.
        #[arg(long, default_value_t = 2)]
        height: u32,
    },
    /// Antisymmetric r to `(h, omega)` and back.
    Correspondence {
        workspace: PathBuf,
        #[arg(long)]
        rmatrix: Option<String>,
    },
    /// Twist killing the associator, checked as a fiber functor.
    Twist {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        rmatrix: Option<String>,
    },
    /// R-matrix of the twist and the quantum Yang-Baxter equation.
    Qybe {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        rmatrix: Option<String>,
    },
    /// Recover r from its R-matrix.
    RecoverR {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        rmatrix: Option<String>,
    },
    /// Coradical filtration of a shipped coalgebra or a truncated U(g) or O(G).
    Coradical {
        workspace: Option<PathBuf>,
        /// `trivial`, `polynomial` or `two-group-like`.
        #[arg(long)]
        example: Option<String>,
        #[arg(long)]
        algebra: Option<String>,
        /// Use the function algebra O(G) instead of U(g).
        #[arg(long)]
        function: bool,
        /// Check the Poisson bracket of this r on O(G).
        #[arg(long)]
        rmatrix: Option<String>,
        /// Weight cutoff.
        #[arg(long, default_value_t = 4)]
        degree: usize,
    },
    /// Truncated U(g) as a Hopf algebra.
    Enveloping {
        workspace: PathBuf,
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long, default_value_t = 4)]
        degree: usize,
    },
    /// Function algebra of the group twisted by `J(r)`.
    TwistOhg {
        workspace: PathBuf,
        #[arg(long)]
        rmatrix: Option<String>,
        #[arg(long, default_value_t = 4)]
        degree: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(outcome) => {
            let text = output::render(&outcome, cli.format);
            if let Some(path) = &cli.out {
                let body = outcome.artifacts.first().map(|a| a.text.clone()).unwrap_or_else(|| text.clone());
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            print!("{text}");
            ExitCode::from(if outcome.report.all_pass() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
