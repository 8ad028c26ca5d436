use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod run;

#[derive(Parser)]
#[command(
    name = "wreath-embed",
    version,
    about = "Build and verify explicit wreath-product embeddings of groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print backend, generator orders, order, derived length and abelianization.
    Inspect {
        spec: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        max_closure: usize,
    },
    /// Build a witness, verify it and emit a certificate.
    Embed(RunArgs),
    /// Rebuild and check that a stored certificate is reproduced and passes.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Certificate written by an earlier `embed --out`.
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Standalone oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run every applicable construction on a spec and summarize the verdicts.
    Report {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_closure: usize,
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Check that a sequence is strictly uneven (optionally modulo N).
    Uneven {
        #[arg(required = true)]
        terms: Vec<u64>,
        #[arg(long)]
        modulus: Option<u64>,
    },
    /// Write an element of G' as a short product of commutators.
    Decompose {
        /// Spec path or a built-in name (Z2, Z3, Z4, Z2xZ2, S3).
        group: String,
        element: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_closure: usize,
    },
    /// Print the derived series of a finite group.
    Derived {
        group: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_closure: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Theorem {
    #[value(name = "1")]
    One,
    #[value(name = "3")]
    Three,
    #[value(name = "5")]
    Five,
    #[value(name = "cor6")]
    Cor6,
}

#[derive(Args, Clone)]
struct RunArgs {
    spec: PathBuf,
    #[arg(long, value_enum)]
    theorem: Theorem,
    /// Radius of the comparison window on free axes.
    #[arg(long, default_value_t = 32)]
    window: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_closure: usize,
    /// Allow active groups with more than a million points.
    #[arg(long)]
    allow_large: bool,
    /// Order of c for the finite construction (default s^2).
    #[arg(long)]
    c_order: Option<u64>,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print d on the comparison window.
    #[arg(long)]
    dump: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            if let Some(hint) = run::hint(&err) {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(2)
        }
    }
}
