use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wickstat::{parse_config, run_subcommand, CliError, Command};

#[derive(Parser)]
#[command(name = "wickstat", version, about = "Generalized quantum statistics: twists, Wick algebras, Fock spaces")]
struct Args {
    /// System configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized checks; overrides [check] seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numerical tolerance; overrides [check] tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Output directory for exported matrices.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Torsion validity, normalization and hexagon identities.
    CheckBicharacter,
    /// Hopf axioms of kG, the CQT form and the Hopf-module structure theorem.
    CheckHopf,
    /// Twist laws, *-twist, associativity, commutation relations, confluence.
    CheckTwist,
    /// Print the normal form of an expression such as "x* x".
    NormalOrder { expr: String },
    /// Print the Gram blocks up to a degree.
    Gram { max_degree: usize },
    /// Write Fock matrices as CSV into --out.
    FockExport { cutoff: usize },
    /// Run every check; stops at the first failure.
    VerifyAll,
}

fn run(args: Args) -> Result<bool, CliError> {
    let path = args.config.ok_or(CliError::MissingSection("--config"))?;
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let cfg = parse_config(&text)?.with_overrides(args.seed, args.tolerance)?;
    let cmd = match args.cmd {
        Cmd::CheckBicharacter => Command::CheckBicharacter,
        Cmd::CheckHopf => Command::CheckHopf,
        Cmd::CheckTwist => Command::CheckTwist,
        Cmd::NormalOrder { expr } => Command::NormalOrder(expr),
        Cmd::Gram { max_degree } => Command::Gram(max_degree),
        Cmd::FockExport { cutoff } => Command::FockExport {
            cutoff,
            dir: args.out.unwrap_or_else(|| PathBuf::from("fock_export")),
        },
        Cmd::VerifyAll => Command::VerifyAll,
    };
    let mut out = String::new();
    let result = run_subcommand(&cmd, &cfg, &mut out);
    print!("{out}");
    result
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error[E{}]: {e}", e.code());
            ExitCode::from(e.code() as u8)
        }
    }
}
