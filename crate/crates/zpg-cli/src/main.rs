use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zpg_cli::{cmd_classify, cmd_compare, cmd_invariants, cmd_sweep, cmd_verify, resolve_precision, Outcome, PRECISION_ENV};

#[derive(Parser)]
#[command(name = "zpg", version, about = "Galois module structure of multiplicative groups of local fields, by exact computation")]
struct Cli {
    /// K1 for stabilization (K2 = K1 + 2); overrides ZPG_PRECISION and the per-input default
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an extension descriptor and check expected against measured invariants
    Classify {
        #[arg(long)]
        desc: PathBuf,
    },
    /// Measure the invariant report of a presentation
    Invariants {
        #[arg(long)]
        pres: PathBuf,
    },
    /// Run the identity checks and grid assertions
    Verify {
        /// run a single family (abel, tower, lemma_321, lemma_357, case5_radical, case6_relations, w_invariants, special_spaces)
        #[arg(long)]
        only: Option<String>,
        /// grid such as `p=2|3,n=1..2`
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Classify and measure every valid descriptor of a grid; CSV if OUT ends in .csv, JSON otherwise
    Sweep {
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Field-by-field diff of two invariant reports
    Compare { a: PathBuf, b: PathBuf },
}

fn emit(o: Outcome) -> ExitCode {
    print!("{}", o.stdout);
    let _ = std::io::stdout().flush();
    if !o.stderr.is_empty() {
        eprintln!("{}", o.stderr.trim_end());
    }
    ExitCode::from(o.code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { zpg_cli::EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let env = std::env::var(PRECISION_ENV).ok();
    let precision = match resolve_precision(cli.precision, env.as_deref()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(zpg_cli::EXIT_INPUT as u8);
        }
    };
    let out = match cli.command {
        Command::Classify { desc } => cmd_classify(&desc, precision),
        Command::Invariants { pres } => cmd_invariants(&pres, precision),
        Command::Verify { only, grid, inject_fault } => {
            cmd_verify(only.as_deref(), grid.as_deref(), inject_fault.as_deref(), precision)
        }
        Command::Sweep { grid, out } => cmd_sweep(&grid, &out, precision),
        Command::Compare { a, b } => cmd_compare(&a, &b),
    };
    emit(out)
}
