//! `kasami`: generate generalized Kasami families, analyse their correlation
//! and check closed-form distributions against exhaustive computation.
//!
//! Exit status: 0 when everything matches, 1 on a mismatch or invalid `k`,
//! 2 on usage errors and resource limits.

mod cli;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, CodeAction, Command, FamilyAction, FieldAction};
use commands::{Failure, Outcome};

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let poly = cli.poly.as_deref();
    match &cli.command {
        Command::Field {
            action: FieldAction::Info(a),
        } => commands::field_info(a, poly),
        Command::Family {
            action: FamilyAction::Gen(a),
        } => commands::family_gen(a, poly),
        Command::Corr(a) => commands::corr(a, poly),
        Command::Verify(a) => commands::run_verify(a, poly),
        Command::Code {
            action: CodeAction::Weights(a),
        } => commands::code_weights(a, poly),
        Command::Census(a) => commands::run_census(a, poly),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
