//! The `geoflow` command-line driver: verification reports for catalog and
//! user-specified solitons, tensor dumps, warped-product ODE runs and the
//! acceptance suite.

pub mod args;
pub mod bryant_cmd;
pub mod checks;
pub mod error;
pub mod io;
pub mod jet_checks;
pub mod report;
pub mod suite;
pub mod tensors;
pub mod threads;

pub use args::{Cli, Command};
pub use error::{CliError, Outcome};

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> Outcome {
    let result = threads::configure().and_then(|_| match cli.command {
        Command::Verify(a) => checks::cmd_verify(&a),
        Command::Tensors(a) => tensors::cmd_tensors(&a),
        Command::Bryant(a) => bryant_cmd::cmd_bryant(&a),
        Command::Suite(a) => suite::cmd_suite(&a),
    });
    match result {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            e.outcome()
        }
    }
}
