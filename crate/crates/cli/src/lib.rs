//! Command line, file formats and parallel execution for `mcc-core`.

pub mod commands;
pub mod error;
pub mod exec;
pub mod format;
pub mod params;
pub mod plaintext;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::{run, Cli, Output};
pub use error::{CliError, Result};

/// Parses `args`, runs the command, writes its output and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(out) => {
            eprint!("{}", out.stderr);
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
