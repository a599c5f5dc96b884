//! The `dmrf` command-line tool as a library, so integration tests and fuzz
//! targets can reach the same parsers the binary uses.

pub mod args;
pub mod config;
pub mod error;
pub mod synthetic;

mod commands;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;
pub use config::FileConfig;
pub use error::{CliError, ExitKind};
pub use synthetic::{parse_synthetic, SyntheticArg};

use args::{Command, RunArgs};
use commands::Run;

fn with_pool<T>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn dispatch(command: &Command, stdout: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let run_args: &RunArgs = match command {
        Command::Train(a) => &a.run,
        Command::Predict(a) => &a.run,
        Command::Cv(a) => &a.run,
        Command::Sweep(a) => &a.run,
        Command::Consistency(a) => &a.run,
        Command::Bench(a) => &a.run,
    };
    let file = FileConfig::load_optional(run_args.config.as_deref())?;
    let run = Run::resolve(run_args, &file);
    with_pool(run.jobs, || match command {
        Command::Train(a) => commands::train(a, &file, &run, stdout),
        Command::Predict(a) => commands::predict(a, &run, stdout),
        Command::Cv(a) => commands::cv(a, &file, &run, stdout),
        Command::Sweep(a) => commands::sweep_cmd(a, &file, &run, stdout),
        Command::Consistency(a) => commands::consistency(a, &file, &run, stdout),
        Command::Bench(a) => commands::bench(a, &file, &run, stdout),
    })?
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Results go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => ExitKind::Usage as i32,
            };
            let _ = write!(if code == 0 { &mut *stdout as &mut dyn Write } else { stderr }, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}
