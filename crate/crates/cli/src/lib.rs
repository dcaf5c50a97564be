//! `tomokit` command-line front end.
//!
//! Every failure is reported on stderr as one line `ERROR <code>: <message>`
//! and mapped to an exit status by [`exit_code`].

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod io;

use clap::Parser;
use tomokit::{Error, Result};

pub use args::{Cli, Command};

/// Environment variable capping the worker count (`0` = automatic).
pub const THREADS_ENV: &str = "TOMOKIT_THREADS";

/// 2 invalid input, 3 parse error, 4 numerical trouble, 5 data that cannot
/// support the requested inference.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } => 3,
        Error::NumericalFailure(_) | Error::Resolution { .. } | Error::StepSizeTooLarge { .. } => 4,
        Error::InsufficientData { .. } | Error::ModelMismatch { .. } | Error::InconsistentTomograms(_) => 5,
        _ => 2,
    }
}

pub fn error_line(code: &str, message: &str) -> String {
    let flat: Vec<&str> = message.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    format!("ERROR {code}: {}", flat.join(" "))
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV}={raw:?} is not a nonnegative integer")))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<std::path::PathBuf> {
    configure_threads()?;
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Measure(a) => commands::measure(a),
    }
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", error_line("invalid-argument", first));
            return 2;
        }
    };
    match run(&cli) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            0
        }
        Err(e) => {
            eprintln!("{}", error_line(e.code(), &e.to_string()));
            exit_code(&e)
        }
    }
}
