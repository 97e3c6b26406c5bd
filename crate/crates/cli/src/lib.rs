//! The `hullscope` command line: argument parsing, input loading, JSON
//! reports and SVG renders on top of the `hullscope` library.

pub mod args;
pub mod commands;
pub mod io;
pub mod render;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use serde_json::{Map, Value};

use args::{Cli, Command, Common};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker pool (0 or unset = automatic).
pub const THREADS_ENV: &str = "HULLSCOPE_THREADS";

/// A bad invocation that clap cannot catch on its own (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::HullCheck(a) => &a.common,
        Command::Project(a) => &a.common,
        Command::ExtrapReport(a) => &a.common,
        Command::FitPoly(a) => &a.common,
        Command::MinDegree(a) => &a.common,
        Command::Lemma1Gap(a) => &a.common,
        Command::Lemma3Demo(a) => &a.common,
        Command::EpsEqual(a) => &a.common,
        Command::BoundaryDist(a) => &a.common,
        Command::Closeness(a) => &a.common,
        Command::Lipschitz(a) => &a.common,
        Command::Train(a) => &a.common,
        Command::Regime(a) => &a.common,
        Command::Decompose(a) => &a.common,
        Command::GenData(a) => &a.common,
    }
}

fn config(cmd: &Command) -> Value {
    let args = match cmd {
        Command::HullCheck(a) => serde_json::to_value(a),
        Command::Project(a) => serde_json::to_value(a),
        Command::ExtrapReport(a) => serde_json::to_value(a),
        Command::FitPoly(a) => serde_json::to_value(a),
        Command::MinDegree(a) => serde_json::to_value(a),
        Command::Lemma1Gap(a) => serde_json::to_value(a),
        Command::Lemma3Demo(a) => serde_json::to_value(a),
        Command::EpsEqual(a) => serde_json::to_value(a),
        Command::BoundaryDist(a) => serde_json::to_value(a),
        Command::Closeness(a) => serde_json::to_value(a),
        Command::Lipschitz(a) => serde_json::to_value(a),
        Command::Train(a) => serde_json::to_value(a),
        Command::Regime(a) => serde_json::to_value(a),
        Command::Decompose(a) => serde_json::to_value(a),
        Command::GenData(a) => serde_json::to_value(a),
    }
    .expect("argument structs serialize");
    let mut map = Map::new();
    map.insert("command".into(), Value::from(cmd.name()));
    if let Value::Object(fields) = args {
        map.extend(fields);
    }
    Value::Object(map)
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("{THREADS_ENV} must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        // Fails only if a pool already exists, e.g. on a second in-process run.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Builds the full report: the command's result fields plus `"config"`.
pub fn report(cmd: &Command) -> anyhow::Result<Value> {
    let result = commands::execute(cmd)?;
    let mut map = Map::new();
    map.insert("config".into(), config(cmd));
    if let Value::Object(fields) = result {
        map.extend(fields);
    }
    Ok(Value::Object(map))
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = Cli::command()
        .mut_subcommands(|s| s.allow_negative_numbers(true))
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    let report = match report(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return if e.downcast_ref::<UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_COMPUTE
            };
        }
    };
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    let written = match &common(&cli.command).out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_COMPUTE
        }
    }
}
