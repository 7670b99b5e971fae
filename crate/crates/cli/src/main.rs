mod args;
mod commands;
mod config;
mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::{Cli, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pairlab_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

fn run(raw: Vec<OsString>) -> i32 {
    let argv = match config::merge(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let text = match cli.global.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.table.to_json(),
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "stdout".into(),
            source,
        }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    let mut code = 0;
    for (at, e) in &report.failures {
        eprintln!("error: at {at}: {e}");
        code = code.max(CliError::Core(e.clone()).exit_code());
    }
    code
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(run(std::env::args_os().collect()));
}
