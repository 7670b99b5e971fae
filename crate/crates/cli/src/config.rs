//! `--config` files: one `key=value` per line, keys are long flag names.
//!
//! The file's flags are spliced in right after the subcommand. Flags the user
//! also passed on the command line are left out, so the command line wins.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::CommandFactory;

use crate::args::Cli;
use crate::CliError;

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", no + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(format!("line {}: bad key {k:?}", no + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(raw: &[OsString]) -> Option<PathBuf> {
    let mut it = raw.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Command line with the config file's flags merged in.
pub fn merge(raw: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&raw) else {
        return Ok(raw);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let pairs = parse(&text).map_err(|m| CliError::Usage(format!("{}: {m}", path.display())))?;

    let root = Cli::command();
    let sub_pos = raw
        .iter()
        .skip(1)
        .position(|a| root.find_subcommand(a.to_string_lossy().as_ref()).is_some())
        .map(|p| p + 1);
    // no subcommand: let clap report it
    let Some(sub_pos) = sub_pos else {
        return Ok(raw);
    };
    let sub_name = raw[sub_pos].to_string_lossy().into_owned();
    let sub = root.find_subcommand(&sub_name).expect("found above");
    let longs = |c: &clap::Command| c.get_arguments().filter_map(|a| a.get_long()).map(str::to_string).collect::<Vec<_>>();
    let known = longs(sub);
    let known_elsewhere: Vec<String> = root.get_subcommands().flat_map(longs).collect();

    let given = |key: &str| {
        let bare = format!("--{key}");
        let joined = format!("--{key}=");
        raw[1..].iter().any(|a| {
            let a = a.to_string_lossy();
            a == bare || a.starts_with(&joined)
        })
    };
    let mut injected = Vec::new();
    for (key, value) in pairs {
        if key == "config" {
            return Err(CliError::Usage(format!("{}: config files cannot nest", path.display())));
        }
        if given(&key) {
            continue;
        }
        if known.contains(&key) {
            injected.push(OsString::from(format!("--{key}={value}")));
        } else if known_elsewhere.contains(&key) {
            log::debug!("config key {key} does not apply to {sub_name}");
        } else {
            return Err(CliError::Usage(format!("{}: unknown key {key}", path.display())));
        }
    }
    let mut argv: Vec<OsString> = raw[..=sub_pos].to_vec();
    argv.extend(injected);
    argv.extend(raw[sub_pos + 1..].iter().cloned());
    Ok(argv)
}
