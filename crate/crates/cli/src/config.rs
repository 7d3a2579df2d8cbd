//! `key=value` config files, merged underneath command-line flags.

use std::ffi::OsString;
use std::path::Path;

use crate::CliError;

/// Global options that consume the next token.
const VALUE_FLAGS: [&str; 7] = [
    "--tol",
    "--max-terms",
    "--max-bits",
    "--format",
    "--output",
    "--threads",
    "--config",
];

pub fn load(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
}

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if key == "config" {
            return Err(format!("line {}: config files cannot nest", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn tokens(entries: &[(String, String)]) -> Vec<OsString> {
    let mut out = Vec::new();
    for (k, v) in entries {
        match v.as_str() {
            "false" => {}
            "true" => out.push(format!("--{k}").into()),
            _ => {
                out.push(format!("--{k}").into());
                out.extend(v.split_whitespace().map(OsString::from));
            }
        }
    }
    out
}

/// Rebuilds `args` as `prog sub <config> <user flags>` so that every user flag
/// comes after, and therefore overrides, the config entries.
pub fn merge(args: &[OsString], sub: &str, entries: &[(String, String)]) -> Vec<OsString> {
    let pos = (1..args.len()).find(|&i| {
        args[i] == sub && !VALUE_FLAGS.iter().any(|f| args[i - 1] == *f)
    });
    let Some(pos) = pos else {
        return args.to_vec();
    };
    let mut out = vec![args[0].clone(), args[pos].clone()];
    out.extend(tokens(entries));
    out.extend(args[1..pos].iter().cloned());
    out.extend(args[pos + 1..].iter().cloned());
    out
}
