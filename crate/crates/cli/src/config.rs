//! `--config FILE` support.
//!
//! The file is TOML. Top-level keys apply to any subcommand, and a table named
//! after the subcommand (e.g. `[simulate]`) overrides them. Keys are long flag
//! names without the dashes (`design-ebn0-db = 1.0`, `ebn0-db = [1.0, 1.5]`).
//! The keys are turned into flags placed before the command-line flags, so
//! everything goes through the same parser, and a key is dropped when the
//! command line already sets that flag (or a flag it excludes).

use std::ffi::OsString;
use std::path::Path;

use toml::{Table, Value};

use crate::error::{CliError, CliResult};

// Flags that replace each other: setting one on the command line drops the
// others from the file.
const EXCLUSIVE: &[&[&str]] = &[&["design-snr-db", "design-ebn0-db"], &["x", "y"]];

const SUBCOMMANDS: &[&str] = &[
    "construct",
    "compare",
    "encode",
    "decode",
    "simulate",
    "phi",
];

/// Returns `argv` with the config file's settings spliced in.
pub fn expand(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = find_config(&argv) else {
        return Ok(argv);
    };
    let Some(sub_pos) = argv
        .iter()
        .position(|a| SUBCOMMANDS.iter().any(|s| a == *s))
    else {
        return Ok(argv);
    };
    let sub = argv[sub_pos].to_string_lossy().into_owned();
    let table = load(Path::new(&path))?;

    let mut merged: Vec<(String, Value)> = Vec::new();
    for (key, value) in &table {
        if !value.is_table() {
            merged.push((key.clone(), value.clone()));
        }
    }
    if let Some(section) = table.get(&sub) {
        let section = section
            .as_table()
            .ok_or_else(|| CliError::validation(format!("config: [{sub}] must be a table")))?;
        for (key, value) in section {
            merged.retain(|(k, _)| k != key);
            merged.push((key.clone(), value.clone()));
        }
    }

    let given: Vec<String> = argv[sub_pos + 1..]
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let overridden = |key: &str| {
        given.iter().any(|g| g == key)
            || EXCLUSIVE
                .iter()
                .any(|grp| grp.contains(&key) && grp.iter().any(|o| given.iter().any(|g| g == o)))
    };

    let mut injected = Vec::new();
    for (key, value) in merged {
        if key == "config" || overridden(&key) {
            continue;
        }
        match value {
            Value::Boolean(true) => injected.push(OsString::from(format!("--{key}"))),
            Value::Boolean(false) => {}
            other => {
                injected.push(OsString::from(format!("--{key}")));
                injected.push(OsString::from(render(&key, &other)?));
            }
        }
    }

    let mut out = argv[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[sub_pos + 1..]);
    Ok(out)
}

fn find_config(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = a.to_str().and_then(|s| s.strip_prefix("--config=")) {
            return Some(rest.into());
        }
    }
    None
}

fn load(path: &Path) -> CliResult<Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
    text.parse::<Table>()
        .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
}

fn render(key: &str, value: &Value) -> CliResult<String> {
    Ok(match value {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|v| render(key, v))
            .collect::<CliResult<Vec<_>>>()?
            .join(","),
        _ => {
            return Err(CliError::validation(format!(
                "config: unsupported value for '{key}'"
            )))
        }
    })
}
