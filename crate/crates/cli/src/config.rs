//! Key-value configuration files merged under command-line flags.

use std::collections::BTreeSet;
use std::fs;

use anyhow::{bail, Context, Result};

/// `key = value` (or `key: value`) lines; `#` starts a comment. Keys are long
/// flag names without the dashes; a key may repeat for list-valued flags.
pub fn read_config(path: &str) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config file {path}"))?;
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=').or_else(|| line.split_once(':')) else {
            bail!("{path}:{}: expected 'key = value'", no + 1);
        };
        let key = k.trim();
        if key.is_empty() || key == "config" {
            bail!("{path}:{}: invalid key '{key}'", no + 1);
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn flags_given(args: &[String]) -> BTreeSet<String> {
    args.iter().filter_map(|a| a.strip_prefix("--")).map(|a| a.split('=').next().unwrap_or(a).to_string()).collect()
}

/// Appends `--key=value` for every configured key whose flag does not
/// already appear on the command line.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let given = flags_given(&args);
    let mut merged = args;
    for (k, v) in read_config(&path)? {
        if !given.contains(&k) {
            merged.push(format!("--{k}={v}"));
        }
    }
    Ok(merged)
}
