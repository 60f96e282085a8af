//! `key=value` config files, merged into argv so that clap validates them
//! like flags and explicit flags take precedence.

use std::path::Path;

use anyhow::{bail, Context, Result};

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn has_flag(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {line:?}", i + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key {:?}", i + 1, k.trim());
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Appends config entries not already given on the command line. A
/// `threads` entry also yields to POWERWL_THREADS.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("cannot read config {path}"))?;
    let mut out = argv.clone();
    for (key, value) in parse(&text)? {
        if has_flag(&argv, &key) || (key == "threads" && std::env::var_os("POWERWL_THREADS").is_some()) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_merges() {
        let kv = parse("alpha = 3 # comment\n\nnu_bar=1\n").unwrap();
        assert_eq!(kv, vec![("alpha".into(), "3".into()), ("nu-bar".into(), "1".into())]);
        assert!(parse("oops\n").is_err());
        let argv: Vec<String> = ["powerwl", "density-macro", "--alpha=2"].iter().map(|s| s.to_string()).collect();
        assert!(has_flag(&argv, "alpha"));
        assert!(!has_flag(&argv, "c"));
    }
}
