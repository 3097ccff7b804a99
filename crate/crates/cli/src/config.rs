//! `--config FILE` support. The file holds `key = value` lines whose keys are
//! long flag names; its entries are spliced in right after the subcommand so
//! that flags given on the command line override them.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;
use crate::error::{CliError, CliResult};

pub fn expand(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(sub_at) = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 1)
    else {
        return Ok(args);
    };
    let Some(path) = find_config(&args[sub_at + 1..]) else {
        return Ok(args);
    };
    let cli = Cli::command();
    let sub_name = args[sub_at].to_string_lossy().into_owned();
    let Some(sub) = cli.find_subcommand(&sub_name) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut injected = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let at = |m: String| CliError::Usage(format!("{}:{}: {m}", path.display(), i + 1));
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected key = value, found {line:?}")))?;
        let key = key.trim().trim_start_matches("--");
        let value = unquote(value.trim());
        if key == "config" {
            return Err(at("config files cannot include other config files".into()));
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key)) else {
            let known = cli
                .get_subcommands()
                .any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)));
            if known {
                continue;
            }
            return Err(at(format!("unknown key {key:?}")));
        };
        match arg.get_action() {
            ArgAction::SetTrue => match parse_bool(value) {
                Some(true) => injected.push(OsString::from(format!("--{key}"))),
                Some(false) => {}
                None => return Err(at(format!("{key} expects true or false, found {value:?}"))),
            },
            a if a.takes_values() => injected.push(OsString::from(format!("--{key}={value}"))),
            _ => {}
        }
    }
    let mut out = args;
    out.splice(sub_at + 1..sub_at + 1, injected);
    Ok(out)
}

fn find_config(args: &[OsString]) -> Option<std::path::PathBuf> {
    let mut iter = args.iter().map(|a| a.to_string_lossy());
    let mut found = None;
    while let Some(a) = iter.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            found = iter.next().map(|p| Path::new(p.as_ref()).to_path_buf());
        } else if let Some(p) = a.strip_prefix("--config=") {
            found = Some(Path::new(p).to_path_buf());
        }
    }
    found
}

fn unquote(v: &str) -> &str {
    for q in ['"', '\''] {
        if v.len() >= 2 && v.starts_with(q) && v.ends_with(q) {
            return &v[1..v.len() - 1];
        }
    }
    v
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}
