//! Plain-text graph and folding descriptions.
//!
//! Graph file, one statement per line, `#` starts a comment:
//!
//! ```text
//! node <id> <class> [P=<stages>] [T=<time>]
//! edge <from> <to> [w=<delays>]
//! time <SYMBOL>=<value> ...
//! ```
//!
//! `<class>` is one of `input`, `adder`, `comparator`, `multiplier`,
//! `swopper` or any other word (its time symbol is then `T_<word>`). Times are
//! integers or fractions such as `3/2`.
//!
//! Folding file:
//!
//! ```text
//! factor <N_f>
//! set <name> [P=<stages>] : <node or _> ...
//! ```
//!
//! A set lists exactly `N_f` slots; `_` (or `phi`) marks an empty slot.

use std::path::Path;

use crate::error::{Error, Result};

use super::fold::{FoldingSet, FoldingSpec};
use super::{Dfg, OpClass, Rational};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse(format!("line {line}: {}", msg.into()))
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn key_value<'a>(token: &'a str, line: usize) -> Result<(&'a str, &'a str)> {
    token
        .split_once('=')
        .ok_or_else(|| parse_err(line, format!("expected KEY=VALUE, got `{token}`")))
}

fn parse_rational(text: &str, line: usize) -> Result<Rational> {
    text.parse::<Rational>()
        .map_err(|_| parse_err(line, format!("bad number `{text}`")))
}

fn parse_uint(text: &str, line: usize) -> Result<u32> {
    text.parse::<u32>().map_err(|_| {
        parse_err(
            line,
            format!("expected a nonnegative integer, got `{text}`"),
        )
    })
}

pub fn parse_dfg(text: &str) -> Result<Dfg> {
    let mut g = Dfg::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "node" => {
                if tokens.len() < 3 {
                    return Err(parse_err(line, "node needs an id and a class"));
                }
                let mut pipeline = 0;
                let mut time = None;
                for t in &tokens[3..] {
                    match key_value(t, line)? {
                        ("P", v) => pipeline = parse_uint(v, line)?,
                        ("T", v) => time = Some(parse_rational(v, line)?),
                        (k, _) => {
                            return Err(parse_err(line, format!("unknown node attribute `{k}`")))
                        }
                    }
                }
                g.add_node(tokens[1], OpClass::parse(tokens[2]), pipeline, time)
                    .map_err(|e| parse_err(line, e.to_string()))?;
            }
            "edge" => {
                if tokens.len() < 3 {
                    return Err(parse_err(line, "edge needs two endpoints"));
                }
                let mut delays = 0;
                for t in &tokens[3..] {
                    match key_value(t, line)? {
                        ("w", v) => delays = parse_uint(v, line)?,
                        (k, _) => {
                            return Err(parse_err(line, format!("unknown edge attribute `{k}`")))
                        }
                    }
                }
                g.add_edge(tokens[1], tokens[2], delays)
                    .map_err(|e| parse_err(line, e.to_string()))?;
            }
            "time" => {
                for t in &tokens[1..] {
                    let (k, v) = key_value(t, line)?;
                    g.set_timing(k, parse_rational(v, line)?);
                }
            }
            other => return Err(parse_err(line, format!("unknown statement `{other}`"))),
        }
    }
    Ok(g)
}

pub fn parse_folding_spec(text: &str) -> Result<FoldingSpec> {
    let mut factor = None;
    let mut sets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "factor" => {
                let v = tokens
                    .get(1)
                    .ok_or_else(|| parse_err(line, "factor needs a value"))?;
                let n = parse_uint(v, line)?;
                if n == 0 {
                    return Err(parse_err(line, "folding factor must be at least 1"));
                }
                factor = Some(n as usize);
            }
            "set" => {
                let colon = tokens
                    .iter()
                    .position(|&t| t == ":")
                    .ok_or_else(|| parse_err(line, "set needs `:` before its slots"))?;
                if colon < 2 {
                    return Err(parse_err(line, "set needs a name"));
                }
                let mut pipeline = None;
                for t in &tokens[2..colon] {
                    match key_value(t, line)? {
                        ("P", v) => pipeline = Some(parse_uint(v, line)?),
                        (k, _) => {
                            return Err(parse_err(line, format!("unknown set attribute `{k}`")))
                        }
                    }
                }
                let slots = tokens[colon + 1..]
                    .iter()
                    .map(|&t| match t {
                        "_" | "phi" | "φ" => None,
                        id => Some(id.to_string()),
                    })
                    .collect();
                sets.push(FoldingSet {
                    name: tokens[1].to_string(),
                    pipeline,
                    slots,
                });
            }
            other => return Err(parse_err(line, format!("unknown statement `{other}`"))),
        }
    }
    let factor = factor.ok_or_else(|| Error::Parse("missing `factor` statement".into()))?;
    FoldingSpec::new(factor, sets)
}

pub fn load_dfg(path: impl AsRef<Path>) -> Result<Dfg> {
    parse_dfg(&std::fs::read_to_string(path)?)
}

pub fn load_folding_spec(path: impl AsRef<Path>) -> Result<FoldingSpec> {
    parse_folding_spec(&std::fs::read_to_string(path)?)
}
