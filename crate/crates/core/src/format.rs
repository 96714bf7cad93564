//! Line-oriented text formats for instances and allocations.
//!
//! Instance:
//!
//! ```text
//! efx-instance v1
//! n 2
//! m 3
//! agent 0 additive: 3 2 1
//! agent 1 table: 0 1 1 2 1 2 2 5/2
//! ```
//!
//! Table entries are listed by ascending bitmask (`index = Σ 2^g`). Values are
//! integers or `p/q` rationals. Blank lines and lines starting with `#` are
//! skipped.
//!
//! Allocation: one line `agent <i>: g g g` per agent, goods ascending.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Profile, Valuation, ValuationKind, Value};

pub const INSTANCE_HEADER: &str = "efx-instance v1";

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders a profile. Strictified valuations have no literal representation
/// and must be materialized first.
pub fn write_instance(profile: &Profile) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{INSTANCE_HEADER}").unwrap();
    writeln!(out, "n {}", profile.n()).unwrap();
    writeln!(out, "m {}", profile.m()).unwrap();
    for (i, v) in profile.valuations().iter().enumerate() {
        match v.kind() {
            ValuationKind::Additive(w) => writeln!(out, "agent {i} additive: {}", join(w)).unwrap(),
            ValuationKind::Table(t) => writeln!(out, "agent {i} table: {}", join(t)).unwrap(),
            ValuationKind::Strictified(_) => {
                return Err(Error::Malformed(format!(
                    "agent {i}: strictified valuation has no literal form; materialize it first"
                )))
            }
        }
    }
    Ok(out)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn keyed_usize(line: usize, text: &str, key: &str) -> Result<usize> {
    let rest = text
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| parse_err(line, format!("expected `{key} <count>`")))?;
    rest.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad {key}: {rest:?}")))
}

pub fn parse_instance(text: &str) -> Result<Profile> {
    let mut lines = content_lines(text);
    let eof = |what: &str| parse_err(0, format!("unexpected end of input, expected {what}"));
    let (ln, header) = lines.next().ok_or_else(|| eof("header"))?;
    if header != INSTANCE_HEADER {
        return Err(parse_err(ln, format!("expected `{INSTANCE_HEADER}`")));
    }
    let (ln, l) = lines.next().ok_or_else(|| eof("`n <n>`"))?;
    let n = keyed_usize(ln, l, "n")?;
    let (ln, l) = lines.next().ok_or_else(|| eof("`m <m>`"))?;
    let m = keyed_usize(ln, l, "m")?;

    let mut valuations = Vec::with_capacity(n);
    for (ln, l) in lines {
        let i = valuations.len();
        let (head, body) = l
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "expected `agent <i> <kind>: values`"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let [tag, idx, kind] = head[..] else {
            return Err(parse_err(ln, "expected `agent <i> <kind>:`"));
        };
        if tag != "agent" || idx.parse::<usize>().ok() != Some(i) {
            return Err(parse_err(ln, format!("expected `agent {i}`")));
        }
        let values = body
            .split_whitespace()
            .map(|t| t.parse::<Value>().map_err(|e| parse_err(ln, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let v = match kind {
            "additive" => {
                if values.len() != m {
                    return Err(parse_err(
                        ln,
                        format!("expected {m} weights, got {}", values.len()),
                    ));
                }
                Valuation::additive(values)
            }
            "table" => Valuation::table(m, values),
            other => return Err(parse_err(ln, format!("unknown valuation kind {other:?}"))),
        }
        .map_err(|e| parse_err(ln, e.to_string()))?;
        valuations.push(v);
    }
    if valuations.len() != n {
        return Err(parse_err(
            0,
            format!("declared n = {n}, found {} agents", valuations.len()),
        ));
    }
    Profile::new(valuations).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_allocation(alloc: &Allocation) -> String {
    let mut out = String::new();
    for (i, b) in alloc.bundles().iter().enumerate() {
        let goods = join(b.goods());
        if goods.is_empty() {
            writeln!(out, "agent {i}:").unwrap();
        } else {
            writeln!(out, "agent {i}: {goods}").unwrap();
        }
    }
    out
}

/// Parses an allocation over `m` goods. Overlapping or missing goods are
/// structural errors; unreadable lines are parse errors.
pub fn parse_allocation(text: &str, m: usize) -> Result<Allocation> {
    let mut bundles = Vec::new();
    for (ln, l) in content_lines(text) {
        let i = bundles.len();
        let (head, body) = l
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "expected `agent <i>: goods`"))?;
        let expect = format!("agent {i}");
        if head.split_whitespace().collect::<Vec<_>>().join(" ") != expect {
            return Err(parse_err(ln, format!("expected `{expect}:`")));
        }
        let mut b = Bundle::EMPTY;
        for t in body.split_whitespace() {
            let g: usize = t
                .parse()
                .map_err(|_| parse_err(ln, format!("bad good index {t:?}")))?;
            if g >= m {
                return Err(Error::Structural(format!(
                    "agent {i}: good {g} out of range for m = {m}"
                )));
            }
            if b.contains(g) {
                return Err(Error::Structural(format!(
                    "agent {i}: good {g} listed twice"
                )));
            }
            b = b.with(g);
        }
        bundles.push(b);
    }
    Allocation::new(bundles, m)
}
