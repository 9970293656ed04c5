//! Line-oriented topology files.
//!
//! ```text
//! # comments and blank lines are ignored
//! forks 3
//! arc 0 1
//! arc 1 2
//! arc 2 0
//! ```
//!
//! The first meaningful line declares the fork count; each following `arc`
//! line adds one philosopher (in order) with its left and right fork.

use std::fmt::Write;

use crate::{Endpoints, Topology, TopologyError};

pub(crate) fn render(t: &Topology) -> String {
    let mut out = String::new();
    writeln!(out, "forks {}", t.fork_count()).unwrap();
    for arc in t.arcs() {
        writeln!(out, "arc {} {}", arc.left.0, arc.right.0).unwrap();
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> TopologyError {
    TopologyError::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, word: Option<&str>, what: &str) -> Result<usize, TopologyError> {
    let word = word.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    word.parse()
        .map_err(|_| parse_err(line, format!("{what} must be a non-negative integer, got `{word}`")))
}

/// Parses and validates a topology file.
pub fn parse_spec(text: &str) -> Result<Topology, TopologyError> {
    let mut fork_count = None;
    let mut arcs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let keyword = words.next().unwrap_or_default();
        match (keyword, fork_count) {
            ("forks", None) => fork_count = Some(number(line, words.next(), "fork count")?),
            ("forks", Some(_)) => return Err(parse_err(line, "duplicate `forks` line")),
            ("arc", None) => return Err(parse_err(line, "`forks <k>` must come before any arc")),
            ("arc", Some(_)) => {
                let left = number(line, words.next(), "left fork")?;
                let right = number(line, words.next(), "right fork")?;
                arcs.push(Endpoints::new(left, right));
            }
            (other, _) => {
                return Err(parse_err(line, format!("unknown keyword `{other}`")));
            }
        }
        if let Some(extra) = words.next() {
            return Err(parse_err(line, format!("unexpected trailing token `{extra}`")));
        }
    }
    let fork_count = fork_count.ok_or_else(|| parse_err(1, "missing `forks <k>` line"))?;
    Topology::new(fork_count, arcs)
}
