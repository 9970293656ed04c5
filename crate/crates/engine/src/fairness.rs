use dp_topology::PhilosopherId;
use serde::Serialize;

use crate::Trace;

/// A stretch of at least `window` consecutive steps in which `philosopher`
/// was never scheduled: steps `start..end` (end exclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FairnessViolation {
    pub philosopher: PhilosopherId,
    pub window: usize,
    pub start: usize,
    pub end: usize,
}

/// Finite-horizon fairness: every philosopher must appear in every window
/// of `window` consecutive steps. Reports each maximal gap that contains a
/// full window.
pub fn fairness_check(t: &Trace, window: usize) -> Vec<FairnessViolation> {
    let window = window.max(1);
    let n = t.initial.philosopher_count();
    let len = t.events.len();
    let mut last: Vec<Option<usize>> = vec![None; n];
    let mut out = Vec::new();
    let gap = |p: usize, start: usize, end: usize, out: &mut Vec<FairnessViolation>| {
        if end - start >= window {
            out.push(FairnessViolation {
                philosopher: PhilosopherId(p),
                window,
                start,
                end,
            });
        }
    };
    for (i, e) in t.events.iter().enumerate() {
        let p = e.actor.0;
        let start = last[p].map_or(0, |j| j + 1);
        gap(p, start, i, &mut out);
        last[p] = Some(i);
    }
    for (p, l) in last.iter().enumerate() {
        gap(p, l.map_or(0, |j| j + 1), len, &mut out);
    }
    out.sort_by_key(|v| (v.start, v.philosopher));
    out
}
