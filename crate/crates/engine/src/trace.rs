use std::fmt::Write as _;

use dp_adversary::{replay, AdversaryLog, ReplayMismatch};
use dp_protocol::{Configuration, StepEvent};
use dp_topology::PhilosopherId;
use thiserror::Error;

use crate::RunSpec;

/// The record of one run.
#[derive(Debug, Clone)]
pub struct Trace {
    pub spec: RunSpec,
    pub adversary: String,
    pub initial: Configuration,
    pub events: Vec<StepEvent>,
    pub terminal: Configuration,
    pub adversary_log: Option<AdversaryLog>,
    /// Philosophers the adversary meant to keep from eating.
    pub in_scope: Vec<PhilosopherId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error(transparent)]
    Replay(#[from] ReplayMismatch),
    #[error("replay ended in a different terminal configuration")]
    TerminalMismatch,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One line per step: index, philosopher, action, outcome, draw or `-`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(self.events.len() * 32);
        for (i, e) in self.events.iter().enumerate() {
            let draw = e.draw.map_or_else(|| "-".to_string(), |d| d.to_string());
            let _ = writeln!(out, "{i}\t{}\t{}\t{}\t{draw}", e.actor.0, e.action.name(), e.action.outcome());
        }
        out
    }

    /// Configurations after each step, recomputed from the events; item `i`
    /// is the configuration before step `i`, the last item the terminal one.
    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        let mut c = Some(self.initial.clone());
        let mut events = self.events.iter();
        std::iter::from_fn(move || {
            let current = c.take()?;
            if let Some(e) = events.next() {
                let mut next = current.clone();
                let replayed = next.apply(e.actor, &mut Recorded(e.draw));
                debug_assert_eq!(replayed, *e);
                c = Some(next);
            }
            Some(current)
        })
    }

    /// Calls `visit(i, c)` for every configuration of the run in order:
    /// `i = 0` is the initial one, `i = len()` the terminal one. Stops early
    /// when `visit` returns `false`.
    pub fn walk(&self, mut visit: impl FnMut(usize, &Configuration) -> bool) {
        let mut c = self.initial.clone();
        if !visit(0, &c) {
            return;
        }
        for (i, e) in self.events.iter().enumerate() {
            c.apply(e.actor, &mut Recorded(e.draw));
            if !visit(i + 1, &c) {
                return;
            }
        }
    }

    /// Replays the events from the initial configuration and checks that
    /// they reproduce the terminal configuration.
    pub fn verify_replay(&self) -> Result<(), TraceError> {
        let end = replay(&self.initial, &self.events)?;
        if end == self.terminal {
            Ok(())
        } else {
            Err(TraceError::TerminalMismatch)
        }
    }

    pub fn eat_count(&self, p: PhilosopherId) -> usize {
        self.events.iter().filter(|e| e.actor == p && e.is_eating_event()).count()
    }
}

struct Recorded(Option<dp_protocol::Draw>);

impl dp_protocol::DrawSource for Recorded {
    fn side(&mut self, _p: PhilosopherId, _bias: dp_protocol::Bias) -> dp_topology::Side {
        match self.0.take() {
            Some(dp_protocol::Draw::Side(s)) => s,
            _ => unreachable!("recorded event has a side draw"),
        }
    }

    fn label(&mut self, _p: PhilosopherId, _m: u32) -> u32 {
        match self.0.take() {
            Some(dp_protocol::Draw::Label(l)) => l,
            _ => unreachable!("recorded event has a label draw"),
        }
    }
}
