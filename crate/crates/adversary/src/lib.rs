//! Schedulers for dining-philosopher runs.
//!
//! An adversary sees the complete history of a run and picks the philosopher
//! that performs the next atomic step. Besides the two canonical fair
//! schedulers ([`RoundRobin`], [`UniformRandom`]) this crate provides the
//! stubborn scripts that defeat LR1 and LR2 on particular topologies, the
//! [`fairize`] wrapper that bounds their stubbornness, and a scheduler that
//! starves one philosopher under GDP1.
//!
//! Adversaries never look at protocol draws that have not happened yet; the
//! only way they interact with randomness is by scheduling the same
//! philosopher again so that it draws again.

mod history;
mod log;
pub mod script;
mod scripts;
mod simple;
mod spec;
mod starver;

use dp_protocol::Draw;
use dp_topology::PhilosopherId;
use thiserror::Error;

pub use history::{replay, History, ReplayMismatch};
pub use log::{AdversaryLog, Deviation, RoundRecord, Segment, SegmentKind};
pub use script::{fairize, quiescent, Directive, Fact, Goal, Mark, Script, ScriptedAdversary, StubbornnessBudget};
pub use scripts::{PendantScript, TriangleScript, WaveScript};
pub use simple::{RoundRobin, UniformRandom, ADVERSARY_STREAM};
pub use spec::{AdversaryKind, AdversarySpec, ADVERSARY_NAMES, DEFAULT_STALL_BOUND};
pub use starver::{Gdp1Starver, Precondition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("strategy `{strategy}` does not apply: {reason}")]
    StrategyMismatch { strategy: String, reason: String },
    #[error("strategy `{strategy}` could not establish its precondition: {reason}")]
    SetupFailed { strategy: String, reason: String },
    #[error("invalid adversary parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown adversary `{name}` (available: {available})")]
    Unknown { name: String, available: String },
    #[error("strategy `{0}` made no scheduling decision (internal error)")]
    Stuck(String),
}

/// A scheduling strategy. One instance drives exactly one run.
pub trait Adversary: Send {
    fn name(&self) -> String;

    /// The philosopher to schedule next, given everything that happened.
    fn choose(&mut self, history: &History) -> Result<PhilosopherId, AdversaryError>;

    /// The draw outcome the strategy is waiting for from `p`, if any. Only
    /// the verification harness consults this, to force a run along the
    /// strategy's intended path.
    fn forced_outcome(&self, _history: &History, _p: PhilosopherId) -> Option<Draw> {
        None
    }

    /// Round and fallback bookkeeping, for strategies that have rounds.
    fn log(&self) -> Option<&AdversaryLog> {
        None
    }

    /// Philosophers the strategy intends to keep from eating.
    fn in_scope(&self) -> Vec<PhilosopherId> {
        Vec::new()
    }
}
