//! Operational semantics of four randomized dining-philosopher protocols on
//! arbitrary multigraphs.
//!
//! * **LR1** – pick a side at random, spin on it, then test the other fork
//!   and either eat or give the first fork back and redraw.
//! * **LR2** – LR1 plus per-fork request lists and guest books; the first
//!   fork may only be taken when the courtesy condition [`Configuration::cond`]
//!   holds.
//! * **GDP1** – the first fork is the one with the larger `nr` label (ties
//!   go right); after taking it, if both labels are equal the holder gives
//!   the held fork a fresh uniform label in `[1, m]`.
//! * **GDP2** – GDP1's priorities combined with LR2's courtesy machinery.
//!
//! Every fork-touching primitive is one atomic step, and so is every random
//! draw, so that an adversary can observe a commitment before it is acted on.

mod algorithm;
mod invariants;
pub mod iso;
mod state;
mod step;

use thiserror::Error;

pub use algorithm::{Algorithm, Pc};
pub use invariants::{check_transition, InvariantViolation};
pub use iso::{isomorphism, IsoError, Mapping};
pub use state::{Bias, Configuration, Courtesy, ForkState, HungerModel, PhilosopherState, System};
pub use step::{step, Action, Draw, DrawSource, StepEvent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Topology(#[from] dp_topology::TopologyError),
    #[error("nr bound m = {m} is smaller than the fork count k = {k}")]
    NrBoundTooSmall { m: u32, k: usize },
    #[error("unknown algorithm `{0}` (expected LR1, LR2, GDP1 or GDP2)")]
    UnknownAlgorithm(String),
    #[error("invalid draw bias `{0}` (expected a fraction a/b with 0 <= a <= b, b > 0)")]
    InvalidBias(String),
    #[error("{0}")]
    Config(String),
}
