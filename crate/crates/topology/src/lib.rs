//! Multigraph topologies for the generalized dining philosophers problem.
//!
//! Forks are the nodes of an undirected multigraph and philosophers are its
//! arcs. Every arc names a *left* and a *right* endpoint; the orientation is
//! purely a local naming convention used by the protocols when they pick a
//! side. Parallel arcs are allowed, self-loops are not.

mod cycles;
mod format;
mod generators;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cycles::{Cycle, DEFAULT_CYCLE_FORK_CAP};
pub use format::parse_spec;
pub use generators::{doubled_triangle, ring, ring_with_pendant, theta};

/// Index of a fork, dense in `[0, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ForkId(pub usize);

/// Index of a philosopher (an arc), dense in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhilosopherId(pub usize);

impl fmt::Display for ForkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

impl fmt::Display for PhilosopherId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// One of the two local names a philosopher uses for its forks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A philosopher, seen as an arc between two forks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoints {
    pub left: ForkId,
    pub right: ForkId,
}

impl Endpoints {
    pub fn new(left: usize, right: usize) -> Endpoints {
        Endpoints {
            left: ForkId(left),
            right: ForkId(right),
        }
    }

    pub fn fork(&self, side: Side) -> ForkId {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// The side under which this arc sees `fork`, if the arc touches it.
    pub fn side_of(&self, fork: ForkId) -> Option<Side> {
        if self.left == fork {
            Some(Side::Left)
        } else if self.right == fork {
            Some(Side::Right)
        } else {
            None
        }
    }

    pub fn touches(&self, fork: ForkId) -> bool {
        self.left == fork || self.right == fork
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("invalid topology: {0}")]
    Invalid(String),
    #[error("a topology needs at least 2 forks, got {0}")]
    TooFewForks(usize),
    #[error("a topology needs at least 1 philosopher")]
    NoPhilosophers,
    #[error("philosopher with identical forks: arc {arc} connects fork {fork} to itself")]
    SelfLoop { arc: usize, fork: usize },
    #[error("dangling fork reference: arc {arc} names fork {fork} but only {fork_count} forks exist")]
    DanglingFork {
        arc: usize,
        fork: usize,
        fork_count: usize,
    },
    #[error("philosopher {0} does not exist")]
    UnknownPhilosopher(usize),
    #[error("cycle enumeration is limited to {cap} forks, topology has {forks}")]
    CycleCapExceeded { forks: usize, cap: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An immutable multigraph of forks (nodes) and philosophers (arcs).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    fork_count: usize,
    arcs: Vec<Endpoints>,
}

impl Topology {
    /// Builds and validates a topology.
    pub fn new(fork_count: usize, arcs: Vec<Endpoints>) -> Result<Topology, TopologyError> {
        let t = Topology::unchecked(fork_count, arcs);
        t.validate()?;
        Ok(t)
    }

    /// Builds a topology without checking it; call [`Topology::validate`]
    /// before handing it to a simulation.
    pub fn unchecked(fork_count: usize, arcs: Vec<Endpoints>) -> Topology {
        Topology { fork_count, arcs }
    }

    /// Checks every structural invariant and reports the first violation.
    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.fork_count < 2 {
            return Err(TopologyError::TooFewForks(self.fork_count));
        }
        if self.arcs.is_empty() {
            return Err(TopologyError::NoPhilosophers);
        }
        for (i, arc) in self.arcs.iter().enumerate() {
            for f in [arc.left, arc.right] {
                if f.0 >= self.fork_count {
                    return Err(TopologyError::DanglingFork {
                        arc: i,
                        fork: f.0,
                        fork_count: self.fork_count,
                    });
                }
            }
            if arc.left == arc.right {
                return Err(TopologyError::SelfLoop {
                    arc: i,
                    fork: arc.left.0,
                });
            }
        }
        Ok(())
    }

    pub fn fork_count(&self) -> usize {
        self.fork_count
    }

    pub fn philosopher_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Endpoints] {
        &self.arcs
    }

    pub fn arc(&self, p: PhilosopherId) -> Endpoints {
        self.arcs[p.0]
    }

    pub fn fork_of(&self, p: PhilosopherId, side: Side) -> ForkId {
        self.arcs[p.0].fork(side)
    }

    pub fn forks(&self) -> impl Iterator<Item = ForkId> {
        (0..self.fork_count).map(ForkId)
    }

    pub fn philosophers(&self) -> impl Iterator<Item = PhilosopherId> {
        (0..self.arcs.len()).map(PhilosopherId)
    }

    /// Philosophers incident to `fork`, in index order.
    pub fn incident(&self, fork: ForkId) -> Vec<PhilosopherId> {
        self.philosophers()
            .filter(|p| self.arcs[p.0].touches(fork))
            .collect()
    }

    pub fn degree(&self, fork: ForkId) -> usize {
        self.arcs.iter().filter(|a| a.touches(fork)).count()
    }

    /// Philosophers other than `p` sharing at least one fork with `p`.
    pub fn neighbours(&self, p: PhilosopherId) -> Vec<PhilosopherId> {
        let arc = self.arc(p);
        self.philosophers()
            .filter(|&q| q != p && (self.arcs[q.0].touches(arc.left) || self.arcs[q.0].touches(arc.right)))
            .collect()
    }

    /// All simple cycles containing arc `p`, using the default fork cap.
    pub fn cycles_through(&self, p: PhilosopherId) -> Result<Vec<Cycle>, TopologyError> {
        self.cycles_through_capped(p, DEFAULT_CYCLE_FORK_CAP)
    }

    pub fn cycles_through_capped(
        &self,
        p: PhilosopherId,
        fork_cap: usize,
    ) -> Result<Vec<Cycle>, TopologyError> {
        if p.0 >= self.arcs.len() {
            return Err(TopologyError::UnknownPhilosopher(p.0));
        }
        self.check_cycle_cap(fork_cap)?;
        Ok(cycles::through(self, p, false))
    }

    /// Every simple cycle of the multigraph exactly once, ordered by the
    /// smallest arc index they contain.
    pub fn all_cycles(&self) -> Result<Vec<Cycle>, TopologyError> {
        self.all_cycles_capped(DEFAULT_CYCLE_FORK_CAP)
    }

    pub fn all_cycles_capped(&self, fork_cap: usize) -> Result<Vec<Cycle>, TopologyError> {
        self.check_cycle_cap(fork_cap)?;
        Ok(self
            .philosophers()
            .flat_map(|p| cycles::through(self, p, true))
            .collect())
    }

    fn check_cycle_cap(&self, cap: usize) -> Result<(), TopologyError> {
        if self.fork_count > cap {
            Err(TopologyError::CycleCapExceeded {
                forks: self.fork_count,
                cap,
            })
        } else {
            Ok(())
        }
    }

    /// Renders the line-oriented spec format understood by [`parse_spec`].
    pub fn to_spec(&self) -> String {
        format::render(self)
    }
}
