use std::sync::Arc;

use dp_protocol::System;
use dp_topology::PhilosopherId;
use serde::{Deserialize, Serialize};

use crate::script::{fairize, ScriptedAdversary, StubbornnessBudget};
use crate::scripts::{PendantScript, TriangleScript, WaveScript};
use crate::{Adversary, AdversaryError, Gdp1Starver, Precondition, RoundRobin, UniformRandom};

/// Names accepted by [`AdversaryKind::from_name`].
pub const ADVERSARY_NAMES: &[&str] = &[
    "round-robin",
    "uniform-random",
    "stubborn-lr1-triangle",
    "stubborn-theorem1",
    "stubborn-theorem2",
    "stubborn-wave",
    "gdp1-starver",
];

pub const DEFAULT_STALL_BOUND: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "name")]
pub enum AdversaryKind {
    RoundRobin,
    UniformRandom,
    StubbornLr1Triangle,
    /// `ring_size` defaults to the fork count minus one.
    StubbornTheorem1 { ring_size: Option<usize> },
    /// `lens` must be given: a theta graph does not determine its path
    /// lengths' order.
    StubbornTheorem2 { lens: [usize; 3] },
    StubbornWave,
    Gdp1Starver {
        starved: usize,
        feeder: Option<usize>,
        stall_bound: u64,
        precondition: Precondition,
    },
}

impl AdversaryKind {
    /// Parses a name and its whitespace-separated parameters.
    pub fn from_name(name: &str, params: &[&str]) -> Result<AdversaryKind, AdversaryError> {
        let int = |i: usize, what: &str| -> Result<Option<usize>, AdversaryError> {
            params
                .get(i)
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| AdversaryError::InvalidParameter(format!("{what} must be an integer, got `{s}`")))
                })
                .transpose()
        };
        let kind = match name {
            "round-robin" => AdversaryKind::RoundRobin,
            "uniform-random" => AdversaryKind::UniformRandom,
            "stubborn-lr1-triangle" => AdversaryKind::StubbornLr1Triangle,
            "stubborn-theorem1" => AdversaryKind::StubbornTheorem1 {
                ring_size: int(0, "ring size")?,
            },
            "stubborn-theorem2" => {
                let lens = [int(0, "len1")?, int(1, "len2")?, int(2, "len3")?];
                match lens {
                    [Some(a), Some(b), Some(c)] => AdversaryKind::StubbornTheorem2 { lens: [a, b, c] },
                    _ => {
                        return Err(AdversaryError::InvalidParameter(
                            "stubborn-theorem2 needs three path lengths".into(),
                        ))
                    }
                }
            }
            "stubborn-wave" => AdversaryKind::StubbornWave,
            "gdp1-starver" => AdversaryKind::Gdp1Starver {
                starved: int(0, "starved philosopher")?.unwrap_or(0),
                feeder: int(1, "feeder philosopher")?,
                stall_bound: DEFAULT_STALL_BOUND,
                precondition: Precondition::Required,
            },
            _ => {
                return Err(AdversaryError::Unknown {
                    name: name.into(),
                    available: ADVERSARY_NAMES.join(", "),
                })
            }
        };
        let max = match kind {
            AdversaryKind::StubbornTheorem1 { .. } => 1,
            AdversaryKind::StubbornTheorem2 { .. } => 3,
            AdversaryKind::Gdp1Starver { .. } => 2,
            _ => 0,
        };
        if params.len() > max {
            return Err(AdversaryError::InvalidParameter(format!(
                "`{name}` takes at most {max} parameter(s), got {}",
                params.len()
            )));
        }
        Ok(kind)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AdversaryKind::RoundRobin => "round-robin",
            AdversaryKind::UniformRandom => "uniform-random",
            AdversaryKind::StubbornLr1Triangle => "stubborn-lr1-triangle",
            AdversaryKind::StubbornTheorem1 { .. } => "stubborn-theorem1",
            AdversaryKind::StubbornTheorem2 { .. } => "stubborn-theorem2",
            AdversaryKind::StubbornWave => "stubborn-wave",
            AdversaryKind::Gdp1Starver { .. } => "gdp1-starver",
        }
    }

    pub fn is_scripted(&self) -> bool {
        matches!(
            self,
            AdversaryKind::StubbornLr1Triangle
                | AdversaryKind::StubbornTheorem1 { .. }
                | AdversaryKind::StubbornTheorem2 { .. }
                | AdversaryKind::StubbornWave
        )
    }
}

/// An adversary by name and parameters, as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    /// Wrap a scripted strategy in [`fairize`] with this budget.
    pub fairize: Option<StubbornnessBudget>,
    /// Let a scripted strategy run under an algorithm other than the one it
    /// was designed for (it then serves as one more fair scheduler).
    pub lenient: bool,
    /// Keep round-start and round-end configurations (verification).
    #[serde(default)]
    pub snapshots: bool,
}

impl AdversarySpec {
    pub fn new(kind: AdversaryKind) -> AdversarySpec {
        AdversarySpec {
            kind,
            fairize: None,
            lenient: false,
            snapshots: false,
        }
    }

    pub fn fairized(mut self, budget: StubbornnessBudget) -> AdversarySpec {
        self.fairize = Some(budget);
        self
    }

    pub fn lenient(mut self, lenient: bool) -> AdversarySpec {
        self.lenient = lenient;
        self
    }

    pub fn with_snapshots(mut self, on: bool) -> AdversarySpec {
        self.snapshots = on;
        self
    }

    /// Display name, e.g. `fairize(stubborn-theorem1)`.
    pub fn label(&self) -> String {
        match self.fairize {
            Some(_) => format!("fairize({})", self.kind.name()),
            None => self.kind.name().into(),
        }
    }

    /// Instantiates the strategy for one run. `seed` feeds the private
    /// stream of randomized strategies.
    pub fn build(&self, sys: &Arc<System>, seed: u64) -> Result<Box<dyn Adversary>, AdversaryError> {
        let strict = !self.lenient;
        if self.fairize.is_some() && !self.kind.is_scripted() {
            return Err(AdversaryError::InvalidParameter(format!(
                "`{}` has no stubborn points to fairize",
                self.kind.name()
            )));
        }
        let script: Box<dyn crate::Script> = match &self.kind {
            AdversaryKind::RoundRobin => return Ok(Box::new(RoundRobin::new())),
            AdversaryKind::UniformRandom => return Ok(Box::new(UniformRandom::new(seed))),
            AdversaryKind::Gdp1Starver {
                starved,
                feeder,
                stall_bound,
                precondition,
            } => {
                return Ok(Box::new(Gdp1Starver::new(
                    sys,
                    PhilosopherId(*starved),
                    feeder.map(PhilosopherId),
                    *stall_bound,
                    *precondition,
                )?))
            }
            AdversaryKind::StubbornLr1Triangle => Box::new(TriangleScript::new(sys, strict)?),
            AdversaryKind::StubbornTheorem1 { ring_size } => {
                let k = ring_size.unwrap_or(sys.topology.fork_count().saturating_sub(1));
                Box::new(PendantScript::new(sys, k, strict)?)
            }
            AdversaryKind::StubbornTheorem2 { lens } => Box::new(WaveScript::theta(sys, *lens, strict)?),
            AdversaryKind::StubbornWave => Box::new(WaveScript::generic(sys)),
        };
        let scripted = ScriptedAdversary::new(script).with_snapshots(self.snapshots);
        Ok(match self.fairize {
            Some(budget) => Box::new(fairize(scripted, budget)),
            None => Box::new(scripted),
        })
    }
}
