//! Runs: the adversary picks, the protocol steps, the engine records.
//!
//! Every run is a deterministic function of its [`RunSpec`]. Protocol draws
//! come from one ChaCha8 stream per philosopher (see [`SeededDraws`]), so the
//! k-th draw of a philosopher has the same value no matter how the adversary
//! interleaves the others.

mod draws;
mod fairness;
mod metrics;
mod trace;

use std::sync::Arc;

use dp_adversary::{Adversary, AdversaryError, AdversarySpec, History};
use dp_protocol::{
    check_transition, Configuration, Draw, DrawSource, InvariantViolation, ProtocolError, StepEvent, System,
};
use dp_topology::PhilosopherId;
use serde::Serialize;
use thiserror::Error;

pub use draws::{philosopher_stream, SeededDraws};
pub use fairness::{fairness_check, FairnessViolation};
pub use metrics::{metrics, RunMetrics};
pub use trace::{Trace, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("after step {step}: {violation}")]
    Invariant { step: usize, violation: InvariantViolation },
    #[error("invalid run spec: {0}")]
    InvalidSpec(String),
}

/// Everything that determines a run.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunSpec {
    pub system: Arc<System>,
    pub adversary: AdversarySpec,
    pub seed: u64,
    pub horizon: u64,
    /// Initial `nr` labels instead of all zeros. A test fixture for
    /// strategies that need a particular label order.
    pub initial_nr: Option<Vec<u32>>,
    /// Check every protocol invariant after every step.
    pub checked: bool,
}

impl RunSpec {
    pub fn new(system: System, adversary: AdversarySpec, seed: u64, horizon: u64) -> RunSpec {
        RunSpec {
            system: Arc::new(system),
            adversary,
            seed,
            horizon,
            initial_nr: None,
            checked: false,
        }
    }

    pub fn with_seed(&self, seed: u64) -> RunSpec {
        RunSpec { seed, ..self.clone() }
    }

    pub fn with_horizon(mut self, horizon: u64) -> RunSpec {
        self.horizon = horizon;
        self
    }

    pub fn with_initial_nr(mut self, labels: Vec<u32>) -> RunSpec {
        self.initial_nr = Some(labels);
        self
    }

    pub fn checked(mut self, on: bool) -> RunSpec {
        self.checked = on;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.horizon == 0 {
            return Err(EngineError::InvalidSpec("horizon must be at least 1".into()));
        }
        self.system.validate()?;
        Ok(())
    }

    pub fn initial_configuration(&self) -> Result<Configuration, EngineError> {
        let c = Configuration::initial_shared(self.system.clone())?;
        Ok(match &self.initial_nr {
            Some(labels) => c.with_nr(labels)?,
            None => c,
        })
    }
}

/// A run in progress, advanced one step at a time.
pub struct Simulation {
    spec: RunSpec,
    history: History,
    adversary: Box<dyn Adversary>,
    draws: SeededDraws,
}

impl Simulation {
    pub fn new(spec: &RunSpec) -> Result<Simulation, EngineError> {
        let adversary = spec.adversary.build(&spec.system, spec.seed)?;
        Simulation::with_adversary(spec, adversary)
    }

    /// Uses a caller-built adversary instead of `spec.adversary`.
    pub fn with_adversary(spec: &RunSpec, adversary: Box<dyn Adversary>) -> Result<Simulation, EngineError> {
        spec.validate()?;
        let initial = spec.initial_configuration()?;
        if spec.checked {
            initial
                .check_invariants()
                .map_err(|violation| EngineError::Invariant { step: 0, violation })?;
        }
        Ok(Simulation {
            spec: spec.clone(),
            history: History::new(initial),
            adversary,
            draws: SeededDraws::new(spec.seed),
        })
    }

    pub fn spec(&self) -> &RunSpec {
        &self.spec
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn current(&self) -> &Configuration {
        self.history.current()
    }

    pub fn adversary(&self) -> &dyn Adversary {
        self.adversary.as_ref()
    }

    pub fn steps(&self) -> usize {
        self.history.len()
    }

    pub fn finished(&self) -> bool {
        self.history.len() as u64 >= self.spec.horizon
    }

    /// Asks the adversary for the next philosopher without stepping it.
    pub fn choose(&mut self) -> Result<PhilosopherId, EngineError> {
        let p = self.adversary.choose(&self.history)?;
        if p.0 >= self.history.current().philosopher_count() {
            return Err(EngineError::InvalidSpec(format!(
                "adversary `{}` returned out-of-range {p}",
                self.adversary.name()
            )));
        }
        Ok(p)
    }

    /// Executes one step of `p`. A `forced` draw replaces the philosopher's
    /// own draw if this step draws; only the verification harness does that.
    pub fn apply(&mut self, p: PhilosopherId, forced: Option<Draw>) -> Result<StepEvent, EngineError> {
        let checked = self.spec.checked;
        match forced {
            None => apply_checked(&mut self.history, checked, p, &mut self.draws),
            Some(draw) => apply_checked(&mut self.history, checked, p, &mut draws::Forced::new(draw, &mut self.draws)),
        }
    }

    /// Executes one step of `p` with draws from `source` instead of the
    /// run's own streams. Verification instrumentation only.
    pub fn apply_with(&mut self, p: PhilosopherId, source: &mut dyn DrawSource) -> Result<StepEvent, EngineError> {
        apply_checked(&mut self.history, self.spec.checked, p, source)
    }

    /// One adversary decision plus the chosen step.
    pub fn step(&mut self) -> Result<StepEvent, EngineError> {
        let p = self.choose()?;
        self.apply(p, None)
    }

    /// Steps until the horizon.
    pub fn run_to_horizon(&mut self) -> Result<(), EngineError> {
        while !self.finished() {
            self.step()?;
        }
        Ok(())
    }

    pub fn into_trace(self) -> Trace {
        let log = self.adversary.log().cloned();
        let in_scope = self.adversary.in_scope();
        let adversary = self.adversary.name();
        let (initial, events, terminal) = self.history.into_parts();
        Trace {
            spec: self.spec,
            adversary,
            initial,
            events,
            terminal,
            adversary_log: log,
            in_scope,
        }
    }
}

fn apply_checked(
    history: &mut History,
    checked: bool,
    p: PhilosopherId,
    source: &mut dyn DrawSource,
) -> Result<StepEvent, EngineError> {
    let before = checked.then(|| history.current().clone());
    let event = history.apply(p, source);
    if let Some(before) = before {
        let step = history.len();
        let after = history.current();
        after
            .check_invariants()
            .and_then(|()| check_transition(&before, &event, after))
            .map_err(|violation| EngineError::Invariant { step, violation })?;
    }
    Ok(event)
}

/// Runs `spec` to its horizon.
pub fn run(spec: &RunSpec) -> Result<Trace, EngineError> {
    let mut sim = Simulation::new(spec)?;
    sim.run_to_horizon()?;
    Ok(sim.into_trace())
}
