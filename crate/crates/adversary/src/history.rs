use dp_protocol::{Bias, Configuration, Draw, DrawSource, StepEvent};
use dp_topology::{PhilosopherId, Side};
use thiserror::Error;

/// Everything that happened in a run so far: the initial configuration, the
/// events in order, and the current configuration.
///
/// Intermediate configurations are not stored; [`History::configuration_at`]
/// recomputes them by replaying the recorded draws.
#[derive(Debug, Clone)]
pub struct History {
    initial: Configuration,
    events: Vec<StepEvent>,
    current: Configuration,
}

impl History {
    pub fn new(initial: Configuration) -> History {
        History {
            current: initial.clone(),
            initial,
            events: Vec::new(),
        }
    }

    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    pub fn current(&self) -> &Configuration {
        &self.current
    }

    pub fn events(&self) -> &[StepEvent] {
        &self.events
    }

    pub fn last_event(&self) -> Option<&StepEvent> {
        self.events.last()
    }

    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Executes one step of `p` and records it.
    pub fn apply(&mut self, p: PhilosopherId, draws: &mut dyn DrawSource) -> StepEvent {
        let event = self.current.apply(p, draws);
        self.events.push(event);
        event
    }

    /// The configuration after the first `steps` events.
    pub fn configuration_at(&self, steps: usize) -> Configuration {
        replay(&self.initial, &self.events[..steps.min(self.events.len())])
            .expect("recorded history replays onto itself")
    }

    pub fn into_parts(self) -> (Configuration, Vec<StepEvent>, Configuration) {
        (self.initial, self.events, self.current)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("replay diverged at step {step}: recorded {recorded:?}, replayed {replayed:?}")]
pub struct ReplayMismatch {
    pub step: usize,
    pub recorded: StepEvent,
    pub replayed: StepEvent,
}

/// Feeds back the draw recorded in the event being replayed.
struct RecordedDraw(Option<Draw>);

impl DrawSource for RecordedDraw {
    fn side(&mut self, _p: PhilosopherId, _bias: Bias) -> Side {
        match self.0.take() {
            Some(Draw::Side(s)) => s,
            // A mismatch is reported by the caller; any value will do here.
            _ => Side::Left,
        }
    }

    fn label(&mut self, _p: PhilosopherId, _m: u32) -> u32 {
        match self.0.take() {
            Some(Draw::Label(l)) => l,
            _ => 1,
        }
    }
}

/// Re-executes `events` from `initial`, checking that every step reproduces
/// the recorded event.
pub fn replay(initial: &Configuration, events: &[StepEvent]) -> Result<Configuration, ReplayMismatch> {
    let mut c = initial.clone();
    for (step, recorded) in events.iter().enumerate() {
        let replayed = c.apply(recorded.actor, &mut RecordedDraw(recorded.draw));
        if replayed != *recorded {
            return Err(ReplayMismatch {
                step,
                recorded: *recorded,
                replayed,
            });
        }
    }
    Ok(c)
}
