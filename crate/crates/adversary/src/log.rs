use dp_protocol::Configuration;
use serde::Serialize;

/// One completed scripted round.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundRecord {
    /// Value of the budget round index `k` while the round ran.
    pub index: u64,
    /// History length when the round started and ended.
    pub start_step: usize,
    pub end_step: usize,
    #[serde(skip)]
    pub start: Option<Configuration>,
    #[serde(skip)]
    pub end: Option<Configuration>,
}

impl RoundRecord {
    pub fn len(&self) -> usize {
        self.end_step - self.start_step
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SegmentKind {
    /// Entry plus setup, up to the first round.
    Setup,
    Round,
    /// A round or entry abandoned part-way.
    Abandoned,
    /// An entry whose one-shot draws were unusable.
    Rejected,
    /// The round-robin rotation after an abandonment.
    Rotation,
}

/// A contiguous stretch of the schedule between two bookkeeping points.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub end: usize,
}

/// Why and where a script gave up on its current plan.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Deviation {
    pub step: usize,
    pub reason: String,
}

/// At most this many deviations are kept verbatim.
pub const MAX_LOGGED_DEVIATIONS: usize = 64;

#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AdversaryLog {
    pub rounds: Vec<RoundRecord>,
    pub segments: Vec<Segment>,
    pub entry_attempts: u64,
    pub entry_successes: u64,
    pub entry_rejections: u64,
    pub abandoned: u64,
    pub budget_exhaustions: u64,
    pub deviations: Vec<Deviation>,
    /// Times a waiting strategy overrode its own rule to stay fair.
    pub forced_schedules: u64,
}

impl AdversaryLog {
    pub fn max_round_len(&self) -> usize {
        self.rounds.iter().map(RoundRecord::len).max().unwrap_or(0)
    }

    pub(crate) fn deviate(&mut self, step: usize, reason: String) {
        if self.deviations.len() < MAX_LOGGED_DEVIATIONS {
            self.deviations.push(Deviation { step, reason });
        }
    }
}
