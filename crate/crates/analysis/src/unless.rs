use dp_engine::Trace;
use dp_protocol::Configuration;

use crate::StatePredicate;

/// Online check of `s unless s2`: once `s` holds it keeps holding at every
/// step until `s2` holds.
#[derive(Debug, Clone)]
pub struct UnlessMonitor {
    s: StatePredicate,
    s2: StatePredicate,
    armed: bool,
    violation: Option<usize>,
}

impl UnlessMonitor {
    pub fn new(s: &StatePredicate, s2: &StatePredicate) -> UnlessMonitor {
        UnlessMonitor {
            s: s.clone(),
            s2: s2.clone(),
            armed: false,
            violation: None,
        }
    }

    /// Feeds configuration number `i` of a run.
    pub fn observe(&mut self, i: usize, c: &Configuration) {
        if self.violation.is_some() {
            return;
        }
        if self.s2.holds(c) {
            self.armed = false;
            return;
        }
        let s = self.s.holds(c);
        if self.armed && !s {
            self.violation = Some(i);
        }
        self.armed = s;
    }

    /// Index of the first configuration where `s` was lost before `s2`.
    pub fn violation(&self) -> Option<usize> {
        self.violation
    }

    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Whether `s unless s2` holds along the whole trace.
pub fn check_unless(t: &Trace, s: &StatePredicate, s2: &StatePredicate) -> bool {
    unless_violation(t, s, s2).is_none()
}

/// The first configuration index at which `s unless s2` fails.
pub fn unless_violation(t: &Trace, s: &StatePredicate, s2: &StatePredicate) -> Option<usize> {
    let mut m = UnlessMonitor::new(s, s2);
    t.walk(|i, c| {
        m.observe(i, c);
        m.holds()
    });
    m.violation()
}
