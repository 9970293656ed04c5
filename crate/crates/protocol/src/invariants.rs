use dp_topology::{PhilosopherId, Side};
use thiserror::Error;

use crate::{Action, Configuration, Pc, StepEvent};

/// A broken protocol invariant; always indicates a simulator bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invariant `{invariant}` violated: {detail}")]
pub struct InvariantViolation {
    pub invariant: &'static str,
    pub detail: String,
}

fn violation(invariant: &'static str, detail: String) -> Result<(), InvariantViolation> {
    Err(InvariantViolation { invariant, detail })
}

/// Whether `p`'s request for the fork on `side` is currently inserted.
fn request_expected(pc: Pc, side: Side) -> bool {
    use Pc::*;
    match side {
        Side::Left => matches!(
            pc,
            RequestRight | Choose | TakeFirst | Relabel | TakeSecond | Eat | RemoveRequests
        ),
        Side::Right => matches!(pc, Choose | TakeFirst | Relabel | TakeSecond | Eat | RemoveRequests),
    }
}

impl Configuration {
    /// Checks every state invariant of the configuration.
    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let sys = self.system();
        let alg = sys.algorithm;
        let t = &sys.topology;

        for f in t.forks() {
            let fork = self.fork(f);
            if let Some(h) = fork.holder {
                let holder_side = t.arc(h).side_of(f);
                match holder_side {
                    Some(side) if self.philosopher(h).holds(side) => {}
                    _ => {
                        return violation(
                            "exclusivity",
                            format!("{f} records holder {h} which does not hold it"),
                        )
                    }
                }
            }
            if fork.nr > sys.m {
                return violation("nr range", format!("{f} has nr {} > m = {}", fork.nr, sys.m));
            }
            if let Some((q, v)) = fork.last_use.iter().find(|(_, &v)| v > fork.use_clock) {
                return violation(
                    "guest book",
                    format!("{f}: lastUse({q}) = {v} exceeds useClock {}", fork.use_clock),
                );
            }
            if let Some(q) = fork.requests.iter().find(|q| !t.arc(**q).touches(f)) {
                return violation("requests", format!("{f} lists non-adjacent requester {q}"));
            }
        }

        for p in t.philosophers() {
            let st = self.philosopher(p);
            let pc = st.pc;
            if pc.line(alg).is_none() {
                return violation("program counter", format!("{p} at {pc} which {alg} does not have"));
            }
            for side in [Side::Left, Side::Right] {
                let f = t.fork_of(p, side);
                if st.holds(side) != (self.holder(f) == Some(p)) {
                    return violation(
                        "exclusivity",
                        format!("{p} holding {side} disagrees with holder of {f}"),
                    );
                }
                if alg.courteous() && self.fork(f).requests.contains(&p) != request_expected(pc, side) {
                    return violation(
                        "requests",
                        format!("{p} at {pc}: request on {side} fork {f} is out of sync"),
                    );
                }
            }
            if st.held_count() != pc.forks_held() {
                return violation(
                    "hold bound",
                    format!("{p} at {pc} holds {} forks", st.held_count()),
                );
            }
            if pc.forks_held() == 1 {
                let side = st.committed.expect("checked below");
                if !st.holds(side) {
                    return violation("hold bound", format!("{p} holds its second fork first"));
                }
            }
            if st.committed.is_some() != pc.has_commitment() {
                return violation("commitment", format!("{p} at {pc} commitment {:?}", st.committed));
            }
            if (st.eat_steps_remaining > 0) != (pc == Pc::Eat) {
                return violation(
                    "eating terminates",
                    format!("{p} at {pc} with {} eat steps left", st.eat_steps_remaining),
                );
            }
            if !self.enabled(p) {
                return violation("totality", format!("{p} has no enabled step"));
            }
        }
        Ok(())
    }
}

/// Checks the invariants relating a configuration, one step of `event`,
/// and the successor configuration.
pub fn check_transition(
    before: &Configuration,
    event: &StepEvent,
    after: &Configuration,
) -> Result<(), InvariantViolation> {
    let p: PhilosopherId = event.actor;
    let t = before.topology();
    let arc = t.arc(p);

    let held = before.committed_fork(p);
    let other = before.second_fork(p);
    for f in t.forks() {
        let (b, a) = (before.fork(f), after.fork(f));
        if a.nr != b.nr {
            let labels_were_equal = other.is_some_and(|g| before.fork(g).nr == b.nr);
            let legal = matches!(event.action, Action::Relabel { .. })
                && held == Some(f)
                && before.holds(p, f)
                && labels_were_equal
                && (1..=after.system().m).contains(&a.nr);
            if !legal {
                return violation(
                    "relabel guard",
                    format!("{f} nr changed {} -> {} by {:?}", b.nr, a.nr, event.action),
                );
            }
        }
        for (q, &v) in &b.last_use {
            if a.last_use(*q) < v {
                return violation("guest book", format!("lastUse({q}, {f}) decreased"));
            }
        }
    }

    match event.action {
        Action::CommitPriority { side } => {
            let (mine, other) = (before.fork(arc.fork(side)).nr, before.fork(arc.fork(side.other())).nr);
            if mine < other {
                return violation("priority", format!("{p} committed to the lower label {mine} < {other}"));
            }
        }
        Action::ReleaseFirst => {
            if after.philosopher(p).held_count() != 0 {
                return violation("release discipline", format!("{p} kept a fork after a failed test"));
            }
        }
        _ => {}
    }
    Ok(())
}
