use std::fmt::Write as _;

use dp_protocol::Action;
use serde::Serialize;

use crate::{fairness_check, FairnessViolation, Trace};

/// Per-philosopher aggregates of one trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunMetrics {
    pub eat_count: Vec<usize>,
    /// Index of the step completing the first meal.
    pub first_eat_step: Vec<Option<usize>>,
    /// Longest stretch, in steps, from getting hungry to starting to eat
    /// (or to the end of the trace).
    pub max_hunger_duration: Vec<usize>,
    pub fairness_violations: Vec<FairnessViolation>,
}

/// Aggregates `t`; fairness is checked only when a window is given.
pub fn metrics(t: &Trace, fairness_window: Option<usize>) -> RunMetrics {
    let n = t.initial.philosopher_count();
    let mut eat_count = vec![0; n];
    let mut first_eat_step = vec![None; n];
    let mut max_hunger = vec![0; n];
    let mut hungry_since: Vec<Option<usize>> = (0..n)
        .map(|p| t.initial.philosophers[p].hungry.then_some(0))
        .collect();
    for (i, e) in t.events.iter().enumerate() {
        let p = e.actor.0;
        match e.action {
            Action::GetHungry => hungry_since[p] = Some(i),
            Action::TestAndTakeSecond => {
                if let Some(s) = hungry_since[p].take() {
                    max_hunger[p] = max_hunger[p].max(i - s);
                }
            }
            Action::FinishEat => {
                eat_count[p] += 1;
                first_eat_step[p].get_or_insert(i);
            }
            _ => {}
        }
    }
    let len = t.events.len();
    for (p, s) in hungry_since.iter().enumerate() {
        if let Some(s) = s {
            max_hunger[p] = max_hunger[p].max(len - s);
        }
    }
    RunMetrics {
        eat_count,
        first_eat_step,
        max_hunger_duration: max_hunger,
        fairness_violations: fairness_window.map(|w| fairness_check(t, w)).unwrap_or_default(),
    }
}

impl RunMetrics {
    /// `philosopher,eat_count,first_eat_step,max_hunger_duration`, one row
    /// per philosopher; a missing first meal is an empty field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("philosopher,eat_count,first_eat_step,max_hunger_duration\n");
        for p in 0..self.eat_count.len() {
            let first = self.first_eat_step[p].map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{p},{},{first},{}", self.eat_count[p], self.max_hunger_duration[p]);
        }
        out
    }
}
