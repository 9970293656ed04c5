//! Named predicates over configurations.
//!
//! The trying section is `Pc::is_trying`: choose through the second-fork
//! test for LR1/GDP1, and additionally the request insertion steps for
//! LR2/GDP2.

use std::fmt;
use std::sync::Arc;

use dp_protocol::Configuration;
use dp_topology::{Cycle, PhilosopherId, Topology};

use crate::AnalysisError;

type Eval = dyn Fn(&Configuration) -> bool + Send + Sync;

/// A named, pure predicate over configurations.
#[derive(Clone)]
pub struct StatePredicate {
    name: String,
    eval: Arc<Eval>,
}

impl fmt::Debug for StatePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StatePredicate({})", self.name)
    }
}

impl fmt::Display for StatePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl StatePredicate {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Configuration) -> bool + Send + Sync + 'static) -> Self {
        StatePredicate {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn holds(&self, c: &Configuration) -> bool {
        (self.eval)(c)
    }

    pub fn and(&self, other: &StatePredicate) -> StatePredicate {
        let (a, b) = (self.clone(), other.clone());
        StatePredicate::new(format!("({a} ∩ {b})"), move |c| a.holds(c) && b.holds(c))
    }

    pub fn or(&self, other: &StatePredicate) -> StatePredicate {
        let (a, b) = (self.clone(), other.clone());
        StatePredicate::new(format!("({a} ∪ {b})"), move |c| a.holds(c) || b.holds(c))
    }

    pub fn not(&self) -> StatePredicate {
        let a = self.clone();
        StatePredicate::new(format!("¬{a}"), move |c| !a.holds(c))
    }

    pub fn always() -> StatePredicate {
        StatePredicate::new("true", |_| true)
    }
}

/// `T`: some philosopher is in its trying section.
pub fn trying() -> StatePredicate {
    StatePredicate::new("T", |c| (0..c.philosopher_count()).any(|p| c.is_trying(PhilosopherId(p))))
}

/// `E`: some philosopher is eating.
pub fn eating() -> StatePredicate {
    StatePredicate::new("E", |c| (0..c.philosopher_count()).any(|p| c.is_eating(PhilosopherId(p))))
}

/// `T_i`: philosopher `i` is in its trying section.
pub fn trying_i(i: PhilosopherId) -> StatePredicate {
    StatePredicate::new(format!("T_{}", i.0), move |c| c.is_trying(i))
}

/// `E_i`: philosopher `i` is eating.
pub fn eating_i(i: PhilosopherId) -> StatePredicate {
    StatePredicate::new(format!("E_{}", i.0), move |c| c.is_eating(i))
}

/// A cycle is *labelled apart* when every pair of forks adjacent along it
/// carries different `nr` values.
pub fn labelled_apart(c: &Configuration, cycle: &Cycle) -> bool {
    cycle.adjacent_fork_pairs().all(|(f, g)| c.fork(f).nr != c.fork(g).nr)
}

/// Number of cycles of `cycles` that are labelled apart.
pub fn count_labelled_apart(c: &Configuration, cycles: &[Cycle]) -> usize {
    cycles.iter().filter(|cy| labelled_apart(c, cy)).count()
}

/// `C_r`: at least `r` cycles of the topology are labelled apart.
pub fn cycles_apart(t: &Topology, r: usize) -> Result<StatePredicate, AnalysisError> {
    let cycles = t.all_cycles()?;
    Ok(StatePredicate::new(format!("C_{r}"), move |c| count_labelled_apart(c, &cycles) >= r))
}

/// `C_{i,r}`: at least `r` cycles through arc `i` are labelled apart.
pub fn cycles_apart_through(t: &Topology, i: PhilosopherId, r: usize) -> Result<StatePredicate, AnalysisError> {
    let cycles = t.cycles_through(i)?;
    Ok(StatePredicate::new(format!("C_{{{},{r}}}", i.0), move |c| {
        count_labelled_apart(c, &cycles) >= r
    }))
}

/// Whether `q` has eaten (signed a guest book) and its courtesy condition
/// currently fails at one of its forks.
pub fn waiting_on_courtesy(c: &Configuration, q: PhilosopherId) -> bool {
    let arc = c.topology().arc(q);
    let forks = [arc.left, arc.right];
    let has_eaten = forks.iter().any(|&f| c.fork(f).last_use(q) > 0);
    has_eaten && forks.iter().any(|&f| !c.cond(f, q))
}

/// `W_{i,s}`: at least `s` philosophers sharing a fork with `i` have eaten
/// and are held back by the courtesy condition. "Connected" is read as
/// sharing a fork directly.
pub fn courteous_neighbours(t: &Topology, i: PhilosopherId, s: usize) -> StatePredicate {
    let neighbours = t.neighbours(i);
    StatePredicate::new(format!("W_{{{},{s}}}", i.0), move |c| {
        neighbours.iter().filter(|&&q| waiting_on_courtesy(c, q)).count() >= s
    })
}

/// Looks a predicate up by name: `T`, `E`, `T_i`, `E_i`, `C_r`, `C_i_r`,
/// `W_i_s`, `true`. Used by configuration files.
pub fn by_name(t: &Topology, name: &str) -> Result<StatePredicate, AnalysisError> {
    let bad = || AnalysisError::Domain(format!("unknown predicate `{name}` (expected T, E, T_i, E_i, C_r, C_i_r, W_i_s, true)"));
    let parts: Vec<&str> = name.split('_').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let check_p = |i: usize| {
        if i < t.philosopher_count() {
            Ok(PhilosopherId(i))
        } else {
            Err(AnalysisError::Domain(format!("predicate `{name}` names a philosopher out of range")))
        }
    };
    match parts.as_slice() {
        ["true"] => Ok(StatePredicate::always()),
        ["T"] => Ok(trying()),
        ["E"] => Ok(eating()),
        ["T", i] => Ok(trying_i(check_p(num(i)?)?)),
        ["E", i] => Ok(eating_i(check_p(num(i)?)?)),
        ["C", r] => cycles_apart(t, num(r)?),
        ["C", i, r] => cycles_apart_through(t, check_p(num(i)?)?, num(r)?),
        ["W", i, s] => Ok(courteous_neighbours(t, check_p(num(i)?)?, num(s)?)),
        _ => Err(bad()),
    }
}

/// Parses a predicate expression: names joined by `|` (union) and `&`
/// (intersection, binding tighter), e.g. `T&C_1|E`.
pub fn parse_expression(t: &Topology, text: &str) -> Result<StatePredicate, AnalysisError> {
    let mut union: Option<StatePredicate> = None;
    for term in text.split('|') {
        let mut conj: Option<StatePredicate> = None;
        for atom in term.split('&') {
            let p = by_name(t, atom.trim())?;
            conj = Some(match conj {
                None => p,
                Some(q) => q.and(&p),
            });
        }
        let conj = conj.ok_or_else(|| AnalysisError::Domain(format!("empty predicate in `{text}`")))?;
        union = Some(match union {
            None => conj,
            Some(u) => u.or(&conj),
        });
    }
    union.ok_or_else(|| AnalysisError::Domain("empty predicate".into()))
}
