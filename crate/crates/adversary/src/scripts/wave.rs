//! Rotating blockade: every fork held, one philosopher waiting.
//!
//! On a connected graph with one more philosopher than forks (a theta graph,
//! for instance) the philosophers can be arranged so that every fork is held
//! by someone waiting for its second fork, and one extra philosopher `W` is
//! committed to a held fork `f`. An *advance* moves the blockade on:
//!
//! 1. the holder `X` of `f` finds its second fork `g` taken and releases `f`;
//! 2. `X` is redrawn until it is committed to `g` (a wrong draw picks `f`,
//!    which is free, so `X` takes it, finds `g` taken and puts it back);
//! 3. `W` takes `f`. Now `X` is the waiting philosopher.
//!
//! Nobody ever eats, so under LR2 every guest book stays empty and the
//! courtesy condition never gets in the way. A round is a run of advances
//! that has touched every philosopher and returned to a configuration
//! isomorphic to the one it started from.
//!
//! Entry: everyone draws once; the draws are usable when every fork has at
//! least one claimant and some fork has two.

use std::collections::{BTreeSet, VecDeque};

use dp_protocol::{isomorphism, Algorithm, Configuration, Pc, System};
use dp_topology::{theta, ForkId, PhilosopherId, Side, Topology};

use super::{check_protocol, mismatch, other_end};
use crate::script::{Directive as D, Fact, Goal, Mark, Script};
use crate::AdversaryError;

enum Phase {
    Start,
    Judge,
    Round {
        start: Option<Configuration>,
        visited: BTreeSet<PhilosopherId>,
        advances: usize,
    },
}

pub struct WaveScript {
    name: &'static str,
    topology: Topology,
    canonical: Vec<Option<ForkId>>,
    phase: Phase,
}

impl WaveScript {
    /// The blockade on `theta(len1, len2, len3)` under LR2.
    pub fn theta(sys: &System, lens: [usize; 3], strict: bool) -> Result<WaveScript, AdversaryError> {
        const NAME: &str = "stubborn-theorem2";
        let expected = theta(lens[0], lens[1], lens[2]).map_err(|e| mismatch(NAME, e.to_string()))?;
        if sys.topology != expected {
            return Err(mismatch(NAME, format!("topology is not theta{lens:?}")));
        }
        check_protocol(NAME, sys, Algorithm::Lr2, strict)?;
        Ok(WaveScript::build(NAME, &sys.topology))
    }

    /// The same blockade on any topology. It only ever gets going when the
    /// topology has more philosophers than forks.
    pub fn generic(sys: &System) -> WaveScript {
        WaveScript::build("stubborn-wave", &sys.topology)
    }

    fn build(name: &'static str, t: &Topology) -> WaveScript {
        WaveScript {
            name,
            topology: t.clone(),
            canonical: canonical_cover(t),
            phase: Phase::Start,
        }
    }

    fn round_cap(&self) -> usize {
        4 * self.topology.philosopher_count() + 8
    }

    fn entry(&self) -> Vec<D> {
        let mut plan = vec![
            D::Mark(Mark::EntryStart),
            D::Drain,
            D::expect("entry", vec![Fact::Quiescent]),
        ];
        for p in self.topology.philosophers() {
            plan.push(D::Draw {
                who: p,
                want: self.canonical[p.0],
            });
        }
        plan
    }

    fn judge(&mut self, c: &Configuration) -> Vec<D> {
        let t = &self.topology;
        let mut claimants: Vec<Vec<PhilosopherId>> = vec![Vec::new(); t.fork_count()];
        for p in t.philosophers() {
            if let Some(f) = c.committed_fork(p) {
                claimants[f.0].push(p);
            }
        }
        if claimants.iter().any(Vec::is_empty) || claimants.iter().all(|c| c.len() < 2) {
            return vec![D::Mark(Mark::EntryRejected(
                "commitments do not cover every fork with one to spare".into(),
            ))];
        }
        let mut plan = vec![D::Mark(Mark::EntryAccepted)];
        for (f, ps) in claimants.iter().enumerate() {
            plan.push(D::Step(ps[0]));
            plan.push(D::expect("setup", vec![Fact::Holder(ForkId(f), Some(ps[0]))]));
        }
        plan.push(D::expect("blockade", vec![Fact::AllHeld]));
        plan.push(D::Mark(Mark::SetupComplete));
        self.phase = Phase::Round {
            start: None,
            visited: BTreeSet::new(),
            advances: 0,
        };
        plan
    }

    /// One advance from the current configuration, or `None` if the
    /// configuration is not a blockade.
    fn advance(c: &Configuration) -> Option<(PhilosopherId, PhilosopherId, Vec<D>)> {
        let t = c.topology();
        let w = t.philosophers().find(|&p| {
            c.pc(p) == Pc::TakeFirst && c.committed_fork(p).is_some_and(|f| c.holder(f).is_some())
        })?;
        let f = c.committed_fork(w)?;
        let x = c.holder(f)?;
        let g = c.second_fork(x)?;
        if c.pc(x) != Pc::TakeSecond || c.holder(g).is_none() {
            return None;
        }
        let plan = vec![
            D::Step(x),
            D::expect("advance", vec![Fact::Holder(f, None), Fact::AtPc(x, Pc::Choose)]),
            D::stubborn(x, Goal::CommittedTo(g)),
            D::Step(w),
            D::expect("advance", vec![Fact::Holder(f, Some(w)), Fact::AllHeld]),
        ];
        Some((w, x, plan))
    }
}

impl Script for WaveScript {
    fn name(&self) -> String {
        self.name.into()
    }

    fn reset(&mut self) {
        self.phase = Phase::Start;
    }

    fn plan(&mut self, c: &Configuration) -> Vec<D> {
        let n = self.topology.philosopher_count();
        let cap = self.round_cap();
        match &mut self.phase {
            Phase::Start => {
                self.phase = Phase::Judge;
                self.entry()
            }
            Phase::Judge => self.judge(c),
            Phase::Round {
                start,
                visited,
                advances,
            } => {
                let mut plan = Vec::new();
                match start {
                    None => {
                        *start = Some(c.clone());
                        plan.push(D::Mark(Mark::RoundStart));
                    }
                    Some(s) => {
                        let closed = visited.len() == n && matches!(isomorphism(s, c), Ok(Some(_)));
                        if closed {
                            *start = None;
                            visited.clear();
                            *advances = 0;
                            return vec![D::Mark(Mark::RoundComplete)];
                        }
                        if *advances >= cap {
                            return vec![D::Abandon(format!("blockade did not close within {cap} advances"))];
                        }
                    }
                }
                match Self::advance(c) {
                    Some((w, x, steps)) => {
                        visited.insert(w);
                        visited.insert(x);
                        *advances += 1;
                        plan.extend(steps);
                        plan
                    }
                    None => vec![D::Abandon("configuration is not a blockade".into())],
                }
            }
        }
    }

    fn stubborn_points(&self) -> usize {
        self.round_cap()
    }

    fn in_scope(&self) -> Vec<PhilosopherId> {
        self.topology.philosophers().collect()
    }
}

/// A choice of one endpoint per philosopher covering every fork, with the
/// spare claim on the root of a spanning tree: tree arcs point away from the
/// root, one non-tree arc points at it, the remaining arcs point left.
fn canonical_cover(t: &Topology) -> Vec<Option<ForkId>> {
    let n = t.philosopher_count();
    // BFS from `root`, optionally only along `allowed` arcs; returns the arc
    // through which each fork was reached.
    let tree_from = |root: ForkId, allowed: Option<&BTreeSet<PhilosopherId>>| {
        let mut parent_arc: Vec<Option<PhilosopherId>> = vec![None; t.fork_count()];
        let mut seen = vec![false; t.fork_count()];
        seen[root.0] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for p in t.incident(u) {
                if allowed.is_some_and(|a| !a.contains(&p)) {
                    continue;
                }
                let v = other_end(t, p, u);
                if !seen[v.0] {
                    seen[v.0] = true;
                    parent_arc[v.0] = Some(p);
                    queue.push_back(v);
                }
            }
        }
        parent_arc
    };
    let in_tree: BTreeSet<PhilosopherId> = tree_from(ForkId(0), None).into_iter().flatten().collect();
    let Some(spare) = t.philosophers().find(|p| !in_tree.contains(p)) else {
        return vec![None; n];
    };
    let root = t.arc(spare).left;
    let tree = tree_from(root, Some(&in_tree));
    let mut cover: Vec<Option<ForkId>> = (0..n).map(|i| Some(t.arc(PhilosopherId(i)).fork(Side::Left))).collect();
    for (v, p) in tree.iter().enumerate() {
        if let Some(p) = p {
            cover[p.0] = Some(ForkId(v));
        }
    }
    cover[spare.0] = Some(root);
    cover
}
