//! Exhaustive search for fair livelocks.
//!
//! The configuration graph is a Markov decision process: in each state the
//! scheduler picks a philosopher (an action) and the protocol's draws pick
//! among the action's outcomes. A run can avoid eating forever with positive
//! probability, while treating everyone fairly, exactly when some end
//! component is free of meals and uses every philosopher. An end component
//! is a set of states and actions where every outcome of every action stays
//! in the set and the graph is strongly connected. Within one, the
//! scheduler can cycle through all its actions forever with probability 1.
//! The explorer therefore reports the maximal end components of the
//! meal-free part of the graph that contain an action of every philosopher.
//!
//! Meal counters and guest-book clocks grow without bound, but the
//! protocol only compares guest-book entries at the same fork. States are
//! therefore normalised: meal counters are dropped, and each fork's
//! entries are replaced by dense ranks. A meal-free cycle never changes
//! either, so witnesses of the normalised graph are witnesses of the real
//! one.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use dp_protocol::{Action, Bias, Configuration, Draw, DrawSource, HungerModel};
use dp_topology::{PhilosopherId, Side};
use serde::Serialize;

use crate::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExploreCaps {
    pub max_states: usize,
    pub max_forks: usize,
    pub max_philosophers: usize,
}

impl Default for ExploreCaps {
    fn default() -> Self {
        ExploreCaps {
            max_states: 2_000_000,
            max_forks: 4,
            max_philosophers: 6,
        }
    }
}

/// A meal-free end component in which every philosopher takes steps.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Witness {
    pub states: usize,
    pub actions: usize,
    /// One configuration of the component (normalised).
    pub representative: Configuration,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExploreReport {
    pub reachable_states: usize,
    pub transitions: usize,
    /// Meal-free end components, fair or not.
    pub meal_free_components: usize,
    pub witnesses: Vec<Witness>,
}

/// Meal counters dropped, guest-book entries ranked per fork.
pub fn normalise(c: &mut Configuration) {
    for p in c.philosophers.iter_mut() {
        p.meals = 0;
    }
    for f in c.forks.iter_mut() {
        let values: BTreeSet<u64> = f.last_use.values().copied().filter(|&v| v > 0).collect();
        let rank = |v: u64| if v == 0 { 0 } else { values.range(..=v).count() as u64 };
        for v in f.last_use.values_mut() {
            *v = rank(*v);
        }
        f.last_use.retain(|_, v| *v > 0);
        f.use_clock = values.len() as u64;
    }
}

/// Follows a fixed list of outcomes and records what else could have come.
struct Branch<'a> {
    choice: Option<Draw>,
    bias: Bias,
    alternatives: &'a mut Vec<Draw>,
}

impl DrawSource for Branch<'_> {
    fn side(&mut self, _p: PhilosopherId, _bias: Bias) -> Side {
        *self.alternatives = [Side::Left, Side::Right]
            .into_iter()
            .filter(|&s| self.bias.weight(s).0 > 0)
            .map(Draw::Side)
            .collect();
        match self.choice.unwrap_or(self.alternatives[0]) {
            Draw::Side(s) => s,
            Draw::Label(_) => unreachable!(),
        }
    }

    fn label(&mut self, _p: PhilosopherId, m: u32) -> u32 {
        *self.alternatives = (1..=m).map(Draw::Label).collect();
        match self.choice.unwrap_or(self.alternatives[0]) {
            Draw::Label(l) => l,
            Draw::Side(_) => unreachable!(),
        }
    }
}

/// All `(successor, event action)` pairs of stepping `p` in `c`.
fn outcomes(c: &Configuration, p: PhilosopherId) -> Vec<(Configuration, Action)> {
    let bias = c.system().bias;
    let mut alternatives = Vec::new();
    let mut first = c.clone();
    let e = first.apply(
        p,
        &mut Branch {
            choice: None,
            bias,
            alternatives: &mut alternatives,
        },
    );
    let mut out = vec![(first, e.action)];
    let rest: Vec<Draw> = alternatives.iter().skip(1).copied().collect();
    for d in rest {
        let mut next = c.clone();
        let mut scratch = Vec::new();
        let e = next.apply(
            p,
            &mut Branch {
                choice: Some(d),
                bias,
                alternatives: &mut scratch,
            },
        );
        out.push((next, e.action));
    }
    out
}

struct StateIndex {
    states: Vec<Configuration>,
    by_hash: HashMap<u64, Vec<u32>>,
}

impl StateIndex {
    fn intern(&mut self, c: Configuration) -> (u32, bool) {
        let mut h = DefaultHasher::new();
        c.hash(&mut h);
        let bucket = self.by_hash.entry(h.finish()).or_default();
        if let Some(&i) = bucket.iter().find(|&&i| self.states[i as usize] == c) {
            return (i, false);
        }
        let i = self.states.len() as u32;
        bucket.push(i);
        self.states.push(c);
        (i, true)
    }
}

/// One scheduler action: philosopher `p` in some state, with its outcomes.
struct ActionEdge {
    philosopher: u32,
    targets: Vec<u32>,
    eats: bool,
}

pub fn explore_no_eat_cycles(initial: &Configuration, caps: ExploreCaps) -> Result<ExploreReport, AnalysisError> {
    let t = initial.topology();
    if t.fork_count() > caps.max_forks || t.philosopher_count() > caps.max_philosophers {
        return Err(AnalysisError::CapExceeded(format!(
            "{} forks / {} philosophers exceed the caps {} / {}",
            t.fork_count(),
            t.philosopher_count(),
            caps.max_forks,
            caps.max_philosophers
        )));
    }
    if initial.system().hunger != HungerModel::AlwaysHungry {
        return Err(AnalysisError::Domain(
            "exploration needs always-hungry philosophers (scheduled hunger depends on meal counts)".into(),
        ));
    }
    let n = t.philosopher_count();
    let mut index = StateIndex {
        states: Vec::new(),
        by_hash: HashMap::new(),
    };
    let mut start = initial.clone();
    normalise(&mut start);
    index.intern(start);
    let mut actions: Vec<Vec<ActionEdge>> = Vec::new();
    let mut queue = VecDeque::from([0u32]);
    let mut transitions = 0;
    while let Some(s) = queue.pop_front() {
        let c = index.states[s as usize].clone();
        let mut acts = Vec::with_capacity(n);
        for p in 0..n {
            let mut targets = Vec::new();
            let mut eats = false;
            for (mut next, action) in outcomes(&c, PhilosopherId(p)) {
                eats |= action == Action::FinishEat;
                normalise(&mut next);
                let (j, new) = index.intern(next);
                if new {
                    if index.states.len() > caps.max_states {
                        return Err(AnalysisError::CapExceeded(format!(
                            "more than {} reachable states (explored {} so far)",
                            caps.max_states,
                            actions.len()
                        )));
                    }
                    queue.push_back(j);
                }
                targets.push(j);
            }
            transitions += targets.len();
            acts.push(ActionEdge {
                philosopher: p as u32,
                targets,
                eats,
            });
        }
        if actions.len() <= s as usize {
            actions.resize_with(s as usize + 1, Vec::new);
        }
        actions[s as usize] = acts;
    }

    let components = meal_free_end_components(&actions);
    let mut witnesses = Vec::new();
    for comp in &components {
        let mut who = vec![false; n];
        let mut count = 0;
        for &(s, a) in &comp.actions {
            who[actions[s as usize][a].philosopher as usize] = true;
            count += 1;
        }
        if who.iter().all(|&w| w) {
            witnesses.push(Witness {
                states: comp.states.len(),
                actions: count,
                representative: index.states[comp.states[0] as usize].clone(),
            });
        }
    }
    Ok(ExploreReport {
        reachable_states: index.states.len(),
        transitions,
        meal_free_components: components.len(),
        witnesses,
    })
}

struct Component {
    states: Vec<u32>,
    actions: Vec<(u32, usize)>,
}

/// Maximal end components of the graph without meal-completing actions.
fn meal_free_end_components(actions: &[Vec<ActionEdge>]) -> Vec<Component> {
    let n = actions.len();
    let mut enabled: Vec<Vec<bool>> = actions.iter().map(|a| a.iter().map(|e| !e.eats).collect()).collect();
    let mut alive: Vec<bool> = enabled.iter().map(|e| e.iter().any(|&x| x)).collect();
    loop {
        let scc = strongly_connected(n, |s, out| {
            if alive[s] {
                for (a, e) in actions[s].iter().enumerate() {
                    if enabled[s][a] {
                        out.extend(e.targets.iter().filter(|&&t| alive[t as usize]).map(|&t| t as usize));
                    }
                }
            }
        });
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            for (a, e) in actions[s].iter().enumerate() {
                if enabled[s][a] && e.targets.iter().any(|&t| !alive[t as usize] || scc[t as usize] != scc[s]) {
                    enabled[s][a] = false;
                    changed = true;
                }
            }
            if !enabled[s].iter().any(|&x| x) {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            let mut groups: HashMap<usize, Component> = HashMap::new();
            let mut order = Vec::new();
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                let g = groups.entry(scc[s]).or_insert_with(|| {
                    order.push(scc[s]);
                    Component {
                        states: Vec::new(),
                        actions: Vec::new(),
                    }
                });
                g.states.push(s as u32);
                for (a, &on) in enabled[s].iter().enumerate() {
                    if on {
                        g.actions.push((s as u32, a));
                    }
                }
            }
            return order.into_iter().map(|k| groups.remove(&k).expect("grouped")).collect();
        }
    }
}

/// Iterative Tarjan; returns the component id of every vertex.
fn strongly_connected(n: usize, mut successors: impl FnMut(usize, &mut Vec<usize>)) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut out = Vec::new();
        successors(v, &mut out);
        adj.push(out);
    }
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}
