//! Isomorphism of configurations under renaming of forks and philosophers.
//!
//! Two configurations are isomorphic when a bijection of forks and a
//! bijection of philosophers preserve incidence (each philosopher's two forks
//! map to the image philosopher's two forks, in either orientation) and carry
//! every piece of observable state across: program counters, holders,
//! commitments, `nr` labels, request lists and the relative order of
//! guest-book entries. Meal counters are history, not state, and are ignored.

use std::collections::BTreeMap;

use dp_topology::{ForkId, PhilosopherId, Side};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Configuration, Pc};

/// Default bound on backtracking nodes.
pub const DEFAULT_ISO_NODE_CAP: u64 = 5_000_000;

/// `forks[i]` is the image of fork `i`, `philosophers[j]` the image of
/// philosopher `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mapping {
    pub forks: Vec<ForkId>,
    pub philosophers: Vec<PhilosopherId>,
}

impl Mapping {
    pub fn identity(c: &Configuration) -> Mapping {
        Mapping {
            forks: c.topology().forks().collect(),
            philosophers: c.topology().philosophers().collect(),
        }
    }

    pub fn inverse(&self) -> Mapping {
        let mut forks = vec![ForkId(0); self.forks.len()];
        for (i, f) in self.forks.iter().enumerate() {
            forks[f.0] = ForkId(i);
        }
        let mut philosophers = vec![PhilosopherId(0); self.philosophers.len()];
        for (i, p) in self.philosophers.iter().enumerate() {
            philosophers[p.0] = PhilosopherId(i);
        }
        Mapping { forks, philosophers }
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &Mapping) -> Mapping {
        Mapping {
            forks: self.forks.iter().map(|f| other.forks[f.0]).collect(),
            philosophers: self.philosophers.iter().map(|p| other.philosophers[p.0]).collect(),
        }
    }

    /// Checks that this mapping really carries `a` onto `b`.
    pub fn verify(&self, a: &Configuration, b: &Configuration) -> bool {
        let k = a.forks.len();
        let n = a.philosophers.len();
        if self.forks.len() != k || self.philosophers.len() != n || b.forks.len() != k || b.philosophers.len() != n {
            return false;
        }
        let mut seen_f = vec![false; k];
        let mut seen_p = vec![false; n];
        for f in &self.forks {
            if f.0 >= k || std::mem::replace(&mut seen_f[f.0], true) {
                return false;
            }
        }
        for p in &self.philosophers {
            if p.0 >= n || std::mem::replace(&mut seen_p[p.0], true) {
                return false;
            }
        }
        let ta = a.topology();
        let tb = b.topology();
        for p in ta.philosophers() {
            let q = self.philosophers[p.0];
            let (x, y) = (ta.arc(p), tb.arc(q));
            let (l, r) = (self.forks[x.left.0], self.forks[x.right.0]);
            if !((l == y.left && r == y.right) || (l == y.right && r == y.left)) {
                return false;
            }
            if philosopher_signature(a, p) != philosopher_signature(b, q) {
                return false;
            }
            if a.committed_fork(p).map(|f| self.forks[f.0]) != b.committed_fork(q) {
                return false;
            }
        }
        ta.forks().all(|f| fork_matches(a, b, f, self.forks[f.0], &self.philosophers))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("configurations belong to different systems: {0}")]
    Incompatible(String),
    #[error("isomorphism search exceeded {cap} backtracking nodes")]
    CapExceeded { cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct PhilSig {
    pc: Pc,
    committed: bool,
    held: usize,
    hungry: bool,
    eat_steps_remaining: u32,
    think_remaining: Option<u32>,
}

fn philosopher_signature(c: &Configuration, p: PhilosopherId) -> PhilSig {
    let st = c.philosopher(p);
    PhilSig {
        pc: st.pc,
        committed: st.committed.is_some(),
        held: st.held_count(),
        hungry: st.hungry,
        eat_steps_remaining: st.eat_steps_remaining,
        think_remaining: st.think_remaining,
    }
}

fn fork_signature(c: &Configuration, f: ForkId) -> (u32, bool, usize, bool) {
    let fork = c.fork(f);
    (fork.nr, fork.holder.is_some(), fork.requests.len(), fork.use_clock > 0)
}

/// Dense rank of each adjacent philosopher's guest-book entry at `f`;
/// "never signed" is rank 0.
fn last_use_ranks(c: &Configuration, f: ForkId) -> BTreeMap<PhilosopherId, usize> {
    let fork = c.fork(f);
    let adjacent = c.topology().incident(f);
    let mut values: Vec<u64> = adjacent.iter().map(|&q| fork.last_use(q)).filter(|&v| v > 0).collect();
    values.sort_unstable();
    values.dedup();
    adjacent
        .into_iter()
        .map(|q| {
            let v = fork.last_use(q);
            let rank = if v == 0 { 0 } else { values.binary_search(&v).unwrap() + 1 };
            (q, rank)
        })
        .collect()
}

fn fork_matches(a: &Configuration, b: &Configuration, f: ForkId, g: ForkId, pmap: &[PhilosopherId]) -> bool {
    if fork_signature(a, f) != fork_signature(b, g) {
        return false;
    }
    let (fa, fb) = (a.fork(f), b.fork(g));
    if fa.holder.map(|h| pmap[h.0]) != fb.holder {
        return false;
    }
    if fa.requests.iter().any(|q| !fb.requests.contains(&pmap[q.0])) {
        return false;
    }
    let (ra, rb) = (last_use_ranks(a, f), last_use_ranks(b, g));
    ra.iter().all(|(q, rank)| rb.get(&pmap[q.0]) == Some(rank))
}

struct Search<'a> {
    a: &'a Configuration,
    b: &'a Configuration,
    order: Vec<PhilosopherId>,
    fmap: Vec<Option<ForkId>>,
    finv: Vec<Option<ForkId>>,
    pmap: Vec<Option<PhilosopherId>>,
    pused: Vec<bool>,
    nodes: u64,
    cap: u64,
}

impl Search<'_> {
    fn bind(&mut self, f: ForkId, g: ForkId, bound: &mut Vec<ForkId>) -> bool {
        match self.fmap[f.0] {
            Some(h) => h == g,
            None => {
                if self.finv[g.0].is_some() || fork_signature(self.a, f) != fork_signature(self.b, g) {
                    return false;
                }
                self.fmap[f.0] = Some(g);
                self.finv[g.0] = Some(f);
                bound.push(f);
                true
            }
        }
    }

    fn unbind(&mut self, bound: Vec<ForkId>) {
        for f in bound {
            let g = self.fmap[f.0].take().unwrap();
            self.finv[g.0] = None;
        }
    }

    fn solve(&mut self, depth: usize) -> Result<bool, IsoError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(IsoError::CapExceeded { cap: self.cap });
        }
        if depth == self.order.len() {
            return Ok(self.finish());
        }
        let p = self.order[depth];
        let sig = philosopher_signature(self.a, p);
        let arc = self.a.topology().arc(p);
        for q in self.b.topology().philosophers() {
            if self.pused[q.0] || philosopher_signature(self.b, q) != sig {
                continue;
            }
            let qa = self.b.topology().arc(q);
            for swap in [false, true] {
                let (l, r) = if swap { (qa.right, qa.left) } else { (qa.left, qa.right) };
                let mut bound = Vec::new();
                let ok = self.bind(arc.left, l, &mut bound) && self.bind(arc.right, r, &mut bound) && {
                    let img = |s: Side| if (s == Side::Left) != swap { Side::Left } else { Side::Right };
                    let st_a = self.a.philosopher(p);
                    let st_b = self.b.philosopher(q);
                    st_a.committed.map(img) == st_b.committed
                        && [Side::Left, Side::Right].iter().all(|&s| st_a.holds(s) == st_b.holds(img(s)))
                };
                if ok {
                    self.pmap[p.0] = Some(q);
                    self.pused[q.0] = true;
                    if self.solve(depth + 1)? {
                        return Ok(true);
                    }
                    self.pmap[p.0] = None;
                    self.pused[q.0] = false;
                }
                self.unbind(bound);
                if qa.left == qa.right {
                    break;
                }
            }
        }
        Ok(false)
    }

    /// All philosophers are mapped; complete the fork map for forks without
    /// arcs and check the fork-level state.
    fn finish(&mut self) -> bool {
        let k = self.fmap.len();
        let mut extra = Vec::new();
        for f in 0..k {
            if self.fmap[f].is_none() {
                let target = (0..k).find(|&g| {
                    self.finv[g].is_none()
                        && fork_signature(self.a, ForkId(f)) == fork_signature(self.b, ForkId(g))
                });
                match target {
                    Some(g) => {
                        self.fmap[f] = Some(ForkId(g));
                        self.finv[g] = Some(ForkId(f));
                        extra.push(ForkId(f));
                    }
                    None => {
                        self.unbind(extra);
                        return false;
                    }
                }
            }
        }
        let pmap: Vec<PhilosopherId> = self.pmap.iter().map(|p| p.unwrap()).collect();
        let ok = (0..k).all(|f| fork_matches(self.a, self.b, ForkId(f), self.fmap[f].unwrap(), &pmap));
        if !ok {
            self.unbind(extra);
        }
        ok
    }
}

/// Searches for a renaming carrying `a` onto `b`.
pub fn isomorphism(a: &Configuration, b: &Configuration) -> Result<Option<Mapping>, IsoError> {
    isomorphism_capped(a, b, DEFAULT_ISO_NODE_CAP)
}

pub fn isomorphism_capped(a: &Configuration, b: &Configuration, cap: u64) -> Result<Option<Mapping>, IsoError> {
    if a.algorithm() != b.algorithm() {
        return Err(IsoError::Incompatible(format!("{} vs {}", a.algorithm(), b.algorithm())));
    }
    let (ta, tb) = (a.topology(), b.topology());
    if ta.fork_count() != tb.fork_count() || ta.philosopher_count() != tb.philosopher_count() {
        return Ok(None);
    }
    let mut sa: Vec<PhilSig> = ta.philosophers().map(|p| philosopher_signature(a, p)).collect();
    let mut sb: Vec<PhilSig> = tb.philosophers().map(|p| philosopher_signature(b, p)).collect();
    sa.sort();
    sb.sort();
    let mut fa: Vec<_> = ta.forks().map(|f| fork_signature(a, f)).collect();
    let mut fb: Vec<_> = tb.forks().map(|f| fork_signature(b, f)).collect();
    fa.sort();
    fb.sort();
    if sa != sb || fa != fb {
        return Ok(None);
    }

    // Visit philosophers so that each one after the first of its component
    // shares a fork with an already visited one; this lets bound forks prune.
    let n = ta.philosopher_count();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let seed = (0..n).find(|&i| !placed[i]).unwrap();
        placed[seed] = true;
        order.push(PhilosopherId(seed));
        let mut head = order.len() - 1;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for q in ta.neighbours(p) {
                if !placed[q.0] {
                    placed[q.0] = true;
                    order.push(q);
                }
            }
        }
    }

    let k = ta.fork_count();
    let mut search = Search {
        a,
        b,
        order,
        fmap: vec![None; k],
        finv: vec![None; k],
        pmap: vec![None; n],
        pused: vec![false; n],
        nodes: 0,
        cap,
    };
    if search.solve(0)? {
        Ok(Some(Mapping {
            forks: search.fmap.iter().map(|f| f.unwrap()).collect(),
            philosophers: search.pmap.iter().map(|p| p.unwrap()).collect(),
        }))
    } else {
        Ok(None)
    }
}
