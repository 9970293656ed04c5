use serde::{Deserialize, Serialize};

use crate::{ForkId, PhilosopherId, Topology};

/// Cycle enumeration is exponential; refuse topologies larger than this
/// unless the caller raises the cap explicitly.
pub const DEFAULT_CYCLE_FORK_CAP: usize = 16;

/// A simple cycle of the multigraph.
///
/// `arcs[i]` connects `forks[i]` and `forks[(i + 1) % len]`, so consecutive
/// entries of `forks` are the adjacent fork pairs along the cycle. Two
/// parallel arcs form a cycle of length 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub arcs: Vec<PhilosopherId>,
    pub forks: Vec<ForkId>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains_arc(&self, p: PhilosopherId) -> bool {
        self.arcs.contains(&p)
    }

    /// Pairs of forks that are consecutive along the cycle.
    pub fn adjacent_fork_pairs(&self) -> impl Iterator<Item = (ForkId, ForkId)> + '_ {
        let n = self.forks.len();
        (0..n).map(move |i| (self.forks[i], self.forks[(i + 1) % n]))
    }
}

/// Enumerates the simple cycles through arc `start`, walking from its left
/// endpoint to its right endpoint and back. With `only_higher`, every other
/// arc on the cycle must have a larger index than `start`, which makes
/// `start` the cycle's minimum and lets callers list each cycle once.
pub(crate) fn through(t: &Topology, start: PhilosopherId, only_higher: bool) -> Vec<Cycle> {
    let arc = t.arc(start);
    let mut out = Vec::new();
    let mut on_path = vec![false; t.fork_count()];
    on_path[arc.left.0] = true;
    on_path[arc.right.0] = true;
    let mut arcs = vec![start];
    let mut forks = vec![arc.left, arc.right];
    extend(
        t,
        start,
        only_higher,
        arc.left,
        &mut on_path,
        &mut arcs,
        &mut forks,
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn extend(
    t: &Topology,
    start: PhilosopherId,
    only_higher: bool,
    home: ForkId,
    on_path: &mut [bool],
    arcs: &mut Vec<PhilosopherId>,
    forks: &mut Vec<ForkId>,
    out: &mut Vec<Cycle>,
) {
    let here = *forks.last().expect("path is never empty");
    for q in t.philosophers() {
        if q == start || arcs.contains(&q) || (only_higher && q.0 < start.0) {
            continue;
        }
        let a = t.arc(q);
        let next = match a.side_of(here) {
            Some(side) => a.fork(side.other()),
            None => continue,
        };
        if next == home {
            let mut cycle_arcs = arcs.clone();
            cycle_arcs.push(q);
            out.push(Cycle {
                arcs: cycle_arcs,
                forks: forks.clone(),
            });
        } else if !on_path[next.0] {
            on_path[next.0] = true;
            arcs.push(q);
            forks.push(next);
            extend(t, start, only_higher, home, on_path, arcs, forks, out);
            forks.pop();
            arcs.pop();
            on_path[next.0] = false;
        }
    }
}
