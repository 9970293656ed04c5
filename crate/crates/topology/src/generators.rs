use crate::{Endpoints, Topology, TopologyError};

/// Orients an arc with its lower-numbered endpoint on the left.
fn ordered(a: usize, b: usize) -> Endpoints {
    Endpoints::new(a.min(b), a.max(b))
}

/// `size` forks on a cycle; philosopher `i` sits between fork `i` (left) and
/// fork `(i + 1) mod size` (right). `ring(2)` yields two parallel arcs.
pub fn ring(size: usize) -> Result<Topology, TopologyError> {
    if size < 2 {
        return Err(TopologyError::Invalid(format!(
            "a ring needs at least 2 forks, got {size}"
        )));
    }
    let arcs = (0..size).map(|i| Endpoints::new(i, (i + 1) % size)).collect();
    Topology::new(size, arcs)
}

/// Three forks, every pair joined by two parallel arcs.
///
/// Philosopher numbering (forks 0, 1, 2):
///
/// | philosopher | forks  |
/// |-------------|--------|
/// | 0           | {0, 2} |
/// | 1           | {1, 2} |
/// | 2           | {0, 1} |
/// | 3           | {0, 2} |
/// | 4           | {1, 2} |
/// | 5           | {0, 1} |
///
/// With fork 0 read as the fork first held in the classic six-philosopher
/// walkthrough, philosophers `0..6` play the roles `P1..P6` there.
pub fn doubled_triangle() -> Topology {
    let arcs = [(0, 2), (1, 2), (0, 1), (0, 2), (1, 2), (0, 1)]
        .into_iter()
        .map(|(a, b)| ordered(a, b))
        .collect();
    Topology::new(3, arcs).expect("doubled triangle is well formed")
}

/// A ring of `ring_size` forks plus a pendant fork `g = ring_size` joined to
/// fork 0 by one extra philosopher (index `ring_size`).
pub fn ring_with_pendant(ring_size: usize) -> Result<Topology, TopologyError> {
    if ring_size < 3 {
        return Err(TopologyError::Invalid(format!(
            "ring with pendant needs a ring of at least 3 forks, got {ring_size}"
        )));
    }
    let mut arcs: Vec<Endpoints> = (0..ring_size)
        .map(|i| Endpoints::new(i, (i + 1) % ring_size))
        .collect();
    arcs.push(ordered(0, ring_size));
    Topology::new(ring_size + 1, arcs)
}

/// Two hub forks (0 and 1) joined by three internally disjoint paths with
/// `len1`, `len2` and `len3` arcs. Internal forks are numbered from 2 along
/// the first path, then the second, then the third; arcs are listed path by
/// path from hub 0 towards hub 1.
pub fn theta(len1: usize, len2: usize, len3: usize) -> Result<Topology, TopologyError> {
    let lens = [len1, len2, len3];
    if lens.contains(&0) {
        return Err(TopologyError::Invalid(format!(
            "theta path lengths must be at least 1, got {lens:?}"
        )));
    }
    if lens.iter().filter(|&&l| l == 1).count() > 1 {
        return Err(TopologyError::Invalid(format!(
            "theta allows at most one path of length 1, got {lens:?}"
        )));
    }
    let mut next_fork = 2;
    let mut arcs = Vec::new();
    for len in lens {
        let mut prev = 0;
        for step in 0..len {
            let node = if step + 1 == len {
                1
            } else {
                next_fork += 1;
                next_fork - 1
            };
            arcs.push(ordered(prev, node));
            prev = node;
        }
    }
    Topology::new(next_fork, arcs)
}
