mod pendant;
mod triangle;
mod wave;

pub use pendant::PendantScript;
pub use triangle::TriangleScript;
pub use wave::WaveScript;

use dp_protocol::{Algorithm, HungerModel, System};
use dp_topology::{ForkId, PhilosopherId, Topology};

use crate::AdversaryError;

fn mismatch(strategy: &str, reason: impl Into<String>) -> AdversaryError {
    AdversaryError::StrategyMismatch {
        strategy: strategy.into(),
        reason: reason.into(),
    }
}

/// Strict scripts insist on the algorithm and hunger model they were built
/// for; lenient ones (used as "matching" fair schedulers for other
/// algorithms) only insist on the topology.
fn check_protocol(strategy: &str, sys: &System, alg: Algorithm, strict: bool) -> Result<(), AdversaryError> {
    if !strict {
        return Ok(());
    }
    if sys.algorithm != alg {
        return Err(mismatch(strategy, format!("requires {alg}, configured {}", sys.algorithm)));
    }
    if sys.hunger != HungerModel::AlwaysHungry {
        return Err(mismatch(strategy, "requires always-hungry philosophers"));
    }
    Ok(())
}

/// Arcs joining forks `a` and `b`, in index order.
fn arcs_between(t: &Topology, a: ForkId, b: ForkId) -> Vec<PhilosopherId> {
    t.philosophers()
        .filter(|&p| {
            let e = t.arc(p);
            (e.left == a && e.right == b) || (e.left == b && e.right == a)
        })
        .collect()
}

/// The endpoint of `p` other than `f`.
fn other_end(t: &Topology, p: PhilosopherId, f: ForkId) -> ForkId {
    let e = t.arc(p);
    if e.left == f {
        e.right
    } else {
        e.left
    }
}
