use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use dp_topology::{ForkId, PhilosopherId, Side, Topology};
use serde::{Deserialize, Serialize};

use crate::{Algorithm, Pc, ProtocolError};

/// Probability of drawing `left` in a random side choice, as an exact
/// fraction `left / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bias {
    pub left: u32,
    pub den: u32,
}

impl Bias {
    pub const FAIR: Bias = Bias { left: 1, den: 2 };

    pub fn new(left: u32, den: u32) -> Result<Bias, ProtocolError> {
        if den == 0 || left > den {
            return Err(ProtocolError::InvalidBias(format!("{left}/{den}")));
        }
        Ok(Bias { left, den })
    }

    /// Probability (numerator, denominator) that a draw yields `side`.
    pub fn weight(self, side: Side) -> (u32, u32) {
        match side {
            Side::Left => (self.left, self.den),
            Side::Right => (self.den - self.left, self.den),
        }
    }
}

impl Default for Bias {
    fn default() -> Self {
        Bias::FAIR
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.left, self.den)
    }
}

impl FromStr for Bias {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProtocolError::InvalidBias(s.to_string());
        let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
        let left = a.trim().parse().map_err(|_| bad())?;
        let den = b.trim().parse().map_err(|_| bad())?;
        Bias::new(left, den)
    }
}

/// When philosophers become hungry. The adversary never controls this.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub enum HungerModel {
    /// A thinking philosopher's next step is always `getHungry`.
    #[default]
    AlwaysHungry,
    /// `durations[p][j]` is the number of `think` steps philosopher `p`
    /// performs before its `j`-th meal. Once its list is exhausted the
    /// philosopher thinks forever.
    Scheduled(Vec<Vec<u32>>),
}

impl HungerModel {
    /// Think steps before meal number `meal` (0-based); `None` = forever.
    pub fn think_steps(&self, p: PhilosopherId, meal: u32) -> Option<u32> {
        match self {
            HungerModel::AlwaysHungry => Some(0),
            HungerModel::Scheduled(d) => d.get(p.0).and_then(|v| v.get(meal as usize)).copied(),
        }
    }
}

/// Which fork pickups of LR2/GDP2 are subject to the courtesy test `Cond`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Courtesy {
    /// Only the first fork (the `isFree(fork) and Cond(fork)` line); the
    /// second fork is taken whenever it is free.
    #[default]
    FirstFork,
    /// Both pickups. A failed test on the second fork is handled like a
    /// busy fork: release the first one and choose again.
    EveryFork,
}

impl fmt::Display for Courtesy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Courtesy::FirstFork => "first-fork",
            Courtesy::EveryFork => "every-fork",
        })
    }
}

impl FromStr for Courtesy {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "first-fork" => Ok(Courtesy::FirstFork),
            "every-fork" => Ok(Courtesy::EveryFork),
            other => Err(ProtocolError::Config(format!(
                "unknown courtesy scope `{other}` (expected first-fork or every-fork)"
            ))),
        }
    }
}

/// Static parameters shared by every configuration of one system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct System {
    pub topology: Topology,
    pub algorithm: Algorithm,
    /// Upper end of the relabel range `[1, m]`; only used by GDP1/GDP2.
    pub m: u32,
    pub eat_steps: u32,
    pub bias: Bias,
    pub hunger: HungerModel,
    #[serde(default)]
    pub courtesy: Courtesy,
}

impl System {
    pub fn new(topology: Topology, algorithm: Algorithm) -> System {
        let m = topology.fork_count() as u32;
        System {
            topology,
            algorithm,
            m,
            eat_steps: 1,
            bias: Bias::FAIR,
            hunger: HungerModel::AlwaysHungry,
            courtesy: Courtesy::FirstFork,
        }
    }

    pub fn with_m(mut self, m: u32) -> System {
        self.m = m;
        self
    }

    pub fn with_eat_steps(mut self, eat_steps: u32) -> System {
        self.eat_steps = eat_steps;
        self
    }

    pub fn with_bias(mut self, bias: Bias) -> System {
        self.bias = bias;
        self
    }

    pub fn with_hunger(mut self, hunger: HungerModel) -> System {
        self.hunger = hunger;
        self
    }

    pub fn with_courtesy(mut self, courtesy: Courtesy) -> System {
        self.courtesy = courtesy;
        self
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        self.topology.validate()?;
        let k = self.topology.fork_count();
        if self.algorithm.prioritized() && (self.m as usize) < k {
            return Err(ProtocolError::NrBoundTooSmall { m: self.m, k });
        }
        if self.eat_steps == 0 {
            return Err(ProtocolError::Config("eatSteps must be at least 1".into()));
        }
        if let HungerModel::Scheduled(d) = &self.hunger {
            if d.len() != self.topology.philosopher_count() {
                return Err(ProtocolError::Config(format!(
                    "hunger schedule lists {} philosophers, topology has {}",
                    d.len(),
                    self.topology.philosopher_count()
                )));
            }
        }
        Ok(())
    }
}

/// Per-fork state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ForkState {
    pub holder: Option<PhilosopherId>,
    pub nr: u32,
    pub requests: BTreeSet<PhilosopherId>,
    /// Number of meals signed at this fork.
    pub use_clock: u64,
    /// Value of `use_clock` at each philosopher's latest signature; absent
    /// entries read as 0 (never signed).
    pub last_use: BTreeMap<PhilosopherId, u64>,
}

impl ForkState {
    fn initial() -> ForkState {
        ForkState {
            holder: None,
            nr: 0,
            requests: BTreeSet::new(),
            use_clock: 0,
            last_use: BTreeMap::new(),
        }
    }

    pub fn last_use(&self, p: PhilosopherId) -> u64 {
        self.last_use.get(&p).copied().unwrap_or(0)
    }

    pub fn is_free(&self) -> bool {
        self.holder.is_none()
    }
}

/// Per-philosopher state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhilosopherState {
    pub pc: Pc,
    /// The side chosen as first fork, from the choice until release.
    pub committed: Option<Side>,
    pub holding_left: bool,
    pub holding_right: bool,
    pub hungry: bool,
    pub eat_steps_remaining: u32,
    /// Remaining `think` steps before getting hungry; `None` means the
    /// philosopher thinks forever.
    pub think_remaining: Option<u32>,
    /// Completed meals.
    pub meals: u32,
}

impl PhilosopherState {
    pub fn holds(&self, side: Side) -> bool {
        match side {
            Side::Left => self.holding_left,
            Side::Right => self.holding_right,
        }
    }

    pub(crate) fn set_holding(&mut self, side: Side, value: bool) {
        match side {
            Side::Left => self.holding_left = value,
            Side::Right => self.holding_right = value,
        }
    }

    pub fn held_count(&self) -> usize {
        self.holding_left as usize + self.holding_right as usize
    }
}

/// A complete snapshot of the system.
///
/// Equality and hashing consider the dynamic state only; the [`System`] is
/// shared by reference between all configurations of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Configuration {
    #[serde(skip)]
    pub(crate) system: Arc<System>,
    pub forks: Vec<ForkState>,
    pub philosophers: Vec<PhilosopherState>,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.forks == other.forks && self.philosophers == other.philosophers
    }
}

impl Eq for Configuration {}

impl Hash for Configuration {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.forks.hash(state);
        self.philosophers.hash(state);
    }
}

impl Configuration {
    /// The initial configuration: all forks free with `nr = 0`, all
    /// philosophers thinking.
    pub fn initial(system: System) -> Result<Configuration, ProtocolError> {
        Configuration::initial_shared(Arc::new(system))
    }

    pub fn initial_shared(system: Arc<System>) -> Result<Configuration, ProtocolError> {
        system.validate()?;
        let forks = vec![ForkState::initial(); system.topology.fork_count()];
        let philosophers = system
            .topology
            .philosophers()
            .map(|p| PhilosopherState {
                pc: Pc::Think,
                committed: None,
                holding_left: false,
                holding_right: false,
                hungry: false,
                eat_steps_remaining: 0,
                think_remaining: system.hunger.think_steps(p, 0),
                meals: 0,
            })
            .collect();
        Ok(Configuration {
            system,
            forks,
            philosophers,
        })
    }

    /// Overrides the fork labels, e.g. to start from a fixed priority order.
    /// Labels must lie in `[0, m]`.
    pub fn with_nr(mut self, labels: &[u32]) -> Result<Configuration, ProtocolError> {
        if labels.len() != self.forks.len() {
            return Err(ProtocolError::Config(format!(
                "expected {} fork labels, got {}",
                self.forks.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > self.system.m) {
            return Err(ProtocolError::Config(format!(
                "fork label {bad} exceeds m = {}",
                self.system.m
            )));
        }
        for (f, &l) in self.forks.iter_mut().zip(labels) {
            f.nr = l;
        }
        Ok(self)
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn shared_system(&self) -> &Arc<System> {
        &self.system
    }

    pub fn topology(&self) -> &Topology {
        &self.system.topology
    }

    pub fn algorithm(&self) -> Algorithm {
        self.system.algorithm
    }

    pub fn philosopher_count(&self) -> usize {
        self.philosophers.len()
    }

    pub fn fork(&self, f: ForkId) -> &ForkState {
        &self.forks[f.0]
    }

    pub fn philosopher(&self, p: PhilosopherId) -> &PhilosopherState {
        &self.philosophers[p.0]
    }

    pub fn pc(&self, p: PhilosopherId) -> Pc {
        self.philosophers[p.0].pc
    }

    pub fn holder(&self, f: ForkId) -> Option<PhilosopherId> {
        self.forks[f.0].holder
    }

    pub fn fork_of(&self, p: PhilosopherId, side: Side) -> ForkId {
        self.system.topology.fork_of(p, side)
    }

    /// The fork `p` has committed to (its first fork), if any.
    pub fn committed_fork(&self, p: PhilosopherId) -> Option<ForkId> {
        self.philosophers[p.0].committed.map(|s| self.fork_of(p, s))
    }

    /// The fork `p` will test after acquiring its committed fork.
    pub fn second_fork(&self, p: PhilosopherId) -> Option<ForkId> {
        self.philosophers[p.0]
            .committed
            .map(|s| self.fork_of(p, s.other()))
    }

    pub fn holds(&self, p: PhilosopherId, f: ForkId) -> bool {
        self.forks[f.0].holder == Some(p)
    }

    /// Forks currently held by `p`.
    pub fn held_forks(&self, p: PhilosopherId) -> Vec<ForkId> {
        let st = &self.philosophers[p.0];
        [Side::Left, Side::Right]
            .into_iter()
            .filter(|&s| st.holds(s))
            .map(|s| self.fork_of(p, s))
            .collect()
    }

    pub fn is_eating(&self, p: PhilosopherId) -> bool {
        self.philosophers[p.0].pc == Pc::Eat
    }

    pub fn is_trying(&self, p: PhilosopherId) -> bool {
        self.philosophers[p.0].pc.is_trying()
    }

    /// Every philosopher always has a next atomic step in this model: a
    /// thinking philosopher thinks or gets hungry, a blocked one performs a
    /// failed test, an eating one ticks.
    pub fn enabled(&self, p: PhilosopherId) -> bool {
        match self.philosophers[p.0].pc {
            Pc::Think
            | Pc::RequestLeft
            | Pc::RequestRight
            | Pc::Choose
            | Pc::TakeFirst
            | Pc::Relabel
            | Pc::TakeSecond
            | Pc::Eat
            | Pc::RemoveRequests
            | Pc::SignGuestBooks
            | Pc::ReleaseBoth => p.0 < self.philosophers.len(),
        }
    }

    /// The courtesy condition: no one else requests `f`, or everyone else
    /// requesting it has used it at least as recently as `p`.
    pub fn cond(&self, f: ForkId, p: PhilosopherId) -> bool {
        let fork = &self.forks[f.0];
        let mine = fork.last_use(p);
        fork.requests
            .iter()
            .filter(|&&q| q != p)
            .all(|&q| fork.last_use(q) >= mine)
    }
}
