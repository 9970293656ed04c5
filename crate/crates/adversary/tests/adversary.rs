use std::sync::Arc;

use dp_adversary::{
    replay, Adversary, AdversaryError, AdversaryKind, AdversarySpec, History, Precondition, RoundRobin,
    StubbornnessBudget, UniformRandom, ADVERSARY_NAMES,
};
use dp_protocol::{Algorithm, Bias, Configuration, DrawSource, System};
use dp_topology::{self as topo, PhilosopherId, Side};
use proptest::prelude::*;

/// Alternates sides and counts labels up, so runs are varied but fixed.
struct Cycling(u32);

impl DrawSource for Cycling {
    fn side(&mut self, _p: PhilosopherId, _bias: Bias) -> Side {
        self.0 += 1;
        if self.0 % 3 == 0 {
            Side::Right
        } else {
            Side::Left
        }
    }

    fn label(&mut self, _p: PhilosopherId, m: u32) -> u32 {
        self.0 += 1;
        self.0 % m + 1
    }
}

fn sys(alg: Algorithm) -> Arc<System> {
    Arc::new(System::new(topo::ring(4).unwrap(), alg))
}

fn history(alg: Algorithm) -> History {
    History::new(Configuration::initial_shared(sys(alg)).unwrap())
}

#[test]
fn every_listed_name_parses() {
    for name in ADVERSARY_NAMES {
        let params: &[&str] = if *name == "stubborn-theorem2" { &["3", "3", "2"] } else { &[] };
        let kind = AdversaryKind::from_name(name, params).unwrap();
        assert_eq!(kind.name(), *name);
    }
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(matches!(
        AdversaryKind::from_name("stubborn-theorem2", &["3", "3"]),
        Err(AdversaryError::InvalidParameter(_))
    ));
    assert!(matches!(
        AdversaryKind::from_name("round-robin", &["1"]),
        Err(AdversaryError::InvalidParameter(_))
    ));
    assert!(matches!(
        AdversaryKind::from_name("stubborn-theorem1", &["x"]),
        Err(AdversaryError::InvalidParameter(_))
    ));
    match AdversaryKind::from_name("stubborn", &[]) {
        Err(AdversaryError::Unknown { available, .. }) => {
            for name in ADVERSARY_NAMES {
                assert!(available.contains(name));
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn fairizing_a_plain_scheduler_is_an_error() {
    let spec = AdversarySpec::new(AdversaryKind::RoundRobin).fairized(StubbornnessBudget::default());
    assert!(spec.build(&sys(Algorithm::Lr1), 0).is_err());
}

#[test]
fn scripts_check_their_setting() {
    // The triangle script wants the doubled triangle under LR1.
    let spec = AdversarySpec::new(AdversaryKind::StubbornLr1Triangle);
    assert!(matches!(spec.build(&sys(Algorithm::Lr1), 0), Err(AdversaryError::StrategyMismatch { .. })));
    let tri = Arc::new(System::new(topo::doubled_triangle(), Algorithm::Gdp1));
    assert!(spec.build(&tri, 0).is_err());
    assert!(spec.clone().lenient(true).build(&tri, 0).is_ok());
    // The starver needs labels to matter.
    let starver = AdversarySpec::new(AdversaryKind::Gdp1Starver {
        starved: 0,
        feeder: None,
        stall_bound: 8,
        precondition: Precondition::Required,
    });
    assert!(starver.build(&sys(Algorithm::Lr2), 0).is_err());
    assert!(starver.build(&sys(Algorithm::Gdp1), 0).is_ok());
}

#[test]
fn round_robin_cycles() {
    let mut a = RoundRobin::new();
    let h = history(Algorithm::Lr1);
    let picks: Vec<usize> = (0..9).map(|_| a.choose(&h).unwrap().0).collect();
    assert_eq!(picks, vec![0, 1, 2, 3, 0, 1, 2, 3, 0]);
}

#[test]
fn uniform_random_is_seeded_and_covers_everyone() {
    let h = history(Algorithm::Lr1);
    let run = |seed| {
        let mut a = UniformRandom::new(seed);
        (0..400).map(|_| a.choose(&h).unwrap().0).collect::<Vec<_>>()
    };
    assert_eq!(run(4), run(4));
    assert_ne!(run(4), run(5));
    let picks = run(4);
    for p in 0..4 {
        let n = picks.iter().filter(|&&q| q == p).count();
        assert!((60..=140).contains(&n), "P{p} picked {n} times");
    }
}

#[test]
fn replay_reproduces_the_history() {
    for alg in [Algorithm::Lr1, Algorithm::Lr2, Algorithm::Gdp1, Algorithm::Gdp2] {
        let mut h = history(alg);
        let mut draws = Cycling(0);
        for i in 0..500 {
            h.apply(PhilosopherId((i * 7 + i / 5) % 4), &mut draws);
        }
        assert_eq!(&replay(h.initial(), h.events()).unwrap(), h.current());
        let mid = h.configuration_at(250);
        assert_eq!(replay(&mid, &h.events()[250..]).unwrap(), *h.current());
    }
}

#[test]
fn replay_detects_tampering() {
    let mut h = history(Algorithm::Lr1);
    let mut draws = Cycling(0);
    for i in 0..40 {
        h.apply(PhilosopherId(i % 4), &mut draws);
    }
    let mut events = h.events().to_vec();
    // Replaying one step twice cannot match: its pc has moved on.
    let dup = events[0];
    events.insert(0, dup);
    assert!(replay(h.initial(), &events).is_err());
}

#[test]
fn union_bound_budget_values() {
    let b = StubbornnessBudget::default();
    // s = 1: no log term; s = 3 and 4 share ceil(log2) = 2.
    assert_eq!(b.retries(1, 1), 2);
    assert_eq!(b.retries(1, 3), 4);
    assert_eq!(b.retries(1, 4), 4);
    assert_eq!(b.retries(2, 5), 6);
    assert_eq!(StubbornnessBudget::UnionBound { points: Some(8) }.retries(3, 1), 7);
    assert_eq!(StubbornnessBudget::Linear { base: 2, per_round: 3 }.retries(4, 9), 14);
}

proptest! {
    #[test]
    fn union_bound_budget_meets_its_failure_bound(k in 1u64..40, s in 1usize..10_000) {
        // A stubborn point fails after n consecutive bad fair draws, with
        // probability 2^-n; s of them must fail with probability ≤ 2^-k.
        let n = StubbornnessBudget::default().retries(k, s);
        let log2_failure = (s as f64).log2() - n as f64;
        prop_assert!(log2_failure <= -(k as f64) + 1e-9);
    }

    #[test]
    fn budgets_are_monotone(k in 1u64..1_000, s in 1usize..100, base in 0u64..10, per in 1u64..5) {
        for b in [StubbornnessBudget::default(), StubbornnessBudget::Linear { base, per_round: per }] {
            prop_assert!(b.retries(k + 1, s) > b.retries(k, s));
        }
    }
}
