use dp_adversary::{AdversaryKind, AdversarySpec};
use dp_analysis::{entry_probability, verify_counterexample, AnalysisError};
use dp_engine::RunSpec;
use dp_protocol::{Algorithm, System};
use dp_topology::{self as topo, PhilosopherId, Topology};

fn spec(t: Topology, alg: Algorithm, kind: AdversaryKind, horizon: u64) -> RunSpec {
    RunSpec::new(System::new(t, alg), AdversarySpec::new(kind), 1, horizon).checked(true)
}

#[test]
fn triangle_counterexample_passes_three_rounds() {
    let s = spec(topo::doubled_triangle(), Algorithm::Lr1, AdversaryKind::StubbornLr1Triangle, 5_000);
    let r = verify_counterexample(&s, 3).unwrap();
    eprintln!(
        "initial phase: {} draws, {}; entry {} over {} leaves",
        r.initial_phase_forced_draws, r.initial_phase_probability, r.entry.probability, r.entry.leaves
    );
    assert!(r.passed, "{:?}", r.failures);
    assert_eq!(r.rounds.len(), 3);
    for round in &r.rounds {
        assert_eq!(round.in_scope_meals, 0);
        assert!(round.mapping.is_some());
    }
    assert_eq!(r.initial_phase_forced_draws, 2);
    assert_eq!(r.initial_phase_probability, "1/4");
    assert_eq!(r.entry.probability, "1/4");
}

#[test]
fn pendant_counterexample_passes_with_the_pendant_eating() {
    let s = spec(
        topo::ring_with_pendant(6).unwrap(),
        Algorithm::Lr1,
        AdversaryKind::StubbornTheorem1 { ring_size: None },
        10_000,
    );
    let r = verify_counterexample(&s, 2).unwrap();
    assert!(r.passed, "{:?}", r.failures);
    assert_eq!(r.rounds.len(), 2);
    assert!(!r.in_scope.contains(&PhilosopherId(6)));
    for round in &r.rounds {
        assert!(round.meals[6] >= 1, "pendant starved in round {}", round.index);
        assert_eq!(round.in_scope_meals, 0);
    }
}

#[test]
fn theta_counterexample_keeps_guest_books_empty() {
    let s = spec(
        topo::theta(3, 3, 2).unwrap(),
        Algorithm::Lr2,
        AdversaryKind::StubbornTheorem2 { lens: [3, 3, 2] },
        10_000,
    );
    let r = verify_counterexample(&s, 2).unwrap();
    assert!(r.passed, "{:?}", r.failures);
    assert!(r.rounds.iter().all(|round| round.guest_books_empty));
}

#[test]
fn unscripted_adversaries_are_refused() {
    let s = spec(topo::ring(3).unwrap(), Algorithm::Lr1, AdversaryKind::RoundRobin, 100);
    assert!(matches!(verify_counterexample(&s, 1), Err(AnalysisError::NotScripted(_))));
}

#[test]
fn too_short_a_horizon_is_reported_not_hidden() {
    let s = spec(topo::doubled_triangle(), Algorithm::Lr1, AdversaryKind::StubbornLr1Triangle, 5_000);
    let short = s.clone().with_horizon(12);
    match verify_counterexample(&short, 3) {
        Ok(r) => assert!(!r.passed && r.failures.iter().any(|f| f.contains("rounds completed"))),
        Err(e) => assert!(e.to_string().contains("verdict"), "{e}"),
    }
    assert!(entry_probability(&s).unwrap().accepted_leaves >= 1);
}
