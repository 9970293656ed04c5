//! Adversary strategies driven through the engine.

use dp_adversary::{
    AdversaryKind, AdversarySpec, Precondition, SegmentKind, StubbornnessBudget, DEFAULT_STALL_BOUND,
};
use dp_engine::{fairness_check, run, RunSpec, Simulation, Trace};
use dp_protocol::{isomorphism, Algorithm, HungerModel, System};
use dp_topology::{self as topo, PhilosopherId, Topology};

fn system(t: Topology, alg: Algorithm) -> System {
    System::new(t, alg).with_hunger(HungerModel::AlwaysHungry)
}

/// Runs with every draw the adversary cares about going its way.
fn forced_run(spec: &RunSpec) -> Trace {
    let mut sim = Simulation::new(spec).unwrap();
    while !sim.finished() {
        let p = sim.choose().unwrap();
        let forced = sim.adversary().forced_outcome(sim.history(), p);
        sim.apply(p, forced).unwrap();
    }
    sim.into_trace()
}

fn in_scope_meals(t: &Trace) -> usize {
    t.in_scope.iter().map(|&p| t.eat_count(p)).sum()
}

fn assert_rounds_isomorphic(t: &Trace) {
    let log = t.adversary_log.as_ref().unwrap();
    for r in &log.rounds {
        let (a, b) = (r.start.as_ref().unwrap(), r.end.as_ref().unwrap());
        assert!(isomorphism(a, b).unwrap().is_some(), "round {} not isomorphic", r.index);
    }
}

#[test]
fn triangle_script_repeats_rounds_without_meals() {
    let sys = system(topo::doubled_triangle(), Algorithm::Lr1);
    let spec = RunSpec::new(
        sys,
        AdversarySpec::new(AdversaryKind::StubbornLr1Triangle).with_snapshots(true),
        11,
        3_000,
    )
    .checked(true);
    let t = forced_run(&spec);
    let log = t.adversary_log.as_ref().unwrap();
    assert!(log.rounds.len() >= 3, "dev={:?}", &log.deviations[..log.deviations.len().min(3)]);
    assert_eq!(log.entry_successes, 1);
    assert!(log.deviations.is_empty(), "{:?}", log.deviations);
    assert_eq!(in_scope_meals(&t), 0);
    assert_rounds_isomorphic(&t);
}

#[test]
fn pendant_script_repeats_rounds_without_ring_meals() {
    for k in [3, 4, 6] {
        let sys = system(topo::ring_with_pendant(k).unwrap(), Algorithm::Lr1);
        let spec = RunSpec::new(
            sys,
            AdversarySpec::new(AdversaryKind::StubbornTheorem1 { ring_size: None }).with_snapshots(true),
            3,
            6_000,
        )
        .checked(true);
        let t = forced_run(&spec);
        let log = t.adversary_log.as_ref().unwrap();
        assert!(log.rounds.len() >= 5, "k={k}: rounds={} dev={:?}", log.rounds.len(), &log.deviations[..log.deviations.len().min(3)]);
        assert!(log.deviations.is_empty(), "k={k}: {:?}", log.deviations);
        assert_eq!(in_scope_meals(&t), 0, "k={k}");
        // The pendant philosopher keeps eating.
        assert!(t.eat_count(PhilosopherId(k)) >= log.rounds.len(), "k={k}");
        assert_rounds_isomorphic(&t);
    }
}

#[test]
fn theta_wave_rounds_close() {
    let sys = system(topo::theta(3, 3, 2).unwrap(), Algorithm::Lr2);
    let spec = RunSpec::new(
        sys,
        AdversarySpec::new(AdversaryKind::StubbornTheorem2 { lens: [3, 3, 2] }).with_snapshots(true),
        5,
        6_000,
    )
    .checked(true);
    let t = forced_run(&spec);
    let log = t.adversary_log.as_ref().unwrap();
    assert!(log.rounds.len() >= 3, "dev={:?}", &log.deviations[..log.deviations.len().min(3)]);
    assert!(log.deviations.is_empty(), "{:?}", log.deviations);
    assert_eq!(in_scope_meals(&t), 0);
    assert_rounds_isomorphic(&t);
    // Nobody ate, so no guest book was ever signed.
    assert!(t.terminal.forks.iter().all(|f| f.use_clock == 0 && f.last_use.is_empty()));
}

#[test]
fn fairized_script_recovers_from_bad_draws() {
    let sys = system(topo::ring_with_pendant(6).unwrap(), Algorithm::Lr1);
    let spec = RunSpec::new(
        sys,
        AdversarySpec::new(AdversaryKind::StubbornTheorem1 { ring_size: None })
            .fairized(StubbornnessBudget::default()),
        17,
        40_000,
    )
    .checked(true);
    let t = run(&spec).unwrap();
    let log = t.adversary_log.as_ref().unwrap();
    assert!(log.entry_attempts >= 1);
    // With honest draws something eventually goes wrong; fallback rotations
    // keep the schedule fair and every philosopher gets to eat.
    assert!(log.segments.iter().any(|s| s.kind != SegmentKind::Round));
    for p in 0..7 {
        assert!(t.eat_count(PhilosopherId(p)) > 0, "P{p} never ate");
    }
}

fn starver(precondition: Precondition) -> AdversarySpec {
    AdversarySpec::new(AdversaryKind::Gdp1Starver {
        starved: 0,
        feeder: None,
        stall_bound: DEFAULT_STALL_BOUND,
        precondition,
    })
}

#[test]
fn starver_locks_out_under_gdp1() {
    // P0 spans forks 0 and 1 and shares fork 1 with P1; nr(0) > nr(1).
    let sys = system(topo::ring(3).unwrap(), Algorithm::Gdp1).with_m(3);
    let spec = RunSpec::new(sys, starver(Precondition::Required), 1, 20_000)
        .with_initial_nr(vec![3, 1, 2])
        .checked(true);
    let t = run(&spec).unwrap();
    assert_eq!(t.eat_count(PhilosopherId(0)), 0);
    assert!(t.eat_count(PhilosopherId(1)) >= 100, "feeder ate {}", t.eat_count(PhilosopherId(1)));
    let log = t.adversary_log.as_ref().unwrap();
    assert_eq!(log.forced_schedules, 0);
    let w = log.rounds.iter().map(|r| r.len()).max().unwrap() as usize;
    assert!(fairness_check(&t, w + 1).is_empty());
}

#[test]
fn starver_gives_in_under_gdp2() {
    let sys = system(topo::ring(3).unwrap(), Algorithm::Gdp2).with_m(3);
    let spec = RunSpec::new(sys, starver(Precondition::Required), 1, 20_000).with_initial_nr(vec![3, 1, 2]);
    let t = run(&spec).unwrap();
    assert!(t.eat_count(PhilosopherId(0)) >= 1);
}

#[test]
fn starver_requires_its_label_order() {
    let sys = system(topo::ring(3).unwrap(), Algorithm::Gdp1).with_m(3);
    let spec = RunSpec::new(sys, starver(Precondition::Required), 1, 100).with_initial_nr(vec![1, 3, 2]);
    assert!(run(&spec).is_err());
}

#[test]
fn starver_setup_phase_arms_or_aborts() {
    // Under GDP1 labels change only on ties, so the order is settled early
    // and either arises or never will.
    let sys = system(topo::ring(3).unwrap(), Algorithm::Gdp1).with_m(3);
    let mut armed = 0;
    for seed in 0..20 {
        let spec = RunSpec::new(sys.clone(), starver(Precondition::AwaitSetup { max_steps: 2_000 }), seed, 10_000);
        match run(&spec) {
            Ok(t) => {
                armed += 1;
                let first = t.adversary_log.as_ref().unwrap().rounds.first().map_or(0, |r| r.start_step);
                assert!(t.events[first..].iter().all(|e| !(e.actor.0 == 0 && e.is_eating_event())));
            }
            Err(e) => assert!(e.to_string().contains("did not arise"), "{e}"),
        }
    }
    assert!(armed > 0);
}

#[test]
fn unknown_adversary_lists_the_names() {
    let err = AdversaryKind::from_name("nope", &[]).unwrap_err().to_string();
    assert!(err.contains("round-robin") && err.contains("gdp1-starver"), "{err}");
}
