use dp_adversary::{AdversaryKind, AdversarySpec};
use dp_analysis::{
    by_name, check_unless, eating, estimate_progress, lemma_consistency, parse_expression, progress_trial, trying,
    unless_violation, wilson, Composition, EstimateReport, ProgressStatement, StatePredicate,
};
use dp_engine::{run, RunSpec};
use dp_protocol::{Algorithm, System};
use dp_topology::{self as topo, PhilosopherId, Topology};

fn template(t: Topology, alg: Algorithm, kind: AdversaryKind, seed: u64) -> RunSpec {
    RunSpec::new(System::new(t, alg), AdversarySpec::new(kind), seed, 1)
}

fn ring4(kind: AdversaryKind) -> RunSpec {
    template(topo::ring(4).unwrap(), Algorithm::Gdp1, kind, 100)
}

fn never() -> StatePredicate {
    StatePredicate::always().not()
}

#[test]
fn wilson_reference_values() {
    let close = |a: f64, b: f64| (a - b).abs() < 5e-5;
    let (lo, hi) = wilson(5, 10);
    assert!(close(lo, 0.2366) && close(hi, 0.7634), "{lo} {hi}");
    let (lo, hi) = wilson(0, 10);
    assert!(lo == 0.0 && close(hi, 0.2775), "{hi}");
    let (lo, hi) = wilson(1000, 1000);
    assert!(close(lo, 0.99617) && hi == 1.0, "{lo}");
    assert_eq!(wilson(0, 0), (0.0, 1.0));
}

#[test]
fn gdp1_ring_trying_leads_to_eating() {
    let t = topo::ring(4).unwrap();
    let ps = ProgressStatement::new(trying(), eating(), 1.0).unwrap();
    let r = estimate_progress(&ps, &ring4(AdversaryKind::RoundRobin), 200, 5_000, 2).unwrap();
    assert_eq!(r.trials, 200);
    assert_eq!(r.successes, 200);
    assert_eq!(r.point_estimate, 1.0);
    assert_eq!(r.unless_violations, 0);
    let e = by_name(&t, "E").unwrap();
    let ee = ProgressStatement::new(e.clone(), e, 1.0).unwrap();
    let r = estimate_progress(&ee, &ring4(AdversaryKind::UniformRandom), 50, 10, 1).unwrap();
    assert_eq!(r.point_estimate, 1.0);
}

#[test]
fn unreachable_sources_are_skipped() {
    let ps = ProgressStatement::new(never(), eating(), 0.5).unwrap();
    let r = estimate_progress(&ps, &ring4(AdversaryKind::RoundRobin), 20, 50, 1).unwrap();
    assert_eq!((r.trials, r.skipped, r.successes), (0, 20, 0));
    assert!(ProgressStatement::new(trying(), eating(), 1.5).is_err());
}

#[test]
fn estimates_grow_with_the_horizon_trial_by_trial() {
    let ps = ProgressStatement::new(trying(), eating(), 1.0).unwrap();
    let spec = ring4(AdversaryKind::UniformRandom);
    let mut previous = 0;
    for h in [1u64, 3, 6, 12, 40] {
        let r = estimate_progress(&ps, &spec, 300, h, 2).unwrap();
        assert!(r.successes >= previous, "horizon {h}: {} < {previous}", r.successes);
        previous = r.successes;
    }
    for seed in 100..160 {
        let s = spec.with_seed(seed);
        let short = progress_trial(&ps, &s, 4).unwrap();
        let long = progress_trial(&ps, &s, 30).unwrap();
        if short.target_at.is_some() {
            assert_eq!(short.target_at, long.target_at);
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let ps = ProgressStatement::new(trying(), eating(), 1.0).unwrap();
    let spec = ring4(AdversaryKind::UniformRandom);
    let a = estimate_progress(&ps, &spec, 120, 6, 1).unwrap();
    let b = estimate_progress(&ps, &spec, 120, 6, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unless_holds_on_gdp_traces() {
    for kind in [AdversaryKind::RoundRobin, AdversaryKind::UniformRandom] {
        let s = template(topo::doubled_triangle(), Algorithm::Gdp1, kind.clone(), 4).with_horizon(3_000);
        assert!(check_unless(&run(&s).unwrap(), &trying(), &eating()));
        let s = template(topo::theta(2, 2, 2).unwrap(), Algorithm::Gdp2, kind, 4).with_horizon(3_000);
        let t = run(&s).unwrap();
        for i in 0..t.terminal.philosopher_count() {
            let p = PhilosopherId(i);
            assert!(check_unless(&t, &dp_analysis::trying_i(p), &dp_analysis::eating_i(p)));
        }
    }
}

#[test]
fn unless_fails_when_s_is_dropped_early() {
    // Eating never lasts: once someone eats, `E unless false` must break.
    let s = ring4(AdversaryKind::RoundRobin).with_horizon(200);
    let t = run(&s).unwrap();
    let at = unless_violation(&t, &eating(), &never()).expect("eating stops at some point");
    assert!(at > 0);
    assert!(!check_unless(&t, &eating(), &never()));
    // Reaching s2 disarms the check.
    assert!(check_unless(&t, &eating(), &StatePredicate::always()));
}

#[test]
fn lemma_arithmetic() {
    let r = |s, n| EstimateReport::from_counts("x", s, n, 0, 10);
    let ok = lemma_consistency(&[r(50, 100), r(50, 100), r(25, 100)], Composition::Concatenation).unwrap();
    assert!(ok.holds && (ok.rhs - 0.25).abs() < 1e-12);
    let bad = lemma_consistency(&[r(100, 100), r(100, 100), r(10, 100)], Composition::Concatenation).unwrap();
    assert!(!bad.holds);
    let union = lemma_consistency(&[r(40, 100), r(60, 100), r(45, 100)], Composition::Union).unwrap();
    assert!(union.holds && union.rhs == 0.4);
    let p = Composition::Persistence { target: 0.99 };
    let vacuous = lemma_consistency(&[r(0, 100), r(0, 100)], p).unwrap();
    assert!(vacuous.holds && !vacuous.premise);
    assert!(!lemma_consistency(&[r(10, 100), r(50, 100)], p).unwrap().holds);
    assert!(lemma_consistency(&[r(1, 2)], Composition::Union).is_err());
}

#[test]
fn gdp1_compositions_are_consistent() {
    let t = topo::ring(4).unwrap();
    let spec = ring4(AdversaryKind::UniformRandom);
    let est = |s: &str, d: &str, h: u64| {
        let ps = ProgressStatement::new(parse_expression(&t, s).unwrap(), parse_expression(&t, d).unwrap(), 0.0)
            .unwrap();
        estimate_progress(&ps, &spec, 400, h, 2).unwrap()
    };
    let chain = [est("T", "T&C_1|E", 8), est("T&C_1|E", "E", 8), est("T", "E", 16)];
    let c = lemma_consistency(&chain, Composition::Concatenation).unwrap();
    assert!(c.holds, "{c:?}");

    let union = [est("T_0", "E", 8), est("T_1", "E", 8), est("T_0|T_1", "E", 8)];
    let u = lemma_consistency(&union, Composition::Union).unwrap();
    assert!(u.holds, "{u:?}");

    let persistence = [est("T", "E", 8), est("T", "E", 2_000)];
    let p = lemma_consistency(&persistence, Composition::Persistence { target: 0.99 }).unwrap();
    assert!(p.premise && p.holds, "{p:?}");
}
