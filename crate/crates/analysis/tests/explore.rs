use dp_analysis::{explore_no_eat_cycles, ExploreCaps};
use dp_protocol::{Algorithm, Configuration, System};
use dp_topology as topo;

fn explore(c: &Configuration) -> dp_analysis::ExploreReport {
    let r = explore_no_eat_cycles(c, ExploreCaps::default()).unwrap();
    eprintln!(
        "{} states, {} transitions, {} components, {} witnesses",
        r.reachable_states,
        r.transitions,
        r.meal_free_components,
        r.witnesses.len()
    );
    r
}

#[test]
fn gdp1_ring3_with_distinct_labels_has_no_fair_livelock() {
    let c = Configuration::initial(System::new(topo::ring(3).unwrap(), Algorithm::Gdp1))
        .unwrap()
        .with_nr(&[1, 2, 3])
        .unwrap();
    assert!(explore(&c).witnesses.is_empty());
}

#[test]
fn lr1_doubled_triangle_has_a_fair_livelock() {
    let c = Configuration::initial(System::new(topo::doubled_triangle(), Algorithm::Lr1)).unwrap();
    assert!(!explore(&c).witnesses.is_empty());
}

#[test]
fn lr1_ring2_has_no_fair_livelock() {
    let c = Configuration::initial(System::new(topo::ring(2).unwrap(), Algorithm::Lr1)).unwrap();
    assert!(explore(&c).witnesses.is_empty());
}

#[test]
fn runs_of_a_certified_instance_keep_eating() {
    use dp_adversary::{AdversaryKind, AdversarySpec};
    use dp_engine::{run, RunSpec};
    let sys = System::new(topo::ring(3).unwrap(), Algorithm::Gdp1);
    for kind in [AdversaryKind::RoundRobin, AdversaryKind::UniformRandom] {
        for seed in 0..40 {
            let spec = RunSpec::new(sys.clone(), AdversarySpec::new(kind.clone()), seed, 2_000)
                .with_initial_nr(vec![1, 2, 3]);
            let t = run(&spec).unwrap();
            // Every window of 400 steps contains a meal.
            let meals: Vec<usize> = (0..t.len()).filter(|&i| t.events[i].is_eating_event()).collect();
            let mut last = 0;
            for &m in &meals {
                assert!(m - last < 400, "seed {seed}: gap {last}..{m}");
                last = m;
            }
            assert!(t.len() - last < 400, "seed {seed}: tail gap");
        }
    }
}

#[test]
fn normalising_ranks_guest_books() {
    let mut c = Configuration::initial(System::new(topo::ring(3).unwrap(), Algorithm::Gdp2)).unwrap();
    c.forks[0].use_clock = 9;
    c.forks[0].last_use.insert(dp_topology::PhilosopherId(0), 4);
    c.forks[0].last_use.insert(dp_topology::PhilosopherId(2), 9);
    c.philosophers[1].meals = 7;
    dp_analysis::normalise(&mut c);
    assert_eq!(c.forks[0].use_clock, 2);
    assert_eq!(c.forks[0].last_use.values().copied().collect::<Vec<_>>(), vec![1, 2]);
    assert_eq!(c.philosophers[1].meals, 0);
}

#[test]
fn oversized_instances_are_refused() {
    let c = Configuration::initial(System::new(topo::ring(5).unwrap(), Algorithm::Lr1)).unwrap();
    assert!(matches!(explore_no_eat_cycles(&c, ExploreCaps::default()), Err(dp_analysis::AnalysisError::CapExceeded(_))));
    let c = Configuration::initial(System::new(topo::doubled_triangle(), Algorithm::Lr1)).unwrap();
    let tiny = ExploreCaps { max_states: 100, ..ExploreCaps::default() };
    let e = explore_no_eat_cycles(&c, tiny).unwrap_err();
    assert!(e.to_string().contains("100"), "{e}");
}
