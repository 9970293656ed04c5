use std::collections::VecDeque;

use dp_protocol::*;
use dp_topology::{doubled_triangle, ring, ring_with_pendant, theta, ForkId, PhilosopherId, Side, Topology};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draw source fed from explicit queues.
#[derive(Default)]
struct Scripted {
    sides: VecDeque<Side>,
    labels: VecDeque<u32>,
}

impl DrawSource for Scripted {
    fn side(&mut self, _p: PhilosopherId, _bias: Bias) -> Side {
        self.sides.pop_front().expect("unexpected side draw")
    }
    fn label(&mut self, _p: PhilosopherId, _m: u32) -> u32 {
        self.labels.pop_front().expect("unexpected label draw")
    }
}

struct Seeded(ChaCha8Rng);

impl DrawSource for Seeded {
    fn side(&mut self, _p: PhilosopherId, bias: Bias) -> Side {
        if self.0.gen_ratio(bias.left, bias.den) {
            Side::Left
        } else {
            Side::Right
        }
    }
    fn label(&mut self, _p: PhilosopherId, m: u32) -> u32 {
        self.0.gen_range(1..=m)
    }
}

const P0: PhilosopherId = PhilosopherId(0);
const P1: PhilosopherId = PhilosopherId(1);

fn config(t: Topology, alg: Algorithm) -> Configuration {
    Configuration::initial(System::new(t, alg)).unwrap()
}

fn apply(c: &mut Configuration, p: PhilosopherId, draws: &mut Scripted) -> Action {
    let before = c.clone();
    let e = c.apply(p, draws);
    c.check_invariants().unwrap();
    check_transition(&before, &e, c).unwrap();
    e.action
}

#[test]
fn initial_configuration() {
    let c = config(ring(6).unwrap(), Algorithm::Lr1);
    assert_eq!(c.philosopher_count(), 6);
    assert!(c.forks.iter().all(|f| f.holder.is_none() && f.nr == 0));
    assert!(c.philosophers.iter().all(|p| p.pc == Pc::Think));
    c.check_invariants().unwrap();

    let err = Configuration::initial(System::new(ring(3).unwrap(), Algorithm::Gdp1).with_m(2)).unwrap_err();
    assert_eq!(err, ProtocolError::NrBoundTooSmall { m: 2, k: 3 });
    // m is irrelevant to the LR protocols
    assert!(Configuration::initial(System::new(ring(3).unwrap(), Algorithm::Lr1).with_m(0)).is_ok());

    let c = Configuration::initial(System::new(doubled_triangle(), Algorithm::Gdp2).with_m(3)).unwrap();
    assert!(c.forks.iter().all(|f| f.nr == 0));
}

#[test]
fn lr1_walkthrough() {
    let mut c = config(ring(3).unwrap(), Algorithm::Lr1);
    let mut d = Scripted::default();
    assert_eq!(apply(&mut c, P0, &mut d), Action::GetHungry);
    assert_eq!(c.pc(P0).line(Algorithm::Lr1), Some(2));
    d.sides.push_back(Side::Right);
    assert_eq!(apply(&mut c, P0, &mut d), Action::CommitRandom { side: Side::Right });
    assert_eq!(c.committed_fork(P0), Some(ForkId(1)));
    // line 3, committed fork free: taken, pc = 4
    assert_eq!(apply(&mut c, P0, &mut d), Action::TestAndTakeFirst { taken: true });
    assert_eq!(c.holder(ForkId(1)), Some(P0));
    assert_eq!(c.pc(P0).line(Algorithm::Lr1), Some(4));

    // P1 commits to fork 1 and spins there
    apply(&mut c, P1, &mut d);
    d.sides.push_back(Side::Left);
    apply(&mut c, P1, &mut d);
    assert_eq!(apply(&mut c, P1, &mut d), Action::TestAndTakeFirst { taken: false });
    assert_eq!(c.pc(P1), Pc::TakeFirst);

    // P2 takes fork 0 (its right), so P0's second test fails
    let p2 = PhilosopherId(2);
    apply(&mut c, p2, &mut d);
    d.sides.push_back(Side::Right);
    apply(&mut c, p2, &mut d);
    apply(&mut c, p2, &mut d);
    assert_eq!(c.holder(ForkId(0)), Some(p2));
    // line 4, other fork held: first fork released, pc = 2
    assert_eq!(apply(&mut c, P0, &mut d), Action::ReleaseFirst);
    assert_eq!(c.holder(ForkId(1)), None);
    assert_eq!(c.pc(P0).line(Algorithm::Lr1), Some(2));
    assert_eq!(c.philosopher(P0).committed, None);

    // P1 now gets fork 1 and then fork 2: eat and release
    assert_eq!(apply(&mut c, P1, &mut d), Action::TestAndTakeFirst { taken: true });
    assert_eq!(apply(&mut c, P1, &mut d), Action::TestAndTakeSecond);
    assert!(c.is_eating(P1));
    assert_eq!(apply(&mut c, P1, &mut d), Action::FinishEat);
    assert_eq!(apply(&mut c, P1, &mut d), Action::ReleaseBoth);
    assert_eq!(c.pc(P1), Pc::Think);
    assert_eq!(c.philosopher(P1).meals, 1);
    assert!(c.forks[1].holder.is_none() && c.forks[2].holder.is_none());
}

#[test]
fn eating_lasts_eat_steps() {
    let mut c = Configuration::initial(System::new(ring(2).unwrap(), Algorithm::Lr1).with_eat_steps(3)).unwrap();
    let mut d = Scripted::default();
    d.sides.push_back(Side::Left);
    for _ in 0..4 {
        apply(&mut c, P0, &mut d);
    }
    assert_eq!(c.philosopher(P0).eat_steps_remaining, 3);
    assert_eq!(apply(&mut c, P0, &mut d), Action::EatTick);
    assert_eq!(apply(&mut c, P0, &mut d), Action::EatTick);
    assert_eq!(apply(&mut c, P0, &mut d), Action::FinishEat);
    assert_eq!(apply(&mut c, P0, &mut d), Action::ReleaseBoth);
}

#[test]
fn gdp1_priority_and_relabel() {
    let sys = System::new(ring(3).unwrap(), Algorithm::Gdp1).with_m(6);
    let mut d = Scripted::default();

    // equal labels: ties go right
    let mut c = Configuration::initial(sys.clone()).unwrap();
    apply(&mut c, P0, &mut d);
    assert_eq!(apply(&mut c, P0, &mut d), Action::CommitPriority { side: Side::Right });

    // held fork gets the fresh label when both were equal (0 and 0)
    assert_eq!(apply(&mut c, P0, &mut d), Action::TestAndTakeFirst { taken: true });
    assert_eq!(c.pc(P0).line(Algorithm::Gdp1), Some(4));
    d.labels.push_back(5);
    assert_eq!(apply(&mut c, P0, &mut d), Action::Relabel { old: 0, new: 5 });
    assert_eq!(c.fork(ForkId(1)).nr, 5);
    assert_eq!(c.fork(ForkId(0)).nr, 0);

    // left.nr = 3 > right.nr = 1: commit left
    let mut c = Configuration::initial(sys.clone()).unwrap().with_nr(&[3, 1, 2]).unwrap();
    apply(&mut c, P0, &mut d);
    assert_eq!(apply(&mut c, P0, &mut d), Action::CommitPriority { side: Side::Left });
    apply(&mut c, P0, &mut d);
    // labels differ: nothing to relabel
    assert_eq!(apply(&mut c, P0, &mut d), Action::KeepNr);
    assert_eq!(c.forks.iter().map(|f| f.nr).collect::<Vec<_>>(), vec![3, 1, 2]);

    // failed second test returns to the choice line
    let mut c = Configuration::initial(sys).unwrap().with_nr(&[1, 2, 3]).unwrap();
    let p2 = PhilosopherId(2); // forks 2 (nr 3) and 0 (nr 1): first fork 2
    apply(&mut c, P1, &mut d); // P1: forks 1 (2), 2 (3) -> commits right = fork 2
    apply(&mut c, P1, &mut d);
    apply(&mut c, P1, &mut d);
    apply(&mut c, P1, &mut d);
    assert_eq!(c.holder(ForkId(2)), Some(P1));
    apply(&mut c, P0, &mut d); // P0: forks 0 (1), 1 (2) -> right = fork 1
    apply(&mut c, P0, &mut d);
    assert_eq!(c.committed_fork(P0), Some(ForkId(1)));
    apply(&mut c, P0, &mut d);
    assert_eq!(c.holder(ForkId(1)), Some(P0));
    apply(&mut c, P0, &mut d); // keepNr
    assert_eq!(apply(&mut c, P1, &mut d), Action::ReleaseFirst);
    assert_eq!(c.pc(P1).line(Algorithm::Gdp1), Some(2));
    apply(&mut c, p2, &mut d);
    assert_eq!(apply(&mut c, p2, &mut d), Action::CommitPriority { side: Side::Left });
}

#[test]
fn lr2_requests_and_guest_books() {
    let mut c = config(ring(2).unwrap(), Algorithm::Lr2);
    let mut d = Scripted::default();
    assert_eq!(apply(&mut c, P0, &mut d), Action::GetHungry);
    assert_eq!(apply(&mut c, P0, &mut d), Action::InsertRequest { side: Side::Left });
    assert!(c.fork(ForkId(0)).requests.contains(&P0));
    assert!(!c.fork(ForkId(1)).requests.contains(&P0));
    assert_eq!(apply(&mut c, P0, &mut d), Action::InsertRequest { side: Side::Right });
    assert_eq!(c.pc(P0).line(Algorithm::Lr2), Some(3));
    d.sides.push_back(Side::Left);
    apply(&mut c, P0, &mut d);
    apply(&mut c, P0, &mut d);
    apply(&mut c, P0, &mut d);
    assert!(c.is_eating(P0));
    assert_eq!(apply(&mut c, P0, &mut d), Action::FinishEat);
    assert_eq!(apply(&mut c, P0, &mut d), Action::RemoveRequests);
    assert!(c.forks.iter().all(|f| f.requests.is_empty()));
    assert_eq!(apply(&mut c, P0, &mut d), Action::SignGuestBooks);
    assert!(c.forks.iter().all(|f| f.use_clock == 1 && f.last_use(P0) == 1));
    assert_eq!(apply(&mut c, P0, &mut d), Action::ReleaseBoth);

    // P1 requests both forks; P0, who ate more recently, must now yield.
    for _ in 0..3 {
        apply(&mut c, P1, &mut d);
    }
    for _ in 0..3 {
        apply(&mut c, P0, &mut d);
    }
    d.sides.push_back(Side::Right);
    apply(&mut c, P0, &mut d);
    assert!(!c.cond(ForkId(1), P0));
    assert_eq!(apply(&mut c, P0, &mut d), Action::CondFail);
    assert_eq!(c.holder(ForkId(1)), None);
    assert!(c.cond(ForkId(1), P1));
}

#[test]
fn courtesy_on_the_second_fork() {
    for (courtesy, expected) in [
        (Courtesy::FirstFork, Action::TestAndTakeSecond),
        (Courtesy::EveryFork, Action::ReleaseFirst),
    ] {
        let sys = System::new(ring(3).unwrap(), Algorithm::Lr2).with_courtesy(courtesy);
        let mut c = Configuration::initial(sys).unwrap();
        let mut d = Scripted::default();
        // P0 eats once on forks 0 and 1.
        d.sides.push_back(Side::Left);
        while apply(&mut c, P0, &mut d) != Action::ReleaseBoth {}
        // P1 (forks 1, 2) asks for fork 1 and has never eaten.
        for _ in 0..3 {
            apply(&mut c, P1, &mut d);
        }
        // P0 gets its first fork (nobody else wants fork 0) ...
        d.sides.push_back(Side::Left);
        for _ in 0..5 {
            apply(&mut c, P0, &mut d);
        }
        assert_eq!(c.holder(ForkId(0)), Some(P0));
        assert!(!c.cond(ForkId(1), P0));
        // ... and the second one only if courtesy stops at the first fork.
        assert_eq!(apply(&mut c, P0, &mut d), expected, "{courtesy}");
    }
    assert_eq!("every-fork".parse::<Courtesy>().unwrap(), Courtesy::EveryFork);
    assert!("both".parse::<Courtesy>().is_err());
}

#[test]
fn cond_rule() {
    let mut c = config(ring(2).unwrap(), Algorithm::Lr2);
    let f = ForkId(0);
    // only p requests
    c.forks[0].requests.insert(P0);
    assert!(c.cond(f, P0));
    // both never ate: symmetric start is not a deadlock
    c.forks[0].requests.insert(P1);
    assert!(c.cond(f, P0) && c.cond(f, P1));
    // p used it at 5, q at 3: p must yield
    c.forks[0].use_clock = 5;
    c.forks[0].last_use.insert(P0, 5);
    c.forks[0].last_use.insert(P1, 3);
    assert!(!c.cond(f, P0));
    assert!(c.cond(f, P1));
}

#[test]
fn eating_event_is_finish_eat() {
    let ev = |action| StepEvent { actor: P0, action, draw: None };
    assert!(ev(Action::FinishEat).is_eating_event());
    assert!(!ev(Action::EatTick).is_eating_event());
    assert!(!ev(Action::TestAndTakeSecond).is_eating_event());
}

#[test]
fn scheduled_hunger() {
    let sys = System::new(ring(2).unwrap(), Algorithm::Lr1)
        .with_hunger(HungerModel::Scheduled(vec![vec![2], vec![]]));
    let mut c = Configuration::initial(sys).unwrap();
    let mut d = Scripted::default();
    assert_eq!(apply(&mut c, P0, &mut d), Action::Think);
    assert_eq!(apply(&mut c, P0, &mut d), Action::Think);
    assert_eq!(apply(&mut c, P0, &mut d), Action::GetHungry);
    for _ in 0..10 {
        assert_eq!(apply(&mut c, P1, &mut d), Action::Think);
    }
    d.sides.push_back(Side::Left);
    for _ in 0..5 {
        apply(&mut c, P0, &mut d);
    }
    assert_eq!(c.philosopher(P0).meals, 1);
    // schedule exhausted: thinks forever
    assert_eq!(apply(&mut c, P0, &mut d), Action::Think);
    assert_eq!(c.philosopher(P0).think_remaining, None);
}

#[test]
fn parsing_helpers() {
    assert_eq!("gdp2".parse::<Algorithm>().unwrap(), Algorithm::Gdp2);
    assert!("LR3".parse::<Algorithm>().is_err());
    assert_eq!("1/3".parse::<Bias>().unwrap(), Bias { left: 1, den: 3 });
    assert!("3/2".parse::<Bias>().is_err());
    assert!("0.5".parse::<Bias>().is_err());
    for alg in Algorithm::ALL {
        let lines: Vec<u8> = alg.lines().iter().map(|pc| pc.line(alg).unwrap()).collect();
        assert!(lines.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(lines[0], 1);
    }
}

fn topologies() -> impl Strategy<Value = Topology> {
    prop_oneof![
        Just(ring(2).unwrap()),
        Just(ring(3).unwrap()),
        Just(ring(4).unwrap()),
        Just(doubled_triangle()),
        Just(ring_with_pendant(3).unwrap()),
        Just(theta(2, 2, 2).unwrap()),
    ]
}

fn algorithms() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        Just(Algorithm::Lr1),
        Just(Algorithm::Lr2),
        Just(Algorithm::Gdp1),
        Just(Algorithm::Gdp2)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Every invariant holds after every step of arbitrary interleavings.
    #[test]
    fn invariants_hold_on_random_interleavings(
        t in topologies(),
        alg in algorithms(),
        eat_steps in 1u32..3,
        every_fork in any::<bool>(),
        schedule in prop::collection::vec(0usize..64, 1..600),
        seed in any::<u64>(),
    ) {
        let n = t.philosopher_count();
        let courtesy = if every_fork { Courtesy::EveryFork } else { Courtesy::FirstFork };
        let sys = System::new(t, alg).with_eat_steps(eat_steps).with_courtesy(courtesy);
        let mut c = Configuration::initial(sys).unwrap();
        let mut draws = Seeded(ChaCha8Rng::seed_from_u64(seed));
        let mut last_use_seen = Vec::new();
        for &s in &schedule {
            let p = PhilosopherId(s % n);
            prop_assert!(c.enabled(p));
            let before = c.clone();
            let e = c.apply(p, &mut draws);
            prop_assert_eq!(e.actor, p);
            if let Err(v) = c.check_invariants() { prop_assert!(false, "{}", v); }
            if let Err(v) = check_transition(&before, &e, &c) { prop_assert!(false, "{}", v); }
            last_use_seen.push(c.forks.iter().map(|f| f.use_clock).sum::<u64>());
        }
        prop_assert!(last_use_seen.windows(2).all(|w| w[0] <= w[1]));
    }

    /// The step function is a pure function of its inputs.
    #[test]
    fn step_is_deterministic(
        t in topologies(),
        alg in algorithms(),
        schedule in prop::collection::vec(0usize..64, 1..200),
        seed in any::<u64>(),
    ) {
        let n = t.philosopher_count();
        let c0 = Configuration::initial(System::new(t, alg)).unwrap();
        let run = || {
            let mut c = c0.clone();
            let mut draws = Seeded(ChaCha8Rng::seed_from_u64(seed));
            let mut events = Vec::new();
            for &s in &schedule {
                let (next, e) = step(&c, PhilosopherId(s % n), &mut draws);
                c = next;
                events.push(e);
            }
            (c, events)
        };
        let (a, ea) = run();
        let (b, eb) = run();
        prop_assert_eq!(a, b);
        prop_assert_eq!(ea, eb);
    }
}
