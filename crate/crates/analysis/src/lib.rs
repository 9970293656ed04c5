//! Analysis on top of the simulator: exact probability oracles, Monte Carlo
//! estimation of progress statements, checks of the composition rules,
//! verification of scripted counterexamples, and exhaustive search for
//! fair meal-free cycles on small instances.

mod estimate;
mod experiment;
mod explore;
mod lemma;
pub mod oracle;
mod predicate;
mod unless;
mod verify;

pub use dp_protocol::{isomorphism as configuration_isomorphic, Mapping};
pub use estimate::{
    estimate_progress, progress_trial, run_trials, wilson, EstimateReport, ProgressStatement, TrialOutcome, Z_95,
};
pub use experiment::{
    meal_experiment, meal_trial, no_progress, no_progress_trial, MealGoal, MealReport, MealTrial, NoProgressReport,
    NoProgressTrial,
};
pub use explore::{explore_no_eat_cycles, normalise, ExploreCaps, ExploreReport, Witness};
pub use lemma::{lemma_consistency, Composition, LemmaCheck};
pub use oracle::{
    distinct_value_enumerate, distinct_value_monte_carlo, distinct_value_probability, product_lower_bound,
    DistinctSample, ProductBound, ENUMERATION_CAP,
};
pub use predicate::{
    by_name, count_labelled_apart, courteous_neighbours, cycles_apart, cycles_apart_through, eating, eating_i,
    labelled_apart, parse_expression, trying, trying_i, waiting_on_courtesy, StatePredicate,
};
pub use unless::{check_unless, unless_violation, UnlessMonitor};
pub use verify::{
    entry_probability, verify_counterexample, EntryProbability, RoundCheck, VerificationReport, ENTRY_LEAF_CAP,
};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Domain(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("adversary `{0}` is not scripted")]
    NotScripted(String),
    #[error("verification aborted: {0}")]
    Verification(String),
    #[error(transparent)]
    Engine(#[from] dp_engine::EngineError),
    #[error(transparent)]
    Adversary(#[from] dp_adversary::AdversaryError),
    #[error(transparent)]
    Protocol(#[from] dp_protocol::ProtocolError),
    #[error(transparent)]
    Topology(#[from] dp_topology::TopologyError),
    #[error(transparent)]
    Isomorphism(#[from] dp_protocol::IsoError),
}
