//! Experiment configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Keys are case-sensitive and may appear at most once. Every error
//! names the offending line.
//!
//! ```text
//! # GDP1 on a ring of four forks under the random scheduler
//! command   = estimate
//! topology  = ring 4
//! algorithm = GDP1
//! adversary = uniform-random
//! seed      = 1
//! trials    = 1000
//! horizon   = 50000
//! experiment = meals
//! goal      = anyone
//! unless    = T -> E
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use dp_adversary::{AdversaryKind, AdversarySpec, Precondition, StubbornnessBudget, ADVERSARY_NAMES, DEFAULT_STALL_BOUND};
use dp_analysis::MealGoal;
use dp_engine::RunSpec;
use dp_protocol::{Algorithm, Bias, Courtesy, System};
use dp_topology::{self as topo, PhilosopherId, Topology};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{}{message}", location(.path, *.line))]
pub struct ConfigError {
    pub path: Option<PathBuf>,
    /// 1-based line number, when the problem is tied to one line.
    pub line: Option<usize>,
    pub message: String,
}

fn location(path: &Option<PathBuf>, line: Option<usize>) -> String {
    match (path, line) {
        (Some(p), Some(l)) => format!("{}:{l}: ", p.display()),
        (Some(p), None) => format!("{}: ", p.display()),
        (None, Some(l)) => format!("line {l}: "),
        (None, None) => String::new(),
    }
}

/// The five `dpsim` commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Estimate,
    Verify,
    Explore,
    Oracle,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::Run, Command::Estimate, Command::Verify, Command::Explore, Command::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Estimate => "estimate",
            Command::Verify => "verify",
            Command::Explore => "explore",
            Command::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}` (expected run, estimate, verify, explore or oracle)"))
    }
}

/// Fairness window for `run`: a fixed number of steps, or a multiple of the
/// longest round the adversary completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessWindow {
    Steps(usize),
    MaxRound { factor: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    /// `source -> target` progress estimate.
    Progress { source: String, target: String },
    /// Scripted adversary keeps its targets hungry for `rounds` rounds.
    NoProgress { rounds: usize },
    /// Meal goal within the horizon, with unless monitors.
    Meals {
        goal: MealGoal,
        unless: Vec<(String, String)>,
        stop_early: bool,
    },
    /// Concatenation along a chain of predicates, each link estimated at
    /// `horizon`, against the direct estimate at `links * horizon`.
    Concatenation { chain: Vec<String> },
    /// Union: `parts[i] -> target` and `(parts[0] | ...) -> target`.
    Union { parts: Vec<String>, target: String },
    /// Persistence: `source -> target` at `short_horizon` and at `horizon`.
    Persistence {
        source: String,
        target: String,
        short_horizon: u64,
        threshold: f64,
    },
}

/// Batch checks of the exact oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleChecks {
    /// Compare formula and enumeration for all `1 ≤ k ≤ m ≤ distinct_up_to`.
    pub distinct_up_to: Option<u64>,
    pub monte_carlo: Vec<(u32, usize)>,
    pub samples: u64,
    pub sigma_limit: f64,
    pub product_p: Vec<String>,
    pub product_m: u32,
    /// `m` standing in for the infinite product at the largest `p`.
    pub product_proxy_m: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Outputs {
    pub trace: String,
    pub metrics: String,
    pub report: String,
    pub estimates: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub path: Option<PathBuf>,
    pub command: Option<Command>,
    /// The topology line as written (echoed in reports).
    pub topology_source: String,
    pub system: Arc<System>,
    pub adversary: AdversarySpec,
    pub initial_nr: Option<Vec<u32>>,
    pub checked: bool,
    pub seed: u64,
    pub trials: u64,
    pub horizon: u64,
    pub workers: Option<usize>,
    pub experiment: Option<Experiment>,
    pub rounds: usize,
    pub fairness_window: Option<FairnessWindow>,
    pub max_states: usize,
    pub oracle: Option<OracleChecks>,
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn run_spec(&self) -> RunSpec {
        let mut spec = RunSpec::new((*self.system).clone(), self.adversary.clone(), self.seed, self.horizon)
            .checked(self.checked);
        spec.system = self.system.clone();
        if let Some(nr) = &self.initial_nr {
            spec = spec.with_initial_nr(nr.clone());
        }
        spec
    }
}

const KEYS: &[&str] = &[
    "command",
    "topology",
    "algorithm",
    "adversary",
    "fairize",
    "lenient",
    "precondition",
    "stallBound",
    "seed",
    "trials",
    "horizon",
    "workers",
    "m",
    "eatSteps",
    "drawBias",
    "courtesy",
    "initialNr",
    "checked",
    "experiment",
    "source",
    "target",
    "goal",
    "unless",
    "stopEarly",
    "chain",
    "parts",
    "shortHorizon",
    "threshold",
    "rounds",
    "fairnessWindow",
    "maxStates",
    "distinctUpTo",
    "monteCarlo",
    "samples",
    "sigmaLimit",
    "productP",
    "productM",
    "productProxyM",
    "trace",
    "metrics",
    "report",
    "estimates",
];

struct Entries {
    path: Option<PathBuf>,
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn err(&self, line: Option<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| self.err(Some(line), format!("`{key}` must be {what}, got `{v}`"))),
        }
    }

    fn positive<T: FromStr + PartialOrd + Default>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        let v = self.parse::<T>(key, "a positive integer")?.unwrap_or(default);
        if v <= T::default() {
            return Err(self.err(self.line(key), format!("`{key}` must be at least 1")));
        }
        Ok(v)
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(false),
            Some((_, "true" | "yes" | "on")) => Ok(true),
            Some((_, "false" | "no" | "off")) => Ok(false),
            Some((line, v)) => Err(self.err(Some(line), format!("`{key}` must be true or false, got `{v}`"))),
        }
    }

    fn required(&self, key: &str) -> Result<(usize, &str), ConfigError> {
        self.get(key)
            .ok_or_else(|| self.err(None, format!("missing required key `{key}`")))
    }
}

fn tokenize(text: &str, path: Option<&Path>) -> Result<Entries, ConfigError> {
    let mut entries = Entries {
        path: path.map(Path::to_path_buf),
        map: BTreeMap::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(entries.err(Some(line), format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(entries.err(Some(line), format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(entries.err(Some(line), format!("`{key}` has no value")));
        }
        if let Some((first, _)) = entries.map.get(key) {
            return Err(entries.err(Some(line), format!("`{key}` already set on line {first}")));
        }
        entries.map.insert(key.to_string(), (line, value.to_string()));
    }
    Ok(entries)
}

/// Lower-case with `-` and `_` removed, so `ringWithPendant`,
/// `ring-with-pendant` and `ring_with_pendant` all match.
fn normalise(name: &str) -> String {
    name.chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

fn parse_topology(value: &str, base: Option<&Path>) -> Result<Topology, String> {
    let mut words = value.split_whitespace();
    let name = normalise(words.next().unwrap_or(""));
    let args: Vec<&str> = words.collect();
    let nums = |n: usize| -> Result<Vec<usize>, String> {
        if args.len() != n {
            return Err(format!("`{name}` takes {n} integer parameter(s), got {}", args.len()));
        }
        args.iter()
            .map(|a| a.parse::<usize>().map_err(|_| format!("`{a}` is not a non-negative integer")))
            .collect()
    };
    let t = match name.as_str() {
        "ring" => topo::ring(nums(1)?[0]),
        "doubledtriangle" => {
            nums(0)?;
            Ok(topo::doubled_triangle())
        }
        "ringwithpendant" => topo::ring_with_pendant(nums(1)?[0]),
        "theta" => {
            let v = nums(3)?;
            topo::theta(v[0], v[1], v[2])
        }
        "file" => {
            let [file] = args.as_slice() else {
                return Err("`file` takes one path".into());
            };
            let path = match base {
                Some(dir) => dir.join(file),
                None => PathBuf::from(file),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            topo::parse_spec(&text)
        }
        _ => {
            return Err(format!(
                "unknown topology `{value}` (expected ring N, doubled-triangle, ring-with-pendant K, theta A B C or file PATH)"
            ))
        }
    };
    t.map_err(|e| e.to_string())
}

fn parse_adversary(value: &str) -> Result<AdversaryKind, dp_adversary::AdversaryError> {
    let mut words = value.split_whitespace();
    let name = words.next().unwrap_or("");
    let params: Vec<&str> = words.collect();
    let canonical = ADVERSARY_NAMES
        .iter()
        .find(|n| normalise(n) == normalise(name))
        .copied()
        .unwrap_or(name);
    AdversaryKind::from_name(canonical, &params)
}

fn parse_budget(value: &str) -> Result<Option<StubbornnessBudget>, String> {
    let words: Vec<&str> = value.split_whitespace().collect();
    let int = |s: &str| s.parse::<u64>().map_err(|_| format!("`{s}` is not an integer"));
    match words.as_slice() {
        ["none"] | ["false"] => Ok(None),
        ["union-bound"] | ["true"] => Ok(Some(StubbornnessBudget::UnionBound { points: None })),
        ["union-bound", s] => Ok(Some(StubbornnessBudget::UnionBound {
            points: Some(int(s)? as usize),
        })),
        ["linear", a, b] => Ok(Some(StubbornnessBudget::Linear {
            base: int(a)?,
            per_round: int(b)?,
        })),
        _ => Err(format!(
            "unknown stubbornness budget `{value}` (expected none, union-bound [POINTS] or linear BASE PER_ROUND)"
        )),
    }
}

fn parse_precondition(value: &str) -> Result<Precondition, String> {
    let words: Vec<&str> = value.split_whitespace().collect();
    match words.as_slice() {
        ["required"] => Ok(Precondition::Required),
        ["ignore"] => Ok(Precondition::Ignore),
        ["await", n] => n
            .parse()
            .map(|max_steps| Precondition::AwaitSetup { max_steps })
            .map_err(|_| format!("`{n}` is not an integer")),
        _ => Err(format!("unknown precondition `{value}` (expected required, await N or ignore)")),
    }
}

/// `a -> b; c -> d`; `*` in both sides expands to every philosopher index.
fn parse_unless(value: &str, n: usize) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for item in value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (s, s2) = item
            .split_once("->")
            .ok_or_else(|| format!("unless statement `{item}` must look like `S -> S2`"))?;
        let (s, s2) = (s.trim(), s2.trim());
        if s.contains('*') || s2.contains('*') {
            for i in 0..n {
                out.push((s.replace('*', &i.to_string()), s2.replace('*', &i.to_string())));
            }
        } else {
            out.push((s.to_string(), s2.to_string()));
        }
    }
    Ok(out)
}

fn parse_goal(value: &str) -> Result<MealGoal, String> {
    let words: Vec<&str> = value.split_whitespace().collect();
    match words.as_slice() {
        ["anyone"] => Ok(MealGoal::Anyone),
        ["everyone"] => Ok(MealGoal::Everyone),
        ["philosopher", i] => i
            .parse()
            .map(|i| MealGoal::Philosopher { id: PhilosopherId(i) })
            .map_err(|_| format!("`{i}` is not a philosopher index")),
        _ => Err(format!("unknown goal `{value}` (expected anyone, everyone or philosopher I)")),
    }
}

fn parse_window(value: &str) -> Result<FairnessWindow, String> {
    if let Ok(n) = value.parse::<usize>() {
        return if n == 0 {
            Err("fairnessWindow must be at least 1".into())
        } else {
            Ok(FairnessWindow::Steps(n))
        };
    }
    let compact: String = value.split_whitespace().collect();
    let factor = match compact.split_once('*') {
        None if compact == "max-round" => Some(1),
        Some(("max-round", k)) => k.parse::<usize>().ok().filter(|&k| k >= 1),
        _ => None,
    };
    factor
        .map(|factor| FairnessWindow::MaxRound { factor })
        .ok_or_else(|| format!("fairnessWindow must be a step count, `max-round` or `max-round * K`, got `{value}`"))
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: Some(path.to_path_buf()),
        line: None,
        message: format!("cannot read: {e}"),
    })?;
    parse_config(&text, Some(path))
}

/// Parses configuration text. `path` (if any) locates relative topology
/// files and is quoted in errors.
pub fn parse_config(text: &str, path: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
    let e = tokenize(text, path)?;
    let at = |key: &str| e.line(key);

    let command = match e.get("command") {
        None => None,
        Some((line, v)) => Some(v.parse::<Command>().map_err(|m| e.err(Some(line), m))?),
    };
    let oracle_only = command == Some(Command::Oracle);

    let (topology_source, topology) = match e.get("topology") {
        Some((line, v)) => {
            let base = path.and_then(Path::parent);
            (v.to_string(), parse_topology(v, base).map_err(|m| e.err(Some(line), m))?)
        }
        None if oracle_only => ("ring 2".to_string(), topo::ring(2).expect("ring(2)")),
        None => return Err(e.err(None, "missing required key `topology`")),
    };
    let algorithm = match e.get("algorithm") {
        Some((line, v)) => v.parse::<Algorithm>().map_err(|err| e.err(Some(line), err.to_string()))?,
        None if oracle_only => Algorithm::Lr1,
        None => return Err(e.err(None, "missing required key `algorithm`")),
    };
    let mut system = System::new(topology, algorithm);
    if let Some(m) = e.parse::<u32>("m", "a non-negative integer")? {
        system = system.with_m(m);
    }
    system = system.with_eat_steps(e.positive("eatSteps", 1u32)?);
    if let Some((line, v)) = e.get("drawBias") {
        let bias = v.parse::<Bias>().map_err(|err| e.err(Some(line), err.to_string()))?;
        system = system.with_bias(bias);
    }
    if let Some((line, v)) = e.get("courtesy") {
        system = system.with_courtesy(v.parse::<Courtesy>().map_err(|err| e.err(Some(line), err.to_string()))?);
    }
    if let Err(err) = system.validate() {
        let line = at("m").or(at("eatSteps")).or(at("algorithm"));
        return Err(e.err(line, err.to_string()));
    }
    let n = system.topology.philosopher_count();
    let k = system.topology.fork_count();

    let mut kind = match e.get("adversary") {
        Some((line, v)) => parse_adversary(v).map_err(|err| e.err(Some(line), err.to_string()))?,
        None if oracle_only => AdversaryKind::RoundRobin,
        None => return Err(e.err(None, "missing required key `adversary`")),
    };
    if let AdversaryKind::Gdp1Starver {
        precondition,
        stall_bound,
        ..
    } = &mut kind
    {
        if let Some((line, v)) = e.get("precondition") {
            *precondition = parse_precondition(v).map_err(|m| e.err(Some(line), m))?;
        }
        *stall_bound = e.positive("stallBound", DEFAULT_STALL_BOUND)?;
    } else {
        for key in ["precondition", "stallBound"] {
            if let Some(line) = at(key) {
                return Err(e.err(Some(line), format!("`{key}` only applies to gdp1-starver")));
            }
        }
    }
    let mut adversary = AdversarySpec::new(kind).lenient(e.flag("lenient")?);
    if let Some((line, v)) = e.get("fairize") {
        if let Some(budget) = parse_budget(v).map_err(|m| e.err(Some(line), m))? {
            adversary = adversary.fairized(budget);
        }
    }

    let initial_nr = match e.get("initialNr") {
        None => None,
        Some((line, v)) => {
            let labels: Vec<u32> = v
                .split_whitespace()
                .map(|w| w.parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| e.err(Some(line), format!("`initialNr` must list integers, got `{v}`")))?;
            if labels.len() != k {
                return Err(e.err(Some(line), format!("`initialNr` lists {} labels for {k} forks", labels.len())));
            }
            if let Some(bad) = labels.iter().find(|&&l| l > system.m) {
                return Err(e.err(Some(line), format!("label {bad} exceeds m = {}", system.m)));
            }
            Some(labels)
        }
    };

    let system = Arc::new(system);
    let seed = e.parse::<u64>("seed", "a non-negative integer")?.unwrap_or(0);
    // Build once so that strategy/topology mismatches surface as config errors.
    if !oracle_only {
        let mut probe = RunSpec::new((*system).clone(), adversary.clone(), seed, 1);
        if let Some(nr) = &initial_nr {
            probe = probe.with_initial_nr(nr.clone());
        }
        probe
            .initial_configuration()
            .map_err(|err| e.err(at("initialNr"), err.to_string()))?;
        adversary
            .build(&system, seed)
            .map_err(|err| e.err(at("adversary"), err.to_string()))?;
    }

    let experiment = parse_experiment(&e, n)?;
    let oracle = if oracle_only { Some(parse_oracle(&e)?) } else { None };

    let output = |key: &str, default: &str| e.get(key).map_or(default.to_string(), |(_, v)| v.to_string());
    Ok(ExperimentConfig {
        path: path.map(Path::to_path_buf),
        command,
        topology_source,
        system,
        adversary,
        initial_nr,
        checked: e.flag("checked")?,
        seed,
        trials: e.positive("trials", 1u64)?,
        horizon: e.positive("horizon", 10_000u64)?,
        workers: e.parse::<usize>("workers", "a positive integer")?,
        experiment,
        rounds: e.positive("rounds", 3usize)?,
        fairness_window: match e.get("fairnessWindow") {
            None => None,
            Some((line, v)) => Some(parse_window(v).map_err(|m| e.err(Some(line), m))?),
        },
        max_states: e.positive("maxStates", dp_analysis::ExploreCaps::default().max_states)?,
        oracle,
        outputs: Outputs {
            trace: output("trace", "trace.tsv"),
            metrics: output("metrics", "metrics.csv"),
            report: output("report", "report.json"),
            estimates: output("estimates", "estimates.csv"),
        },
    })
}

fn parse_experiment(e: &Entries, n: usize) -> Result<Option<Experiment>, ConfigError> {
    let Some((line, kind)) = e.get("experiment") else {
        return Ok(None);
    };
    let text = |key: &str| e.required(key).map(|(_, v)| v.to_string());
    let list = |key: &str| -> Result<Vec<String>, ConfigError> {
        let (l, v) = e.required(key)?;
        let items: Vec<String> = v.split("->").map(|s| s.trim().to_string()).collect();
        if items.iter().any(String::is_empty) {
            return Err(e.err(Some(l), format!("`{key}` has an empty predicate")));
        }
        Ok(items)
    };
    let exp = match kind {
        "progress" => Experiment::Progress {
            source: text("source")?,
            target: text("target")?,
        },
        "no-progress" => Experiment::NoProgress {
            rounds: e.positive("rounds", 20usize)?,
        },
        "meals" => Experiment::Meals {
            goal: match e.get("goal") {
                None => MealGoal::Anyone,
                Some((l, v)) => parse_goal(v).map_err(|m| e.err(Some(l), m))?,
            },
            unless: match e.get("unless") {
                None => Vec::new(),
                Some((l, v)) => parse_unless(v, n).map_err(|m| e.err(Some(l), m))?,
            },
            stop_early: e.flag("stopEarly")?,
        },
        "concatenation" => {
            let chain = list("chain")?;
            if chain.len() < 3 {
                return Err(e.err(e.line("chain"), "`chain` needs at least three predicates"));
            }
            Experiment::Concatenation { chain }
        }
        "union" => {
            let parts: Vec<String> = text("parts")?.split(',').map(|s| s.trim().to_string()).collect();
            if parts.len() < 2 || parts.iter().any(String::is_empty) {
                return Err(e.err(e.line("parts"), "`parts` needs at least two comma-separated predicates"));
            }
            Experiment::Union {
                parts,
                target: text("target")?,
            }
        }
        "persistence" => {
            let threshold = e.parse::<f64>("threshold", "a probability")?.unwrap_or(0.99);
            if !(0.0..=1.0).contains(&threshold) {
                return Err(e.err(e.line("threshold"), "`threshold` must lie in [0, 1]"));
            }
            Experiment::Persistence {
                source: text("source")?,
                target: text("target")?,
                short_horizon: e.positive("shortHorizon", 10u64)?,
                threshold,
            }
        }
        other => {
            return Err(e.err(
                Some(line),
                format!(
                    "unknown experiment `{other}` (expected progress, no-progress, meals, concatenation, union or persistence)"
                ),
            ))
        }
    };
    Ok(Some(exp))
}

fn parse_oracle(e: &Entries) -> Result<OracleChecks, ConfigError> {
    let monte_carlo = match e.get("monteCarlo") {
        None => Vec::new(),
        Some((line, v)) => v
            .split(',')
            .map(|pair| {
                let nums: Vec<&str> = pair.split_whitespace().collect();
                match nums.as_slice() {
                    [m, k] => Some((m.parse().ok()?, k.parse().ok()?)),
                    _ => None,
                }
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| e.err(Some(line), format!("`monteCarlo` must be comma-separated `m k` pairs, got `{v}`")))?,
    };
    Ok(OracleChecks {
        distinct_up_to: e.parse::<u64>("distinctUpTo", "a positive integer")?,
        monte_carlo,
        samples: e.positive("samples", 100_000u64)?,
        sigma_limit: e.parse::<f64>("sigmaLimit", "a number")?.unwrap_or(3.0),
        product_p: e
            .get("productP")
            .map(|(_, v)| v.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default(),
        product_m: e.positive("productM", 30u32)?,
        product_proxy_m: e.parse::<u32>("productProxyM", "a positive integer")?,
    })
}
