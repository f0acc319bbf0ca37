//! Seeded random instances, solver runs with retries, and exact ratio checks.
//!
//! An experiment file is TOML:
//!
//! ```toml
//! seed = 7
//! threads = 4          # optional: time 1 thread against this many
//!
//! [[suite]]
//! name = "mrct"
//! solver = "mrct"      # mrct | sroct | w2mrct
//! instances = 200
//! n = [5, 7]           # inclusive range
//! weights = [1, 9]
//! epsilon = "1"
//! ```
//!
//! Optional suite keys: `requirements` (range, default `[0, 0]`), `density`
//! (probability of each non-tree edge, default `"1/2"`), `r` (overrides
//! `epsilon`), `lambdas` (cycled, default `["1"]`), `trials` (default 3),
//! `denom_exp`/`numer_exp` (default 10/6), `check_ratio` (default true),
//! `seed`.

use std::fmt::Write as _;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::graph::{Graph, Lambda, TwoSourceSpec};
use crate::io::{format_decimal, format_ratio, parse_ratio};
use crate::isolation::{perturb, PerturbationConfig};
use crate::mrct::{parallel_mrct, ApproxParams, ApproxResult};
use crate::oracle::{exact_mrct, exact_sroct, exact_w2mrct, OracleError, DEFAULT_CAP};
use crate::sroct::{parallel_sroct, SroctResult};
use crate::tree::SpanningTree;
use crate::two_mrct::{weighted_2mrct, W2mrctResult};
use crate::{Outcome, SolveError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("experiment file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("suite `{suite}`: {msg}")]
    Spec { suite: String, msg: String },
    #[error("suite `{suite}` instance {index}: {source}")]
    Solve {
        suite: String,
        index: usize,
        source: SolveError,
    },
    #[error("suite `{suite}` instance {index}: {source}")]
    Oracle {
        suite: String,
        index: usize,
        source: OracleError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Mrct,
    Sroct,
    W2mrct,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Mrct => "mrct",
            Solver::Sroct => "sroct",
            Solver::W2mrct => "w2mrct",
        }
    }
}

fn default_weights() -> [u64; 2] {
    [1, 9]
}
fn default_density() -> String {
    "1/2".into()
}
fn default_lambdas() -> Vec<String> {
    vec!["1".into()]
}
fn default_trials() -> u32 {
    3
}
fn default_denom_exp() -> u32 {
    crate::isolation::DEFAULT_DENOM_EXP
}
fn default_numer_exp() -> u32 {
    crate::isolation::DEFAULT_NUMER_EXP
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub name: String,
    pub solver: Solver,
    pub instances: usize,
    pub n: [usize; 2],
    #[serde(default = "default_weights")]
    pub weights: [u64; 2],
    #[serde(default)]
    pub requirements: [u64; 2],
    #[serde(default = "default_density")]
    pub density: String,
    #[serde(default)]
    pub epsilon: Option<String>,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_denom_exp")]
    pub denom_exp: u32,
    #[serde(default = "default_numer_exp")]
    pub numer_exp: u32,
    #[serde(default = "yes")]
    pub check_ratio: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub suite: Vec<SuiteSpec>,
}

pub fn parse_spec(text: &str) -> Result<ExperimentSpec, ExperimentError> {
    Ok(toml::from_str(text)?)
}

/// A random connected graph: a random spanning tree over shuffled labels,
/// plus each remaining pair with probability `density`.
pub fn random_connected_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    weights: [u64; 2],
    requirements: [u64; 2],
    density: Ratio<u32>,
) -> Graph {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut adjacent = vec![false; n * n];
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (label[i].min(label[j]), label[i].max(label[j]));
        adjacent[a * n + b] = true;
        pairs.push((a, b));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !adjacent[a * n + b] && rng.gen_ratio(*density.numer(), *density.denom()) {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort_unstable();
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(a, b)| (a, b, rng.gen_range(weights[0]..=weights[1])))
        .collect();
    let reqs = (0..n)
        .map(|_| rng.gen_range(requirements[0]..=requirements[1]))
        .collect();
    Graph::with_requirements(n, edges, reqs).expect("generated graph is valid")
}

/// Per-suite inputs after validation.
#[derive(Debug, Clone)]
struct Plan {
    params: Option<ApproxParams>,
    lambdas: Vec<Lambda>,
    density: Ratio<u32>,
}

fn plan(suite: &SuiteSpec) -> Result<Plan, ExperimentError> {
    let bad = |msg: String| ExperimentError::Spec {
        suite: suite.name.clone(),
        msg,
    };
    if suite.n[0] == 0 || suite.n[0] > suite.n[1] {
        return Err(bad(format!("bad vertex range {:?}", suite.n)));
    }
    if suite.weights[0] > suite.weights[1] || suite.requirements[0] > suite.requirements[1] {
        return Err(bad("empty weight or requirement range".into()));
    }
    if suite.trials == 0 {
        return Err(bad("trials must be at least 1".into()));
    }
    PerturbationConfig::new(0, suite.denom_exp, suite.numer_exp).map_err(|e| bad(e.to_string()))?;
    let density = parse_ratio(&suite.density)
        .filter(|d| *d <= Ratio::from_integer(1))
        .and_then(|d| Some(Ratio::new(u32::try_from(*d.numer()).ok()?, u32::try_from(*d.denom()).ok()?)))
        .ok_or_else(|| bad(format!("bad density `{}`", suite.density)))?;
    let params = match suite.solver {
        Solver::Mrct => Some(match (suite.r, &suite.epsilon) {
            (Some(r), _) => ApproxParams::with_r(r),
            (None, Some(e)) => {
                let eps = parse_ratio(e).ok_or_else(|| bad(format!("bad epsilon `{e}`")))?;
                ApproxParams::from_epsilon(eps).map_err(|e| bad(e.to_string()))?
            }
            (None, None) => return Err(bad("mrct needs `epsilon` or `r`".into())),
        }),
        _ => None,
    };
    let lambdas = suite
        .lambdas
        .iter()
        .map(|s| s.parse::<Lambda>().map_err(|e| bad(format!("lambda `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if lambdas.is_empty() {
        return Err(bad("`lambdas` is empty".into()));
    }
    Ok(Plan {
        params,
        lambdas,
        density,
    })
}

/// A solver result of any kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Mrct(ApproxResult),
    Sroct(SroctResult),
    W2mrct(W2mrctResult),
}

impl Solution {
    pub fn tree(&self) -> &SpanningTree {
        match self {
            Solution::Mrct(r) => &r.tree,
            Solution::Sroct(r) => &r.tree,
            Solution::W2mrct(r) => &r.tree,
        }
    }

    pub fn original_cost(&self) -> i128 {
        match self {
            Solution::Mrct(r) => r.original_cost.value(),
            Solution::Sroct(r) => r.original_src_cost.value(),
            Solution::W2mrct(r) => r.original_cost.value(),
        }
    }

    pub fn scaled_cost(&self) -> Option<i128> {
        match self {
            Solution::Mrct(r) => Some(r.scaled_cost.value()),
            Solution::Sroct(r) => r.scaled_src_cost.map(|c| c.value()),
            Solution::W2mrct(r) => r.scaled_cost.map(|c| c.value()),
        }
    }

    pub fn guarantee(&self) -> Ratio<i128> {
        match self {
            Solution::Mrct(r) => r.guarantee,
            Solution::Sroct(r) => r.guarantee,
            Solution::W2mrct(r) => r.guarantee,
        }
    }

    pub fn slack(&self) -> Option<Ratio<i128>> {
        match self {
            Solution::Mrct(_) => None,
            Solution::Sroct(r) => Some(r.slack),
            Solution::W2mrct(r) => Some(r.slack),
        }
    }
}

/// One generated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub sources: Option<TwoSourceSpec>,
    pub seed: u64,
}

/// Runs one solver once.
pub fn solve_once(
    solver: Solver,
    params: Option<&ApproxParams>,
    inst: &Instance,
    cfg: &PerturbationConfig,
) -> Result<Outcome<Solution>, SolveError> {
    Ok(match solver {
        Solver::Mrct => {
            let params = params.expect("mrct suites carry parameters");
            map(parallel_mrct(&inst.graph, params, cfg)?, Solution::Mrct)
        }
        Solver::Sroct => map(parallel_sroct(&inst.graph, cfg)?, Solution::Sroct),
        Solver::W2mrct => {
            let spec = inst.sources.as_ref().expect("w2mrct instances carry sources");
            map(weighted_2mrct(&inst.graph, spec, cfg)?, Solution::W2mrct)
        }
    })
}

fn map<T>(o: Outcome<T>, f: impl FnOnce(T) -> Solution) -> Outcome<Solution> {
    match o {
        Outcome::Solved(t) => Outcome::Solved(f(t)),
        Outcome::Fail(r) => Outcome::Fail(r),
        Outcome::Disconnected => Outcome::Disconnected,
    }
}

/// Result of running with retries: the seed that succeeded, the number of
/// attempts and the final outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attempt {
    pub seed: u64,
    pub trials: u32,
    pub outcome: Outcome<Solution>,
}

/// Tries seeds `base, base + 1, …` until a run does not fail, at most
/// `trials` times.
pub fn solve_with_retries(
    solver: Solver,
    params: Option<&ApproxParams>,
    inst: &Instance,
    base: &PerturbationConfig,
    trials: u32,
) -> Result<Attempt, SolveError> {
    let mut last = None;
    for t in 0..trials {
        let cfg = base.with_seed_offset(u64::from(t));
        let outcome = solve_once(solver, params, inst, &cfg)?;
        let done = !outcome.is_fail();
        last = Some(Attempt {
            seed: cfg.seed,
            trials: t + 1,
            outcome,
        });
        if done {
            break;
        }
    }
    Ok(last.expect("at least one trial"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordOutcome {
    Solved {
        cost: i128,
        optimum: Option<i128>,
        guarantee: Ratio<i128>,
        slack: Option<Ratio<i128>>,
        /// `cost <= guarantee · optimum`, exactly.
        within: Option<bool>,
        /// The same check in perturbed units against the optimum under the
        /// perturbed weights, when that applies.
        scaled_within: Option<bool>,
    },
    Fail,
    ConstructionInvalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRecord {
    pub index: usize,
    pub n: usize,
    pub m: usize,
    pub trials: u32,
    pub fails: u32,
    pub outcome: RecordOutcome,
}

impl InstanceRecord {
    pub fn ratio(&self) -> Option<Ratio<i128>> {
        match self.outcome {
            RecordOutcome::Solved {
                cost,
                optimum: Some(opt),
                ..
            } if opt > 0 => Some(Ratio::new(cost, opt)),
            _ => None,
        }
    }

    pub fn violated(&self) -> bool {
        matches!(
            self.outcome,
            RecordOutcome::Solved { within: Some(false), .. }
                | RecordOutcome::Solved {
                    scaled_within: Some(false),
                    ..
                }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timing {
    pub threads: usize,
    pub one_thread_ms: u128,
    pub many_threads_ms: u128,
    /// Both runs reproduced the reported results exactly.
    pub equivalent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub solver: Solver,
    pub records: Vec<InstanceRecord>,
    pub timing: Option<Timing>,
}

impl SuiteReport {
    pub fn trials(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.trials)).sum()
    }

    pub fn fails(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.fails)).sum()
    }

    pub fn exhausted(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.outcome == RecordOutcome::Fail)
            .count()
    }

    pub fn violations(&self) -> usize {
        self.records.iter().filter(|r| r.violated()).count()
    }

    pub fn construction_invalid(&self) -> usize {
        self.records
            .iter()
            .filter(|r| matches!(r.outcome, RecordOutcome::ConstructionInvalid(_)))
            .count()
    }

    pub fn max_ratio(&self) -> Option<Ratio<i128>> {
        self.records.iter().filter_map(|r| r.ratio()).max()
    }

    pub fn green(&self) -> bool {
        self.violations() == 0
            && self.construction_invalid() == 0
            && self.timing.as_ref().is_none_or(|t| t.equivalent)
    }
}

fn instance_seed(base: u64, index: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
}

/// Generates instance `index` of a suite.
pub fn generate(suite: &SuiteSpec, base_seed: u64, index: usize) -> Result<Instance, ExperimentError> {
    let plan = plan(suite)?;
    Ok(generate_with(suite, &plan, base_seed, index))
}

fn generate_with(suite: &SuiteSpec, plan: &Plan, base_seed: u64, index: usize) -> Instance {
    let seed = instance_seed(suite.seed.unwrap_or(base_seed), index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_lo = match suite.solver {
        Solver::W2mrct => suite.n[0].max(2),
        _ => suite.n[0],
    };
    let n = rng.gen_range(n_lo..=suite.n[1].max(n_lo));
    let graph = random_connected_graph(&mut rng, n, suite.weights, suite.requirements, plan.density);
    let sources = (suite.solver == Solver::W2mrct).then(|| {
        let s1 = rng.gen_range(0..n);
        let s2 = (s1 + rng.gen_range(1..n)) % n;
        TwoSourceSpec::new(s1, s2, plan.lambdas[index % plan.lambdas.len()])
    });
    Instance {
        graph,
        sources,
        seed,
    }
}

fn check(
    suite: &SuiteSpec,
    index: usize,
    inst: &Instance,
    attempt: &Attempt,
    sol: &Solution,
    params: Option<&ApproxParams>,
) -> Result<RecordOutcome, ExperimentError> {
    let cost = sol.original_cost();
    let guarantee = sol.guarantee();
    if !suite.check_ratio {
        return Ok(RecordOutcome::Solved {
            cost,
            optimum: None,
            guarantee,
            slack: sol.slack(),
            within: None,
            scaled_within: None,
        });
    }
    let oracle_err = |source| ExperimentError::Oracle {
        suite: suite.name.clone(),
        index,
        source,
    };
    let g = &inst.graph;
    let optimum = match suite.solver {
        Solver::Mrct => exact_mrct(g, g, DEFAULT_CAP),
        Solver::Sroct => exact_sroct(g, g, g.requirements(), DEFAULT_CAP),
        Solver::W2mrct => exact_w2mrct(g, g, inst.sources.as_ref().unwrap(), DEFAULT_CAP),
    }
    .map_err(oracle_err)?
    .optimum
    .value();
    let within = Ratio::from_integer(cost) <= guarantee * optimum;

    // Perturbed-unit certificate, for runs that perturbed this very graph.
    let scaled_within = match sol.scaled_cost() {
        Some(scaled) if !(suite.solver == Solver::Mrct && g.is_zero_weighted()) => {
            let cfg = PerturbationConfig::new(attempt.seed, suite.denom_exp, suite.numer_exp)
                .expect("validated");
            let sw = perturb(g, &cfg).map_err(|source| ExperimentError::Solve {
                suite: suite.name.clone(),
                index,
                source: source.into(),
            })?;
            let (opt, factor) = match suite.solver {
                Solver::Mrct => (
                    exact_mrct(g, &sw, DEFAULT_CAP),
                    params.expect("mrct params").enumeration_bound(),
                ),
                Solver::Sroct => (
                    exact_sroct(g, &sw, g.requirements(), DEFAULT_CAP),
                    Ratio::from_integer(2),
                ),
                Solver::W2mrct => (
                    exact_w2mrct(g, &sw, inst.sources.as_ref().unwrap(), DEFAULT_CAP),
                    Ratio::from_integer(2),
                ),
            };
            let opt = opt.map_err(oracle_err)?.optimum.value();
            Some(Ratio::from_integer(scaled) <= factor * opt)
        }
        _ => None,
    };
    Ok(RecordOutcome::Solved {
        cost,
        optimum: Some(optimum),
        guarantee,
        slack: sol.slack(),
        within: Some(within),
        scaled_within,
    })
}

/// Per-instance attempts. Two-source construction failures are kept as
/// values so they can be counted; other errors abort the suite.
type Attempts = Vec<Result<Attempt, SolveError>>;

fn solve_all(suite: &SuiteSpec, plan: &Plan, instances: &[Instance]) -> Result<Attempts, ExperimentError> {
    instances
        .iter()
        .enumerate()
        .map(|(index, inst)| {
            let base = PerturbationConfig::new(inst.seed, suite.denom_exp, suite.numer_exp)
                .expect("validated");
            match solve_with_retries(suite.solver, plan.params.as_ref(), inst, &base, suite.trials) {
                Err(e @ SolveError::ConstructionInvalid { .. }) => Ok(Err(e)),
                Err(source) => Err(ExperimentError::Solve {
                    suite: suite.name.clone(),
                    index,
                    source,
                }),
                Ok(a) => Ok(Ok(a)),
            }
        })
        .collect()
}

fn timed_in_pool(
    threads: usize,
    suite: &SuiteSpec,
    plan: &Plan,
    instances: &[Instance],
) -> Result<(u128, Attempts), ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        let start = Instant::now();
        let out = solve_all(suite, plan, instances)?;
        Ok((start.elapsed().as_millis(), out))
    })
}

pub fn run_suite(
    suite: &SuiteSpec,
    base_seed: u64,
    threads: Option<usize>,
) -> Result<SuiteReport, ExperimentError> {
    let plan = plan(suite)?;
    let instances: Vec<Instance> = (0..suite.instances)
        .map(|i| generate_with(suite, &plan, base_seed, i))
        .collect();
    let attempts = solve_all(suite, &plan, &instances)?;
    let mut records = Vec::with_capacity(instances.len());
    for (index, (inst, attempt)) in instances.iter().zip(&attempts).enumerate() {
        let (outcome, trials, fails) = match attempt {
            Err(e) => (RecordOutcome::ConstructionInvalid(e.to_string()), 1, 0),
            Ok(attempt) => {
                let outcome = match &attempt.outcome {
                    Outcome::Solved(sol) => check(suite, index, inst, attempt, sol, plan.params.as_ref())?,
                    Outcome::Fail(_) => RecordOutcome::Fail,
                    Outcome::Disconnected => unreachable!("generated graphs are connected"),
                };
                let fails = attempt.trials - u32::from(!attempt.outcome.is_fail());
                (outcome, attempt.trials, fails)
            }
        };
        records.push(InstanceRecord {
            index,
            n: inst.graph.n(),
            m: inst.graph.m(),
            trials,
            fails,
            outcome,
        });
    }
    let timing = match threads {
        Some(k) => {
            let (one_ms, one) = timed_in_pool(1, suite, &plan, &instances)?;
            let (many_ms, many) = timed_in_pool(k, suite, &plan, &instances)?;
            Some(Timing {
                threads: k,
                one_thread_ms: one_ms,
                many_threads_ms: many_ms,
                equivalent: one == attempts && many == attempts,
            })
        }
        None => None,
    };
    Ok(SuiteReport {
        name: suite.name.clone(),
        solver: suite.solver,
        records,
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn all_green(&self) -> bool {
        self.suites.iter().all(|s| s.green())
    }

    /// One `key value` pair per line.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| writeln!(out, "{k} {v}").unwrap();
        kv("suites", &self.suites.len());
        for s in &self.suites {
            let p = &s.name;
            kv(&format!("{p}.solver"), &s.solver.name());
            kv(&format!("{p}.instances"), &s.records.len());
            kv(&format!("{p}.trials"), &s.trials());
            kv(&format!("{p}.fails"), &s.fails());
            if s.trials() > 0 {
                let rate = Ratio::new(s.fails() as i128, s.trials() as i128);
                kv(&format!("{p}.fail-rate"), &format_decimal(&rate));
            }
            kv(&format!("{p}.exhausted"), &s.exhausted());
            kv(&format!("{p}.violations"), &s.violations());
            kv(&format!("{p}.construction-invalid"), &s.construction_invalid());
            if let Some(r) = s.max_ratio() {
                kv(&format!("{p}.max-ratio"), &format_decimal(&r));
                kv(&format!("{p}.max-ratio-exact"), &format_ratio(&r));
            }
            if let Some(t) = &s.timing {
                kv(&format!("{p}.time-1-thread-ms"), &t.one_thread_ms);
                kv(&format!("{p}.time-{}-threads-ms", t.threads), &t.many_threads_ms);
                kv(&format!("{p}.thread-equivalent"), &t.equivalent);
            }
            for r in &s.records {
                let q = format!("{p}.{}", r.index);
                kv(&format!("{q}.n"), &r.n);
                kv(&format!("{q}.m"), &r.m);
                kv(&format!("{q}.trials"), &r.trials);
                match &r.outcome {
                    RecordOutcome::Solved {
                        cost,
                        optimum,
                        guarantee,
                        slack,
                        within,
                        scaled_within,
                    } => {
                        kv(&format!("{q}.status"), &"solved");
                        kv(&format!("{q}.cost"), cost);
                        if let Some(o) = optimum {
                            kv(&format!("{q}.optimum"), o);
                        }
                        if let Some(ratio) = r.ratio() {
                            kv(&format!("{q}.ratio"), &format_decimal(&ratio));
                        }
                        kv(&format!("{q}.bound"), &format_ratio(guarantee));
                        if let Some(sl) = slack {
                            kv(&format!("{q}.slack"), &format_ratio(sl));
                        }
                        if let Some(w) = within {
                            kv(&format!("{q}.within-bound"), w);
                        }
                        if let Some(w) = scaled_within {
                            kv(&format!("{q}.scaled-within-bound"), w);
                        }
                    }
                    RecordOutcome::Fail => kv(&format!("{q}.status"), &"fail"),
                    RecordOutcome::ConstructionInvalid(why) => {
                        kv(&format!("{q}.status"), &"construction-invalid");
                        kv(&format!("{q}.reason"), why);
                    }
                }
            }
        }
        kv("all-green", &self.all_green());
        out
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<Report, ExperimentError> {
    let suites = spec
        .suite
        .iter()
        .map(|s| run_suite(s, spec.seed, spec.threads))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report { suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_gives_empty_report() {
        let spec = parse_spec("seed = 3\n").unwrap();
        let report = run(&spec).unwrap();
        assert!(report.suites.is_empty());
        assert_eq!(report.to_kv(), "suites 0\nall-green true\n");
    }

    #[test]
    fn generator_is_connected_and_deterministic() {
        for seed in 0..50 {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            let g = random_connected_graph(&mut a, 7, [1, 9], [0, 3], Ratio::new(1, 2));
            let h = random_connected_graph(&mut b, 7, [1, 9], [0, 3], Ratio::new(1, 2));
            assert_eq!(g, h);
            assert!(g.is_connected());
            assert!(g.edges().iter().all(|e| (1..=9).contains(&e.weight)));
            assert!(g.requirements().iter().all(|&r| r <= 3));
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_spec("[[suite]]\nname='a'\nsolver='mrct'\ninstances=1\nn=[3,3]\nbogus=1\n").is_err());
    }

    #[test]
    fn small_suites_are_green() {
        let text = r#"
seed = 11
threads = 2
[[suite]]
name = "m"
solver = "mrct"
instances = 4
n = [3, 5]
r = 0
[[suite]]
name = "s"
solver = "sroct"
instances = 4
n = [3, 5]
requirements = [0, 3]
[[suite]]
name = "w"
solver = "w2mrct"
instances = 4
n = [2, 5]
lambdas = ["1", "3/2"]
"#;
        let report = run(&parse_spec(text).unwrap()).unwrap();
        assert_eq!(report.suites.len(), 3);
        assert!(report.all_green(), "{}", report.to_kv());
        let kv = report.to_kv();
        assert!(kv.contains("m.thread-equivalent true"));
        assert!(kv.ends_with("all-green true\n"));
    }
}
