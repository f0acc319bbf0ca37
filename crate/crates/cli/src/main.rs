//! `rcst`: spanning tree solvers for routing cost objectives.
//!
//! Exit codes: 0 success (including a `disconnected` result), 1 usage or
//! parse error, 2 input invariant violation, 3 every trial failed to
//! isolate, 4 a constructed tree failed validation.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rcst::cost::{routing_cost_edges, src_cost, two_source_cost};
use rcst::experiment;
use rcst::io::{parse_graph, parse_ratio, parse_tree, GraphFile};
use rcst::isolation::{check_strong_min_unique, perturb, PerturbationConfig};
use rcst::mrct::{parallel_mrct, ApproxParams, DEFAULT_BUDGET};
use rcst::oracle::{exact_mrct, exact_sroct, exact_w2mrct, OracleError, DEFAULT_CAP};
use rcst::sroct::parallel_sroct;
use rcst::tree::verify_spanning_tree;
use rcst::two_mrct::weighted_2mrct;
use rcst::{Graph, Lambda, Outcome, PerturbError, SolveError, TwoSourceSpec, UniquenessReport};

use output::{Format, Output};

#[derive(Parser, Debug)]
#[command(name = "rcst", version, about = "Approximate minimum routing cost spanning trees")]
struct Cli {
    /// Worker threads (default: all cores). RCST_THREADS overrides.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Perturbation {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exponent `a` of the denominator `n^a`.
    #[arg(long, default_value_t = rcst::isolation::DEFAULT_DENOM_EXP)]
    denom_exp: u32,
    /// Exponent `b` of the largest numerator `n^b`.
    #[arg(long, default_value_t = rcst::isolation::DEFAULT_NUMER_EXP)]
    numer_exp: u32,
}

#[derive(Args, Debug, Clone)]
struct Retry {
    #[command(flatten)]
    perturbation: Perturbation,
    /// Attempts with seeds S, S+1, … before reporting `fail`.
    #[arg(long, default_value_t = 3)]
    trials: u32,
}

#[derive(Args, Debug, Clone)]
struct Sources {
    #[arg(long)]
    s1: Option<usize>,
    #[arg(long)]
    s2: Option<usize>,
    /// λ as `p/q` or `p`, at least 1.
    #[arg(long)]
    lambda: Option<Lambda>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Routing cost tree via general stars.
    Mrct {
        file: PathBuf,
        #[arg(long, value_parser = ratio_arg)]
        epsilon: Ratio<i128>,
        #[command(flatten)]
        retry: Retry,
        /// Most candidate cores to evaluate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Sum-requirement tree via shortest path trees.
    Sroct {
        file: PathBuf,
        #[command(flatten)]
        retry: Retry,
    },
    /// Weighted two-source tree. Flags override the file's `sources` line.
    W2mrct {
        file: PathBuf,
        #[command(flatten)]
        sources: Sources,
        #[command(flatten)]
        retry: Retry,
    },
    /// Test whether the perturbed weights make shortest paths unique.
    CheckUnique {
        file: PathBuf,
        #[command(flatten)]
        perturbation: Perturbation,
    },
    /// Exact optimum by spanning tree enumeration.
    Exact {
        objective: Objective,
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[command(flatten)]
        sources: Sources,
    },
    /// Cost of a given tree.
    Cost {
        file: PathBuf,
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "mrct")]
        objective: Objective,
        #[command(flatten)]
        sources: Sources,
    },
    /// Run a TOML experiment file and print a key-value report.
    Experiment { spec: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    Mrct,
    Sroct,
    W2mrct,
}

fn ratio_arg(s: &str) -> Result<Ratio<i128>, String> {
    parse_ratio(s).ok_or_else(|| format!("`{s}` is not a rational p/q"))
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure {
            code: 1,
            msg: msg.to_string(),
        }
    }

    fn invariant(msg: impl ToString) -> Self {
        Failure {
            code: 2,
            msg: msg.to_string(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match &e {
            SolveError::ConstructionInvalid { .. } | SolveError::Tree(_) => 4,
            SolveError::InvalidEpsilon | SolveError::Perturb(PerturbError::InvalidExponents { .. }) => 1,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::invariant(e)
    }
}

/// What a subcommand produced.
struct Done {
    out: Output,
    code: u8,
}

impl Done {
    fn ok(out: Output) -> Self {
        Done { out, code: 0 }
    }
}

fn load(path: &Path) -> Result<GraphFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn config(p: &Perturbation) -> Result<PerturbationConfig, Failure> {
    PerturbationConfig::new(p.seed, p.denom_exp, p.numer_exp).map_err(Failure::usage)
}

fn resolve_sources(file: &GraphFile, flags: &Sources) -> Result<TwoSourceSpec, Failure> {
    let from_file = file.sources;
    let s1 = flags.s1.or(from_file.map(|s| s.s1));
    let s2 = flags.s2.or(from_file.map(|s| s.s2));
    let lambda = flags.lambda.or(from_file.map(|s| s.lambda));
    match (s1, s2, lambda) {
        (Some(s1), Some(s2), Some(lambda)) => {
            let spec = TwoSourceSpec::new(s1, s2, lambda);
            spec.check(&file.graph).map_err(Failure::invariant)?;
            Ok(spec)
        }
        _ => Err(Failure::usage(
            "two-source objective needs --s1, --s2 and --lambda (or a `sources` line)",
        )),
    }
}

/// Runs `solve` with seeds `seed, seed+1, …`; the closure gets the config
/// for each attempt.
fn with_retries<T>(
    retry: &Retry,
    mut solve: impl FnMut(&PerturbationConfig) -> Result<Outcome<T>, SolveError>,
    render: impl FnOnce(T, &PerturbationConfig, u32) -> Output,
) -> Result<Done, Failure> {
    let base = config(&retry.perturbation)?;
    let trials = retry.trials.max(1);
    let mut last: Option<UniquenessReport> = None;
    for t in 0..trials {
        let cfg = base.with_seed_offset(u64::from(t));
        match solve(&cfg)? {
            Outcome::Solved(x) => return Ok(Done::ok(render(x, &cfg, t + 1))),
            Outcome::Disconnected => return Ok(Done::ok(Output::new("disconnected"))),
            Outcome::Fail(report) => last = Some(report),
        }
    }
    let witness = last.and_then(|r| r.witness);
    Ok(Done {
        out: Output::new("fail").field("trials", trials).witness(witness),
        code: 3,
    })
}

fn run(cmd: Command) -> Result<Done, Failure> {
    match cmd {
        Command::Mrct {
            file,
            epsilon,
            retry,
            budget,
        } => {
            let f = load(&file)?;
            let params = ApproxParams::from_epsilon(epsilon)?.with_budget(budget);
            with_retries(
                &retry,
                |cfg| parallel_mrct(&f.graph, &params, cfg),
                |res, cfg, trials| {
                    let seq: Vec<String> = res.sequence.iter().map(|v| v.to_string()).collect();
                    Output::new("solved")
                        .tree(&res.tree)
                        .field("cost routing", res.original_cost)
                        .field("cost routing-scaled", res.scaled_cost)
                        .ratio("ratio-bound", &res.guarantee)
                        .field("r", params.r())
                        .field("core", seq.join(" "))
                        .field("candidates", res.candidates)
                        .field("seed", cfg.seed)
                        .field("trials", trials)
                },
            )
        }
        Command::Sroct { file, retry } => {
            let f = load(&file)?;
            with_retries(
                &retry,
                |cfg| parallel_sroct(&f.graph, cfg),
                |res, cfg, trials| {
                    let mut out = Output::new("solved")
                        .tree(&res.tree)
                        .field("cost src", res.original_src_cost);
                    if let Some(c) = res.scaled_src_cost {
                        out = out.field("cost src-scaled", c);
                    }
                    out.field("root", res.root)
                        .ratio("slack", &res.slack)
                        .ratio("ratio-bound", &res.guarantee)
                        .field("seed", cfg.seed)
                        .field("trials", trials)
                },
            )
        }
        Command::W2mrct {
            file,
            sources,
            retry,
        } => {
            let f = load(&file)?;
            let spec = resolve_sources(&f, &sources)?;
            with_retries(
                &retry,
                |cfg| weighted_2mrct(&f.graph, &spec, cfg),
                |res, cfg, trials| {
                    let mut out = Output::new("solved")
                        .tree(&res.tree)
                        .field("cost two-source", res.original_cost);
                    if let Some(c) = res.scaled_cost {
                        out = out.field("cost two-source-scaled", c);
                    }
                    if let Some(z) = res.z1_size {
                        out = out.field("z1-size", z);
                    }
                    if let Some((a, b)) = res.bridge {
                        out = out.field("bridge", format!("{a} {b}"));
                    }
                    out.ratio("slack", &res.slack)
                        .ratio("ratio-bound", &res.guarantee)
                        .field("lambda", spec.lambda)
                        .field("seed", cfg.seed)
                        .field("trials", trials)
                },
            )
        }
        Command::CheckUnique { file, perturbation } => {
            let f = load(&file)?;
            let cfg = config(&perturbation)?;
            let sw = perturb(&f.graph, &cfg).map_err(SolveError::from)?;
            let report = check_strong_min_unique(&sw);
            Ok(Done::ok(UniqueOutput(report).into()))
        }
        Command::Exact {
            objective,
            file,
            cap,
            sources,
        } => {
            let f = load(&file)?;
            let g = &f.graph;
            if !g.is_connected() {
                return Ok(Done::ok(Output::new("disconnected")));
            }
            let (label, res) = match objective {
                Objective::Mrct => ("cost routing", exact_mrct(g, g, cap)?),
                Objective::Sroct => ("cost src", exact_sroct(g, g, g.requirements(), cap)?),
                Objective::W2mrct => {
                    let spec = resolve_sources(&f, &sources)?;
                    ("cost two-source", exact_w2mrct(g, g, &spec, cap)?)
                }
            };
            Ok(Done::ok(
                Output::new("solved")
                    .tree(&res.tree)
                    .field(label, res.optimum)
                    .field("trees-examined", res.trees_examined),
            ))
        }
        Command::Cost {
            file,
            tree,
            objective,
            sources,
        } => {
            let f = load(&file)?;
            let text = std::fs::read_to_string(&tree)
                .map_err(|e| Failure::usage(format!("{}: {e}", tree.display())))?;
            let edges = parse_tree(&text, &f.graph)
                .map_err(|e| Failure::usage(format!("{}: {e}", tree.display())))?;
            let t = verify_spanning_tree(&f.graph, &edges).map_err(Failure::invariant)?;
            let g: &Graph = &f.graph;
            let out = Output::new("solved").tree(&t);
            let out = match objective {
                Objective::Mrct => out.field("cost routing", routing_cost_edges(&t, g).map_err(Failure::invariant)?),
                Objective::Sroct => out.field(
                    "cost src",
                    src_cost(&t, g, g.requirements()).map_err(Failure::invariant)?,
                ),
                Objective::W2mrct => {
                    let spec = resolve_sources(&f, &sources)?;
                    out.field(
                        "cost two-source",
                        two_source_cost(&t, g, &spec).map_err(Failure::invariant)?,
                    )
                }
            };
            Ok(Done::ok(out))
        }
        Command::Experiment { spec } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Failure::usage(format!("{}: {e}", spec.display())))?;
            let parsed = experiment::parse_spec(&text).map_err(Failure::usage)?;
            let report = experiment::run(&parsed).map_err(|e| match e {
                experiment::ExperimentError::Toml(_) | experiment::ExperimentError::Spec { .. } => {
                    Failure::usage(e)
                }
                other => Failure::invariant(other),
            })?;
            Ok(Done {
                out: Output::raw(report.to_kv()),
                code: 0,
            })
        }
    }
}

/// `check-unique` has its own line format in text mode.
struct UniqueOutput(UniquenessReport);

impl From<UniqueOutput> for Output {
    fn from(u: UniqueOutput) -> Output {
        let unique = u.0.is_strongly_min_unique();
        Output::new(if unique { "unique" } else { "not-unique" })
            .unique(unique, u.0.witness)
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var("RCST_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Failure::usage(format!("RCST_THREADS=`{v}` is not a positive integer"))),
        Err(_) => Ok(flag.filter(|&n| n > 0)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let format = cli.format;
    let result = thread_count(cli.threads).and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Failure::invariant(format!("thread pool: {e}")))?;
        pool.install(|| run(cli.command))
    });
    match result {
        Ok(done) => {
            print!("{}", done.out.render(format));
            ExitCode::from(done.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
