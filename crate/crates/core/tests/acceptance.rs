//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPoolBuilder;
use rcst::cost::{routing_cost_edges, routing_cost_pairs};
use rcst::experiment::{parse_spec, random_connected_graph, run_suite, RecordOutcome, SuiteReport};
use rcst::io::{format_decimal, format_ratio, write_tree};
use rcst::isolation::{check_strong_min_unique, perturb, UniquenessReport};
use rcst::mrct::{parallel_mrct, ApproxParams};
use rcst::oracle::count_shortest_paths_bruteforce;
use rcst::sroct::{parallel_sroct, Branch as SroctBranch};
use rcst::tree::verify_spanning_tree;
use rcst::two_mrct::{weighted_2mrct, Branch as W2Branch};
use rcst::{
    EdgeWeights, Graph, Lambda, Outcome, PerturbationConfig, ScaledWeights, SpanningTree, TwoSourceSpec,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_spanning_tree(g: &Graph, rng: &mut ChaCha8Rng) -> SpanningTree {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.shuffle(rng);
    let mut root: Vec<usize> = (0..g.n()).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut edges = Vec::new();
    for e in order {
        let (a, b) = (find(&mut root, g.edge(e).u), find(&mut root, g.edge(e).v));
        if a != b {
            root[a] = b;
            edges.push(e);
        }
    }
    verify_spanning_tree(g, &edges).expect("Kruskal yields a spanning tree")
}

fn cost_decompositions_agree() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = Ratio::from_integer(0i128);
    for i in 0..1000 {
        let n = rng.gen_range(2..=32);
        let g = random_connected_graph(&mut rng, n, [1, 1_000_000], [0, 0], Ratio::new(1, 3));
        let t = random_spanning_tree(&g, &mut rng);
        let pairs = routing_cost_pairs(&t, &g).unwrap().value();
        let edges = routing_cost_edges(&t, &g).unwrap().value();
        if pairs != edges {
            return verdict(false, format!("tree {i}: pairs {pairs} != edges {edges}"));
        }
        // cost <= n^3/2 · max w, cleared of the half.
        let n = n as i128;
        let cap = n * n * n * i128::from(g.max_weight());
        if 2 * edges > cap {
            return verdict(false, format!("tree {i}: cost {edges} above n^3/2·max w"));
        }
        worst = worst.max(Ratio::new(2 * edges, cap));
    }
    verdict(true, format!("1000 trees, max cost/(n^3/2·max w) = {}", format_decimal(&worst)))
}

/// Lexicographically smallest `(source, hops, vertex)` with two or more
/// minimum-weight paths of at most `hops` edges.
fn brute_force_witness<W: EdgeWeights>(g: &Graph, w: &W) -> Option<(usize, usize, usize)> {
    let n = g.n();
    for s in 0..n {
        for k in 1..n {
            for x in 0..n {
                if count_shortest_paths_bruteforce(g, w, s, x, k) > 1 {
                    return Some((s, k, x));
                }
            }
        }
    }
    None
}

fn agrees<W: EdgeWeights>(g: &Graph, w: &W, report: &UniquenessReport) -> bool {
    let expected = brute_force_witness(g, w);
    let got = report.witness.map(|w| (w.source, w.hops, w.vertex));
    report.is_strongly_min_unique() == expected.is_none() && got == expected
}

fn uniqueness_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0usize;
    let mut non_unique = 0usize;
    for n in 2..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &(u, v))| (u, v, 1))
                .collect();
            let g = Graph::new(n, edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            for _ in 0..3 {
                // Weights in 1..=3 so that ties are common.
                let w: Vec<i128> = (0..g.m()).map(|_| rng.gen_range(1..=3)).collect();
                let sw = ScaledWeights::exact(&g, w).unwrap();
                let report = check_strong_min_unique(&sw);
                if !agrees(&g, &sw, &report) {
                    return verdict(false, format!("n={n} mask={mask:#b}: {:?}", report.witness));
                }
                checked += 1;
                non_unique += usize::from(!report.is_strongly_min_unique());
            }
        }
    }
    let exhaustive = checked;
    for i in 0..1000u64 {
        let n = rng.gen_range(2..=6);
        let g = random_connected_graph(&mut rng, n, [1, 9], [0, 0], Ratio::new(1, 2));
        // Half with the default exponents, half with a tiny range that
        // makes ties likely.
        let cfg = if i % 2 == 0 {
            PerturbationConfig::with_seed(i)
        } else {
            PerturbationConfig::new(i, 5, 1).unwrap()
        };
        let sw = perturb(&g, &cfg).unwrap();
        let report = check_strong_min_unique(&sw);
        if !agrees(&g, &sw, &report) {
            return verdict(false, format!("perturbed graph {i}: {:?}", report.witness));
        }
        checked += 1;
        non_unique += usize::from(!report.is_strongly_min_unique());
    }
    verdict(
        true,
        format!(
            "{checked} weightings ({exhaustive} exhaustive, {} perturbed), {non_unique} not min-unique",
            checked - exhaustive
        ),
    )
}

/// Upper end of a binomial count: `expected + 3·sqrt(variance)`.
fn three_sigma(expected: f64, variance: f64) -> f64 {
    expected + 3.0 * variance.sqrt()
}

fn isolation_rate() -> Verdict {
    let n = 6usize;
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1)));
    let g = Graph::new(n, edges).unwrap();
    let seeds = 2000u64;
    let failures = (0..seeds)
        .filter(|&s| {
            let sw = perturb(&g, &PerturbationConfig::with_seed(s)).unwrap();
            !check_strong_min_unique(&sw).is_strongly_min_unique()
        })
        .count();
    let p = 6f64.powi(5) / (2.0 * 6f64.powi(6));
    let limit = three_sigma(p * seeds as f64, p * (1.0 - p) * seeds as f64);
    let rate = failures as f64 / seeds as f64;
    verdict(
        (failures as f64) <= limit,
        format!("{failures}/{seeds} not min-unique (rate {rate:.4}, limit {:.4})", limit / seeds as f64),
    )
}

fn suite(text: &str) -> SuiteReport {
    let spec = parse_spec(text).expect("suite spec");
    run_suite(&spec.suite[0], spec.seed, None).expect("suite runs")
}

const MRCT_SUITE: &str = r#"
seed = 4
[[suite]]
name = "mrct"
solver = "mrct"
instances = 200
n = [5, 7]
weights = [1, 9]
epsilon = "1"
"#;

const SROCT_SUITE: &str = r#"
seed = 5
[[suite]]
name = "sroct"
solver = "sroct"
instances = 200
n = [3, 7]
weights = [1, 9]
requirements = [0, 3]
"#;

const W2MRCT_SUITE: &str = r#"
seed = 6
[[suite]]
name = "w2mrct"
solver = "w2mrct"
instances = 200
n = [3, 7]
weights = [1, 9]
lambdas = ["1", "3/2", "2"]
"#;

/// Every solved record carries a confirmed ratio check.
fn ratio_verdict(report: &SuiteReport, extra: &str) -> Verdict {
    let unchecked = report
        .records
        .iter()
        .filter(|r| matches!(r.outcome, RecordOutcome::Solved { within: None, .. }))
        .count();
    let max = report
        .max_ratio()
        .map_or_else(|| "n/a".to_string(), |r| format!("{} ({})", format_decimal(&r), format_ratio(&r)));
    let pass = report.violations() == 0 && report.construction_invalid() == 0 && unchecked == 0;
    verdict(
        pass,
        format!(
            "{} instances, {} exhausted, {} violations, {} construction-invalid, max ratio {max}{extra}",
            report.records.len(),
            report.exhausted(),
            report.violations(),
            report.construction_invalid(),
        ),
    )
}

fn mrct_ratio(report: &SuiteReport) -> Verdict {
    let below = report
        .max_ratio()
        .is_none_or(|r| r < Ratio::new(135, 100));
    ratio_verdict(report, &format!(", below 1.35: {below}"))
}

fn construction_details(report: &SuiteReport) -> String {
    report
        .records
        .iter()
        .filter_map(|r| match &r.outcome {
            RecordOutcome::ConstructionInvalid(why) => Some(format!("; instance {}: {why}", r.index)),
            _ => None,
        })
        .collect()
}

fn fail_rate(reports: &[&SuiteReport]) -> Verdict {
    let (mut fails, mut trials, mut expected, mut variance) = (0u64, 0u64, 0f64, 0f64);
    for r in reports.iter().flat_map(|s| &s.records) {
        let p = 1.0 / (2.0 * r.n as f64);
        fails += u64::from(r.fails);
        trials += u64::from(r.trials);
        expected += p * f64::from(r.trials);
        variance += p * (1.0 - p) * f64::from(r.trials);
    }
    let limit = three_sigma(expected, variance);
    verdict(
        fails as f64 <= limit,
        format!("{fails} failed trials of {trials} (limit {limit:.1} from Σ 1/(2n) + 3σ)"),
    )
}

/// Everything a solver returns, rendered for byte comparison.
fn render_all(g: &Graph, seed: u64, spec: &TwoSourceSpec) -> String {
    let cfg = PerturbationConfig::with_seed(seed);
    let params = ApproxParams::from_epsilon(Ratio::from_integer(1)).unwrap();
    let tree = |t: &SpanningTree| write_tree(t);
    let mut out = String::new();
    match parallel_mrct(g, &params, &cfg).unwrap() {
        Outcome::Solved(r) => out += &format!("{}{:?}\n", tree(&r.tree), r),
        other => out += &format!("{other:?}\n"),
    }
    match parallel_sroct(g, &cfg).unwrap() {
        Outcome::Solved(r) => out += &format!("{}{:?}\n", tree(&r.tree), r),
        other => out += &format!("{other:?}\n"),
    }
    match weighted_2mrct(g, spec, &cfg).unwrap() {
        Outcome::Solved(r) => out += &format!("{}{:?}\n", tree(&r.tree), r),
        other => out += &format!("{other:?}\n"),
    }
    out
}

fn determinism() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let lambdas = [Lambda::one(), Lambda::new(3, 2).unwrap(), Lambda::new(2, 1).unwrap()];
    let cases: Vec<(Graph, u64, TwoSourceSpec)> = (0..50u64)
        .map(|i| {
            let n = rng.gen_range(4..=8);
            let g = random_connected_graph(&mut rng, n, [1, 9], [0, 3], Ratio::new(1, 2));
            let s1 = rng.gen_range(0..n);
            let s2 = rng.gen_range(0..n);
            let spec = TwoSourceSpec::new(s1, s2, lambdas[i as usize % 3]);
            (g, 1000 + i, spec)
        })
        .collect();
    let outputs: Vec<Vec<String>> = [1, 2, 8]
        .iter()
        .map(|&k| {
            let pool = ThreadPoolBuilder::new().num_threads(k).build().unwrap();
            pool.install(|| cases.iter().map(|(g, s, spec)| render_all(g, *s, spec)).collect())
        })
        .collect();
    let differing: Vec<usize> = (0..cases.len())
        .filter(|&i| outputs[0][i] != outputs[1][i] || outputs[0][i] != outputs[2][i])
        .collect();
    verdict(
        differing.is_empty(),
        format!("50 (instance, seed) pairs x 3 solvers at 1/2/8 threads, differing: {differing:?}"),
    )
}

fn zero_weight_corpus() -> Verdict {
    let cycle = |n: usize, w: u64| (0..n).map(move |i| (i, (i + 1) % n, w));
    let corpus: Vec<(&str, Graph)> = vec![
        ("zero edge", Graph::new(2, [(0, 1, 0)]).unwrap()),
        ("zero path", Graph::new(4, [(0, 1, 0), (1, 2, 0), (2, 3, 0)]).unwrap()),
        ("zero 5-cycle", Graph::new(5, cycle(5, 0)).unwrap()),
        (
            "zero K4",
            Graph::new(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v, 0)))).unwrap(),
        ),
        (
            "zero star with requirements",
            Graph::with_requirements(5, (1..5).map(|v| (0, v, 0)), vec![3, 1, 0, 2, 1]).unwrap(),
        ),
        (
            "zero path plus heavy chord",
            Graph::new(4, [(0, 1, 0), (1, 2, 0), (2, 3, 0), (0, 3, 9)]).unwrap(),
        ),
        (
            "zero cycle plus heavy chords",
            Graph::new(5, cycle(5, 0).chain([(0, 2, 4), (1, 3, 7)])).unwrap(),
        ),
        (
            "zero star in weighted K5",
            Graph::with_requirements(
                5,
                (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v, if u == 2 || v == 2 { 0 } else { 5 }))),
                vec![1, 2, 3, 0, 1],
            )
            .unwrap(),
        ),
        (
            "zero spanning tree of a grid",
            Graph::new(
                6,
                [(0, 1, 0), (1, 2, 0), (0, 3, 0), (3, 4, 0), (4, 5, 0), (1, 4, 3), (2, 5, 2)],
            )
            .unwrap(),
        ),
        (
            "zero path in weighted wheel",
            Graph::new(
                6,
                (1..6)
                    .map(|v| (0, v, 0))
                    .chain((1..5).map(|v| (v, v + 1, 8)))
                    .chain([(1, 5, 8)]),
            )
            .unwrap(),
        ),
    ];
    let params = ApproxParams::from_epsilon(Ratio::from_integer(1)).unwrap();
    for (name, g) in &corpus {
        let n = g.n();
        let spec = TwoSourceSpec::new(0, n - 1, Lambda::new(3, 2).unwrap());
        let mut solved = false;
        for seed in 0..5 {
            let cfg = PerturbationConfig::with_seed(seed);
            let (m, s, w) = match (
                parallel_mrct(g, &params, &cfg),
                parallel_sroct(g, &cfg),
                weighted_2mrct(g, &spec, &cfg),
            ) {
                (Ok(m), Ok(s), Ok(w)) => (m, s, w),
                other => return verdict(false, format!("{name}: {other:?}")),
            };
            let (Outcome::Solved(m), Outcome::Solved(s), Outcome::Solved(w)) = (m, s, w) else {
                continue;
            };
            if m.original_cost.value() != 0 || s.original_src_cost.value() != 0 || w.original_cost.value() != 0 {
                return verdict(
                    false,
                    format!(
                        "{name}: costs {} / {} / {}",
                        m.original_cost, s.original_src_cost, w.original_cost
                    ),
                );
            }
            if s.branch != SroctBranch::ZeroSubgraph || w.branch != W2Branch::ZeroSubgraph {
                return verdict(false, format!("{name}: branches {:?} / {:?}", s.branch, w.branch));
            }
            if g.is_zero_weighted() {
                // The unit-weight substitute must produce the same tree.
                let unit = g.with_weights(&vec![1; g.m()]).unwrap();
                match parallel_mrct(&unit, &params, &cfg) {
                    Ok(Outcome::Solved(u)) if u.tree == m.tree => {}
                    other => return verdict(false, format!("{name}: unit-weight run differs: {other:?}")),
                }
            }
            solved = true;
            break;
        }
        if !solved {
            return verdict(false, format!("{name}: no seed in 0..5 isolated"));
        }
    }
    verdict(true, format!("{} instances, all cost 0 via the zero-weight branches", corpus.len()))
}

fn report(id: u32, name: &str, limit: Duration, run: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = v.pass && in_time;
    let time_note = if in_time { String::new() } else { format!(", over the {limit:?} limit") };
    println!(
        "criterion {id}: {} {name}: {} [{:.2}s{time_note}]",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, "routing cost decompositions agree", Duration::from_secs(10), cost_decompositions_agree);
    ok &= report(2, "uniqueness test matches brute force", Duration::from_secs(60), uniqueness_equivalence);
    ok &= report(3, "isolation rate on unit K6", Duration::from_secs(60), isolation_rate);

    let start = Instant::now();
    let mrct = suite(MRCT_SUITE);
    let mrct_time = start.elapsed();
    ok &= report(4, "mrct ratio", Duration::from_secs(600).saturating_sub(mrct_time), || mrct_ratio(&mrct));

    let start = Instant::now();
    let sroct = suite(SROCT_SUITE);
    let sroct_time = start.elapsed();
    ok &= report(5, "sroct ratio", Duration::from_secs(300).saturating_sub(sroct_time), || {
        ratio_verdict(&sroct, "")
    });

    let start = Instant::now();
    let w2 = suite(W2MRCT_SUITE);
    let w2_time = start.elapsed();
    ok &= report(6, "weighted two-source ratio", Duration::from_secs(300).saturating_sub(w2_time), || {
        let mut v = ratio_verdict(&w2, "");
        v.detail += &construction_details(&w2);
        v
    });

    ok &= report(7, "fail rate per trial", Duration::MAX, || fail_rate(&[&mrct, &sroct, &w2]));
    ok &= report(8, "thread-count independence", Duration::from_secs(120), determinism);
    ok &= report(9, "zero-weight branches", Duration::from_secs(5), zero_weight_corpus);

    println!("suite times: mrct {:.2}s, sroct {:.2}s, w2mrct {:.2}s", mrct_time.as_secs_f64(), sroct_time.as_secs_f64(), w2_time.as_secs_f64());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
