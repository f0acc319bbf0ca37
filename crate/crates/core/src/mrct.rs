//! General-star approximation for the minimum routing cost spanning tree.
//!
//! A candidate is a vertex sequence `S = (v1, …, vk)`. Its core grows from
//! `{v1}` by attaching each later `vi` along its unique shortest path to the
//! closest core vertex; the star `T_S` then hangs every other vertex off the
//! core the same way. The best star over all sequences with `k <= r + 4` is
//! returned.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::cost::{routing_cost_edges, CostValue, Unit};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::isolation::{perturb, PathError, PerturbationConfig, ScaledWeights, ShortestPaths};
use crate::tree::{verify_spanning_tree, SpanningTree};
use crate::{Outcome, SolveError};

/// Default cap on the number of candidate cores.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxParams {
    epsilon: Option<Ratio<i128>>,
    r: usize,
    budget: u128,
}

impl ApproxParams {
    /// Smallest `r >= 0` with `8/(9r+2) < ε/2`.
    pub fn from_epsilon(epsilon: Ratio<i128>) -> Result<Self, SolveError> {
        if epsilon <= Ratio::from_integer(0) {
            return Err(SolveError::InvalidEpsilon);
        }
        // 9r + 2 must exceed 16/ε.
        let need = (Ratio::from_integer(16) / epsilon).floor().to_integer() + 1;
        let r = ((need - 2).max(0) + 8) / 9;
        Ok(ApproxParams {
            epsilon: Some(epsilon),
            r: usize::try_from(r).unwrap_or(usize::MAX),
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_r(r: usize) -> Self {
        ApproxParams {
            epsilon: None,
            r,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn epsilon(&self) -> Option<Ratio<i128>> {
        self.epsilon
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn budget(&self) -> u128 {
        self.budget
    }

    /// Longest candidate sequence, `r + 4`.
    pub fn max_len(&self) -> usize {
        self.r.saturating_add(4)
    }

    /// `4/3 + 8/(9r+2)`, the ratio certified under the perturbed weights.
    pub fn enumeration_bound(&self) -> Ratio<i128> {
        let r = self.r as i128;
        Ratio::new(36 * r + 32, 3 * (9 * r + 2))
    }

    /// Ratio certified in original units: `(4/3 + 8/(9r+2))·(1 + 1/(2n))`.
    pub fn guarantee(&self, n: usize) -> Ratio<i128> {
        let n = n.max(1) as i128;
        self.enumeration_bound() * Ratio::new(2 * n + 1, 2 * n)
    }
}

/// Number of repetition-free sequences of length `1..=max_len` over `n`
/// vertices, saturating.
pub fn candidate_count(n: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for k in 0..max_len.min(n) {
        term = term.saturating_mul((n - k) as u128);
        total = total.saturating_add(term);
    }
    total
}

fn check_budget(n: usize, params: &ApproxParams) -> Result<(), SolveError> {
    let candidates = candidate_count(n, params.max_len());
    if candidates > params.budget {
        return Err(SolveError::BudgetExceeded {
            candidates,
            budget: params.budget,
        });
    }
    Ok(())
}

/// The core `R_{k,S}` of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreSubtree {
    sequence: Vec<VertexId>,
    /// Ascending.
    vertices: Vec<VertexId>,
    /// Ascending.
    edges: Vec<EdgeId>,
    in_core: Vec<bool>,
}

impl CoreSubtree {
    fn singleton(n: usize, v: VertexId) -> Self {
        let mut in_core = vec![false; n];
        in_core[v] = true;
        CoreSubtree {
            sequence: vec![v],
            vertices: vec![v],
            edges: Vec::new(),
            in_core,
        }
    }

    /// Builds the core of `sequence` from certified shortest paths.
    pub fn build(sp: &ShortestPaths<'_>, sequence: &[VertexId]) -> Result<Self, PathError> {
        let (&first, rest) = sequence.split_first().ok_or(PathError::EmptySet)?;
        let mut core = CoreSubtree::singleton(sp.n(), first);
        for &v in rest {
            core = core.extend(sp, v)?;
        }
        Ok(core)
    }

    /// `R_{k+1}`: attaches `v` by its unique shortest path to the closest
    /// core vertex. A `v` already in the core adds nothing.
    pub fn extend(&self, sp: &ShortestPaths<'_>, v: VertexId) -> Result<Self, PathError> {
        let path = sp.add_path(&self.in_core, v)?;
        let mut next = self.clone();
        next.sequence.push(v);
        for &x in &path.vertices {
            if !next.in_core[x] {
                next.in_core[x] = true;
                next.vertices.push(x);
            }
        }
        next.edges.extend(path.edges.iter().copied());
        next.vertices.sort_unstable();
        next.edges.sort_unstable();
        Ok(next)
    }

    pub fn sequence(&self) -> &[VertexId] {
        &self.sequence
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.in_core[v]
    }

    pub fn membership(&self) -> &[bool] {
        &self.in_core
    }
}

/// `R_{k,S}` for a sequence under `sw`, certifying uniqueness first.
pub fn build_core(sw: &ScaledWeights<'_>, sequence: &[VertexId]) -> Result<CoreSubtree, PathError> {
    let sp = sw.certify().map_err(PathError::NotMinUnique)?;
    CoreSubtree::build(&sp, sequence)
}

/// The general star `T_S` around `core`.
///
/// Every vertex on the shortest path from `u` to its closest core vertex has
/// that same closest core vertex, so the union of those paths is exactly the
/// set of first edges.
pub fn star_from_core(sp: &ShortestPaths<'_>, core: &CoreSubtree) -> Result<SpanningTree, SolveError> {
    let n = sp.n();
    let mut edges = core.edges.clone();
    edges.reserve(n - core.vertices.len());
    for u in (0..n).filter(|&u| !core.in_core[u]) {
        let target = sp.closest(u, &core.in_core)?;
        let (_, e) = sp.next_hop(target, u).ok_or(PathError::NoneReachable(u))?;
        edges.push(e);
    }
    Ok(verify_spanning_tree(sp.graph(), &edges)?)
}

/// The general star `T_S` for a sequence under `sw`.
pub fn build_star(sw: &ScaledWeights<'_>, sequence: &[VertexId]) -> Result<SpanningTree, SolveError> {
    let sp = sw.certify().map_err(PathError::NotMinUnique)?;
    let core = CoreSubtree::build(&sp, sequence)?;
    star_from_core(&sp, &core)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxResult {
    pub tree: SpanningTree,
    pub scaled_cost: CostValue,
    pub original_cost: CostValue,
    /// The winning sequence `S`.
    pub sequence: Vec<VertexId>,
    /// Certified original-unit ratio bound.
    pub guarantee: Ratio<i128>,
    /// Number of candidate stars evaluated.
    pub candidates: u64,
}

#[derive(Debug, Clone)]
struct Best {
    cost: i128,
    sequence: Vec<VertexId>,
    tree: SpanningTree,
}

impl Best {
    fn key(&self) -> (i128, usize, &[VertexId]) {
        (self.cost, self.sequence.len(), &self.sequence)
    }
}

#[derive(Debug, Clone, Default)]
struct Search {
    best: Option<Best>,
    count: u64,
}

impl Search {
    fn offer(&mut self, cand: Best) {
        self.count += 1;
        if self.best.as_ref().is_none_or(|b| cand.key() < b.key()) {
            self.best = Some(cand);
        }
    }

    fn merge(mut self, other: Search) -> Search {
        let count = self.count + other.count;
        if let Some(b) = other.best {
            self.offer(b);
        }
        self.count = count;
        self
    }
}

fn evaluate(sp: &ShortestPaths<'_>, core: &CoreSubtree) -> Result<Best, SolveError> {
    let tree = star_from_core(sp, core)?;
    let cost = routing_cost_edges(&tree, sp.weights())?.value();
    Ok(Best {
        cost,
        sequence: core.sequence.clone(),
        tree,
    })
}

fn descend(
    sp: &ShortestPaths<'_>,
    core: &CoreSubtree,
    max_len: usize,
    out: &mut Search,
) -> Result<(), SolveError> {
    out.offer(evaluate(sp, core)?);
    if core.sequence.len() >= max_len {
        return Ok(());
    }
    for v in (0..sp.n()).filter(|&v| !core.in_core[v]) {
        descend(sp, &core.extend(sp, v)?, max_len, out)?;
    }
    Ok(())
}

fn finish(sp: &ShortestPaths<'_>, params: &ApproxParams, search: Search) -> Result<ApproxResult, SolveError> {
    let best = search.best.expect("at least one candidate");
    let original_cost = routing_cost_edges(&best.tree, sp.graph())?;
    Ok(ApproxResult {
        scaled_cost: CostValue::new(best.cost, Unit::Scaled),
        original_cost,
        sequence: best.sequence,
        guarantee: params.guarantee(sp.n()),
        candidates: search.count,
        tree: best.tree,
    })
}

/// Best general star over all sequences of length at most `r + 4`, ties
/// broken by the smallest `(k, S)`.
///
/// Sequences that name a vertex already in the core are skipped: such a
/// step leaves the core unchanged, so the shorter sequence ranks first with
/// the same tree. Work is split across the rayon pool by the first two
/// sequence elements; the result does not depend on the thread count.
pub fn approx_mrct(sp: &ShortestPaths<'_>, params: &ApproxParams) -> Result<ApproxResult, SolveError> {
    let n = sp.n();
    check_budget(n, params)?;
    let max_len = params.max_len();
    let singles: Vec<CoreSubtree> = (0..n).map(|v| CoreSubtree::singleton(n, v)).collect();
    let mut search = singles
        .par_iter()
        .map(|core| -> Result<Search, SolveError> {
            let mut s = Search::default();
            s.offer(evaluate(sp, core)?);
            Ok(s)
        })
        .try_reduce(Search::default, |a, b| Ok(a.merge(b)))?;
    if max_len >= 2 {
        let pairs: Vec<(usize, VertexId)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let deeper = pairs
            .par_iter()
            .map(|&(a, b)| -> Result<Search, SolveError> {
                let mut s = Search::default();
                descend(sp, &singles[a].extend(sp, b)?, max_len, &mut s)?;
                Ok(s)
            })
            .try_reduce(Search::default, |a, b| Ok(a.merge(b)))?;
        search = search.merge(deeper);
    }
    finish(sp, params, search)
}

/// Reference version of [`approx_mrct`] that evaluates every sequence in
/// `V^k`, repeats included, one at a time. Exponential; small inputs only.
pub fn approx_mrct_exhaustive(
    sp: &ShortestPaths<'_>,
    params: &ApproxParams,
) -> Result<ApproxResult, SolveError> {
    let n = sp.n();
    let mut search = Search::default();
    let mut seq = Vec::new();
    for k in 1..=params.max_len() {
        seq.clear();
        seq.resize(k, 0);
        loop {
            search.offer(evaluate(sp, &CoreSubtree::build(sp, &seq)?)?);
            // Next sequence in lexicographic order.
            let Some(i) = seq.iter().rposition(|&x| x + 1 < n) else {
                break;
            };
            seq[i] += 1;
            seq[i + 1..].fill(0);
        }
    }
    finish(sp, params, search)
}

/// Perturbs, certifies, and runs [`approx_mrct`].
///
/// A graph whose weights are all zero is solved with unit weights instead;
/// every spanning tree of it has original cost zero.
pub fn parallel_mrct(
    g: &Graph,
    params: &ApproxParams,
    cfg: &PerturbationConfig,
) -> Result<Outcome<ApproxResult>, SolveError> {
    if !g.is_connected() {
        return Ok(Outcome::Disconnected);
    }
    check_budget(g.n(), params)?;
    let unit;
    let host = if g.is_zero_weighted() {
        unit = g.with_weights(&vec![1; g.m()])?;
        &unit
    } else {
        g
    };
    let sw = perturb(host, cfg)?;
    let sp = match sw.certify() {
        Ok(sp) => sp,
        Err(report) => return Ok(Outcome::Fail(report)),
    };
    let mut result = approx_mrct(&sp, params)?;
    result.original_cost = routing_cost_edges(&result.tree, g)?;
    Ok(Outcome::Solved(result))
}

/// Tree distance from every vertex to the nearest core vertex.
pub fn distances_to_core(
    tree: &SpanningTree,
    sw: &ScaledWeights<'_>,
    core: &CoreSubtree,
) -> Result<Vec<i128>, crate::cost::CostError> {
    let mut best = vec![i128::MAX; tree.n()];
    for &c in core.vertices() {
        for (u, d) in tree.distances_from(sw, c)?.into_iter().enumerate() {
            best[u] = best[u].min(d.value());
        }
    }
    Ok(best)
}
