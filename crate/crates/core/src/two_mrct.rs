//! Weighted two-source routing: split the vertices by which source they
//! should hang off, grow a shortest path tree to each source, and join the
//! two trees with one edge of the shortest `s1`–`s2` path.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::cost::{two_source_cost, CostValue};
use crate::graph::{EdgeId, Graph, Path, TwoSourceSpec, VertexId};
use crate::isolation::{perturb, PathError, PerturbationConfig, ShortestPaths};
use crate::sroct::spt_from_paths;
use crate::tree::{
    verify_spanning_tree, verify_subtree, zero_weight_spanning_tree, NotATreeReason, SpanningTree,
    TreeError,
};
use crate::{Construction, Outcome, SolveError};

/// The `Z1`/`Z2` split. `d1` and `d2` hold `q·D1(v)` and `q·D2(v)` in
/// scaled units for λ = p/q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPartition {
    pub d1: Vec<i128>,
    pub d2: Vec<i128>,
    in_z1: Vec<bool>,
}

impl ZPartition {
    pub fn in_z1(&self, v: VertexId) -> bool {
        self.in_z1[v]
    }

    pub fn z1(&self) -> Vec<VertexId> {
        (0..self.in_z1.len()).filter(|&v| self.in_z1[v]).collect()
    }

    pub fn z2(&self) -> Vec<VertexId> {
        (0..self.in_z1.len()).filter(|&v| !self.in_z1[v]).collect()
    }

    pub fn z1_size(&self) -> usize {
        self.in_z1.iter().filter(|&&b| b).count()
    }
}

/// `v ∈ Z1` iff `(p+q)·d(v,s1) + q·d(s1,s2) <= (p+q)·d(v,s2) + p·d(s1,s2)`.
pub fn classify_z(sp: &ShortestPaths<'_>, spec: &TwoSourceSpec) -> Result<ZPartition, PathError> {
    let p = i128::from(spec.lambda.numer());
    let q = i128::from(spec.lambda.denom());
    let dist = |a, b| sp.distance(a, b).ok_or(PathError::NoneReachable(a));
    let d12 = dist(spec.s1, spec.s2)?;
    let n = sp.n();
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for v in 0..n {
        d1.push((p + q) * dist(v, spec.s1)? + q * d12);
        d2.push((p + q) * dist(v, spec.s2)? + p * d12);
    }
    let in_z1 = d1.iter().zip(&d2).map(|(a, b)| a <= b).collect();
    Ok(ZPartition { d1, d2, in_z1 })
}

/// The shortest `s1`–`s2` path and the position of its crossing edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPath {
    pub path: Path,
    /// `q_j` is the last vertex before the first vertex outside `Z1`.
    pub bridge_index: usize,
}

impl QPath {
    /// `(q_j, q_{j+1}, edge)`.
    pub fn bridge(&self) -> (VertexId, VertexId, EdgeId) {
        let j = self.bridge_index;
        (self.path.vertices[j], self.path.vertices[j + 1], self.path.edges[j])
    }
}

/// `None` when the whole path lies in `Z1`.
pub fn q_path(sp: &ShortestPaths<'_>, spec: &TwoSourceSpec, z: &ZPartition) -> Option<QPath> {
    let path = sp.path(spec.s1, spec.s2)?;
    let first_out = path.vertices.iter().position(|&v| !z.in_z1(v))?;
    Some(QPath {
        path,
        bridge_index: first_out - 1,
    })
}

/// Union of the unique shortest paths from each of `members` to `target`.
fn path_union(sp: &ShortestPaths<'_>, members: &[VertexId], target: VertexId) -> Result<Vec<EdgeId>, PathError> {
    let per_vertex = members
        .par_iter()
        .map(|&v| sp.path(v, target).map(|p| p.edges).ok_or(PathError::NoneReachable(v)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges: Vec<EdgeId> = per_vertex.into_iter().flatten().collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// The zero-weight edges alone span the graph.
    ZeroSubgraph,
    /// The sources are joined by zero-weight edges: shortest path tree at
    /// `s1`.
    SourcesCoincide,
    /// Two trees joined by a bridging edge.
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct W2mrctResult {
    pub tree: SpanningTree,
    pub branch: Branch,
    /// `p·Σ d(s1,·) + q·Σ d(s2,·)` under the perturbed weights.
    pub scaled_cost: Option<CostValue>,
    /// The same functional under the original weights.
    pub original_cost: CostValue,
    pub z1_size: Option<usize>,
    pub bridge: Option<(VertexId, VertexId)>,
    pub slack: Ratio<i128>,
    /// `2·(1 + slack)`.
    pub guarantee: Ratio<i128>,
}

fn invalid(which: Construction) -> impl Fn(TreeError) -> SolveError {
    move |source| SolveError::ConstructionInvalid { which, source }
}

/// Builds `T1 ∪ T2 ∪ {q_j q_{j+1}}` from certified shortest paths.
pub fn split_tree(
    sp: &ShortestPaths<'_>,
    spec: &TwoSourceSpec,
) -> Result<(SpanningTree, ZPartition, QPath), SolveError> {
    let g = sp.graph();
    let z = classify_z(sp, spec)?;
    let t1 = path_union(sp, &z.z1(), spec.s1)?;
    let t2 = path_union(sp, &z.z2(), spec.s2)?;
    verify_subtree(g, &t1, spec.s1).map_err(invalid(Construction::T1))?;
    if !t2.is_empty() || !z.z2().is_empty() {
        verify_subtree(g, &t2, spec.s2).map_err(invalid(Construction::T2))?;
    }
    let q = q_path(sp, spec, &z).ok_or(SolveError::ConstructionInvalid {
        which: Construction::T,
        source: TreeError::NotATree {
            reason: NotATreeReason::Disconnected,
        },
    })?;
    let mut edges = t1;
    edges.extend(t2);
    edges.push(q.bridge().2);
    edges.sort_unstable();
    edges.dedup();
    let tree = verify_spanning_tree(g, &edges).map_err(invalid(Construction::T))?;
    Ok((tree, z, q))
}

/// `n² · n^b / D`.
fn slack(n: usize, numer_max: i128, denom: i128) -> Ratio<i128> {
    let n = n as i128;
    Ratio::new(n * n * numer_max, denom)
}

pub fn weighted_2mrct(
    g: &Graph,
    spec: &TwoSourceSpec,
    cfg: &PerturbationConfig,
) -> Result<Outcome<W2mrctResult>, SolveError> {
    spec.check(g)?;
    if !g.is_connected() {
        return Ok(Outcome::Disconnected);
    }
    if let Some(tree) = zero_weight_spanning_tree(g) {
        return Ok(Outcome::Solved(W2mrctResult {
            original_cost: two_source_cost(&tree, g, spec)?,
            tree,
            branch: Branch::ZeroSubgraph,
            scaled_cost: None,
            z1_size: None,
            bridge: None,
            slack: Ratio::from_integer(0),
            guarantee: Ratio::from_integer(2),
        }));
    }
    let zero_joined = {
        let comp = g.components_by(|e| g.weight(e) == 0);
        comp[spec.s1] == comp[spec.s2]
    };
    let sw = perturb(g, cfg)?;
    sw.ensure_headroom(i128::from(spec.lambda.numer()) + i128::from(spec.lambda.denom()))?;
    let sp = match sw.certify() {
        Ok(sp) => sp,
        Err(report) => return Ok(Outcome::Fail(report)),
    };
    let slack = slack(g.n(), sw.numer_max(), sw.denom());
    let (tree, branch, z1_size, bridge) = if zero_joined {
        (spt_from_paths(&sp, spec.s1)?, Branch::SourcesCoincide, None, None)
    } else {
        let (tree, z, q) = split_tree(&sp, spec)?;
        let (a, b, _) = q.bridge();
        (tree, Branch::Split, Some(z.z1_size()), Some((a, b)))
    };
    Ok(Outcome::Solved(W2mrctResult {
        scaled_cost: Some(two_source_cost(&tree, &sw, spec)?),
        original_cost: two_source_cost(&tree, g, spec)?,
        tree,
        branch,
        z1_size,
        bridge,
        guarantee: (slack + 1) * 2,
        slack,
    }))
}
