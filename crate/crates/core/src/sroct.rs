//! Shortest path trees for the sum-requirement communication cost.
//!
//! With unique shortest paths every root has exactly one shortest path
//! tree. The solver builds all `n` of them and keeps the cheapest.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::cost::{src_cost, CostValue, Unit};
use crate::graph::{Graph, VertexId};
use crate::isolation::{perturb, PathError, PerturbationConfig, ScaledWeights, ShortestPaths};
use crate::tree::{verify_spanning_tree, zero_weight_spanning_tree, SpanningTree};
use crate::{Outcome, SolveError};

/// How a tree was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// The zero-weight edges alone span the graph.
    ZeroSubgraph,
    /// Perturbed weights were certified and searched.
    Perturbed,
}

/// The unique shortest path tree rooted at `root`.
pub fn spt_from_paths(sp: &ShortestPaths<'_>, root: VertexId) -> Result<SpanningTree, SolveError> {
    let edges = (0..sp.n())
        .filter(|&y| y != root)
        .map(|y| {
            sp.next_hop(root, y)
                .map(|(_, e)| e)
                .ok_or(PathError::NoneReachable(y))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(verify_spanning_tree(sp.graph(), &edges)?)
}

/// The union of the unique shortest paths from `root`, certifying uniqueness
/// first.
pub fn shortest_path_tree(sw: &ScaledWeights<'_>, root: VertexId) -> Result<SpanningTree, SolveError> {
    let sp = sw.certify().map_err(PathError::NotMinUnique)?;
    spt_from_paths(&sp, root)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SroctResult {
    pub tree: SpanningTree,
    pub root: VertexId,
    pub branch: Branch,
    /// Absent on the zero-subgraph branch, which never perturbs.
    pub scaled_src_cost: Option<CostValue>,
    pub original_src_cost: CostValue,
    pub slack: Ratio<i128>,
    /// `2·(1 + slack)`.
    pub guarantee: Ratio<i128>,
}

/// Largest `r(u) + r(v)` over distinct `u`, `v`.
pub fn max_pair_requirement(g: &Graph) -> i128 {
    let mut top = [0u64; 2];
    for &r in g.requirements() {
        if r > top[0] {
            top = [r, top[0]];
        } else if r > top[1] {
            top[1] = r;
        }
    }
    if g.n() < 2 {
        return 0;
    }
    i128::from(top[0]) + i128::from(top[1])
}

/// `max(r(u)+r(v)) · n³ · n^b / (2 · D · max r)`, zero when every
/// requirement is zero.
///
/// The perturbation adds at most `max(r(u)+r(v)) · n³ · n^b / D` to the
/// cost of any tree, while every tree costs at least `2 · max r` in original
/// units once the zero-weight edges do not span.
pub fn slack(g: &Graph, sw: &ScaledWeights<'_>) -> Ratio<i128> {
    let max_r = i128::from(g.max_requirement());
    if max_r == 0 {
        return Ratio::from_integer(0);
    }
    let n3 = (g.n() as i128).pow(3);
    Ratio::new(max_pair_requirement(g) * n3 * sw.numer_max(), 2 * sw.denom() * max_r)
}

/// Minimum over roots of the s.r.c. cost of the shortest path tree; ties go
/// to the smallest root.
pub fn best_root(sp: &ShortestPaths<'_>) -> Result<(VertexId, SpanningTree, CostValue), SolveError> {
    let g = sp.graph();
    let candidates = (0..sp.n())
        .into_par_iter()
        .map(|root| -> Result<_, SolveError> {
            let tree = spt_from_paths(sp, root)?;
            let cost = src_cost(&tree, sp.weights(), g.requirements())?;
            Ok((cost.value(), root, tree))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (cost, root, tree) = candidates
        .into_iter()
        .min_by_key(|&(c, r, _)| (c, r))
        .expect("graph has a vertex");
    Ok((root, tree, CostValue::new(cost, Unit::Scaled)))
}

pub fn parallel_sroct(g: &Graph, cfg: &PerturbationConfig) -> Result<Outcome<SroctResult>, SolveError> {
    if !g.is_connected() {
        return Ok(Outcome::Disconnected);
    }
    if let Some(tree) = zero_weight_spanning_tree(g) {
        let zero = Ratio::from_integer(0);
        return Ok(Outcome::Solved(SroctResult {
            original_src_cost: src_cost(&tree, g, g.requirements())?,
            tree,
            root: 0,
            branch: Branch::ZeroSubgraph,
            scaled_src_cost: None,
            slack: zero,
            guarantee: Ratio::from_integer(2),
        }));
    }
    let sw = perturb(g, cfg)?;
    let sp = match sw.certify() {
        Ok(sp) => sp,
        Err(report) => return Ok(Outcome::Fail(report)),
    };
    let (root, tree, scaled) = best_root(&sp)?;
    let slack = slack(g, &sw);
    Ok(Outcome::Solved(SroctResult {
        original_src_cost: src_cost(&tree, g, g.requirements())?,
        tree,
        root,
        branch: Branch::Perturbed,
        scaled_src_cost: Some(scaled),
        guarantee: (slack + 1) * 2,
        slack,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isolation::ScaledWeights;

    #[test]
    fn spt_examples() {
        let star = Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1)]).unwrap();
        let sw = ScaledWeights::exact(&star, vec![2, 3, 4, 9]).unwrap();
        assert_eq!(shortest_path_tree(&sw, 0).unwrap().edges(), &[0, 1, 2]);

        let edge = Graph::new(2, [(0, 1, 5)]).unwrap();
        let sw = ScaledWeights::exact(&edge, vec![5]).unwrap();
        assert_eq!(shortest_path_tree(&sw, 1).unwrap().edges(), &[0]);
    }

    #[test]
    fn spt_preserves_root_distances() {
        let k4 = Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)])
            .unwrap();
        let sw = ScaledWeights::exact(&k4, vec![5, 10, 20, 3, 8, 4]).unwrap();
        let sp = sw.certify().unwrap();
        for root in 0..4 {
            let t = spt_from_paths(&sp, root).unwrap();
            let d = t.distances_from(&sw, root).unwrap();
            for y in 0..4 {
                assert_eq!(Some(d[y].value()), sp.distance(root, y));
            }
        }
        // From 0: 0-1 (5), then 1-2 (8 < 10), then 2-3 (12 < 13 < 20).
        assert_eq!(spt_from_paths(&sp, 0).unwrap().edges(), &[0, 3, 5]);
    }

    #[test]
    fn zero_requirements_cost_nothing() {
        let g = Graph::new(3, [(0, 1, 2), (1, 2, 3), (0, 2, 4)]).unwrap();
        let res = parallel_sroct(&g, &PerturbationConfig::with_seed(0)).unwrap().solved().unwrap();
        assert_eq!(res.original_src_cost.value(), 0);
        assert_eq!(res.slack, Ratio::from_integer(0));
        assert_eq!(res.branch, Branch::Perturbed);
    }

    #[test]
    fn zero_subgraph_branch() {
        let g = Graph::with_requirements(3, [(0, 1, 0), (1, 2, 0), (0, 2, 7)], vec![1, 2, 3]).unwrap();
        let res = parallel_sroct(&g, &PerturbationConfig::with_seed(0)).unwrap().solved().unwrap();
        assert_eq!(res.branch, Branch::ZeroSubgraph);
        assert_eq!(res.tree.edges(), &[0, 1]);
        assert_eq!(res.original_src_cost.value(), 0);

        let split = Graph::new(2, []).unwrap();
        assert_eq!(parallel_sroct(&split, &PerturbationConfig::with_seed(0)).unwrap(), Outcome::Disconnected);
    }

    #[test]
    fn best_root_is_argmin() {
        let g = Graph::with_requirements(
            5,
            [(0, 1, 3), (1, 2, 1), (2, 3, 4), (3, 4, 1), (0, 4, 2), (1, 3, 2)],
            vec![3, 0, 1, 2, 0],
        )
        .unwrap();
        let sw = perturb(&g, &PerturbationConfig::with_seed(11)).unwrap();
        let sp = sw.certify().unwrap();
        let (root, _, cost) = best_root(&sp).unwrap();
        for x in 0..5 {
            let t = spt_from_paths(&sp, x).unwrap();
            let c = src_cost(&t, &sw, g.requirements()).unwrap();
            assert!(cost.value() <= c.value());
            if c.value() == cost.value() {
                assert!(root <= x);
            }
        }
    }

    #[test]
    fn slack_formula() {
        let g = Graph::with_requirements(2, [(0, 1, 1)], vec![1, 3]).unwrap();
        let sw = perturb(&g, &PerturbationConfig::new(0, 5, 1).unwrap()).unwrap();
        // 4 · 8 · 2 / (2 · 32 · 3)
        assert_eq!(slack(&g, &sw), Ratio::new(64, 192));
        assert_eq!(max_pair_requirement(&g), 4);
    }
}
