//! Exact brute-force solvers for small instances.

use std::collections::VecDeque;

use thiserror::Error;

use crate::cost::{
    routing_cost_pairs, src_cost_pairs, two_source_cost, CostError, CostValue, EdgeWeights,
};
use crate::graph::{EdgeId, Graph, TwoSourceSpec, VertexId};
use crate::tree::{verify_spanning_tree, Dsu, SpanningTree};

/// Default limit on the number of spanning trees visited.
pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph is disconnected and has no spanning tree")]
    Disconnected,
    #[error("more than {0} spanning trees")]
    CapExceeded(u64),
    #[error(transparent)]
    Cost(#[from] CostError),
}

struct Enumerator<'g, F> {
    g: &'g Graph,
    deleted: Vec<bool>,
    chosen: Vec<EdgeId>,
    cap: u64,
    seen: u64,
    visit: F,
}

impl<F: FnMut(&[EdgeId]) -> Result<(), OracleError>> Enumerator<'_, F> {
    /// True if the non-deleted edges other than `skip` still connect `g`.
    fn connected_without(&self, skip: EdgeId) -> bool {
        let n = self.g.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, e) in self.g.neighbors(x) {
                if e != skip && !self.deleted[e] && !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        reached == n
    }

    fn recurse(&mut self, i: usize, dsu: &Dsu) -> Result<(), OracleError> {
        if self.chosen.len() + 1 == self.g.n() {
            self.seen += 1;
            if self.seen > self.cap {
                return Err(OracleError::CapExceeded(self.cap));
            }
            return (self.visit)(&self.chosen);
        }
        if i == self.g.m() {
            return Ok(());
        }
        let edge = self.g.edge(i);
        let mut joined = dsu.clone();
        let include = joined.union(edge.u, edge.v);
        if include {
            self.chosen.push(i);
            self.recurse(i + 1, &joined)?;
            self.chosen.pop();
        }
        // Dropping an edge that closes a cycle is always safe; otherwise it
        // must not be a bridge of what remains.
        if !include || self.connected_without(i) {
            self.deleted[i] = true;
            let res = self.recurse(i + 1, dsu);
            self.deleted[i] = false;
            res?;
        }
        Ok(())
    }
}

/// Calls `visit` with the edge ids (ascending) of every spanning tree of
/// `g`, each exactly once, by contraction and deletion in edge-id order.
/// Returns the number of trees.
pub fn for_each_spanning_tree<F>(g: &Graph, cap: u64, visit: F) -> Result<u64, OracleError>
where
    F: FnMut(&[EdgeId]) -> Result<(), OracleError>,
{
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    let mut en = Enumerator {
        g,
        deleted: vec![false; g.m()],
        chosen: Vec::with_capacity(g.n()),
        cap,
        seen: 0,
        visit,
    };
    en.recurse(0, &Dsu::new(g.n()))?;
    Ok(en.seen)
}

pub fn enumerate_spanning_trees(g: &Graph, cap: u64) -> Result<Vec<SpanningTree>, OracleError> {
    let mut out = Vec::new();
    for_each_spanning_tree(g, cap, |edges| {
        out.push(verify_spanning_tree(g, edges).expect("enumerated edge set is a spanning tree"));
        Ok(())
    })?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub optimum: CostValue,
    /// The first optimal tree in enumeration order.
    pub tree: SpanningTree,
    pub trees_examined: u64,
}

fn argmin<F>(g: &Graph, cap: u64, mut cost: F) -> Result<ExactResult, OracleError>
where
    F: FnMut(&SpanningTree) -> Result<CostValue, CostError>,
{
    let mut best: Option<(CostValue, SpanningTree)> = None;
    let examined = for_each_spanning_tree(g, cap, |edges| {
        let tree = verify_spanning_tree(g, edges).expect("enumerated edge set is a spanning tree");
        let c = cost(&tree)?;
        if best.as_ref().is_none_or(|(b, _)| c.value() < b.value()) {
            best = Some((c, tree));
        }
        Ok(())
    })?;
    let (optimum, tree) = best.expect("connected graph has a spanning tree");
    Ok(ExactResult {
        optimum,
        tree,
        trees_examined: examined,
    })
}

/// Minimum routing cost over all spanning trees.
pub fn exact_mrct<W: EdgeWeights + ?Sized>(g: &Graph, w: &W, cap: u64) -> Result<ExactResult, OracleError> {
    argmin(g, cap, |t| routing_cost_pairs(t, w))
}

/// Minimum sum-requirement communication cost over all spanning trees.
pub fn exact_sroct<W: EdgeWeights + ?Sized>(
    g: &Graph,
    w: &W,
    requirements: &[u64],
    cap: u64,
) -> Result<ExactResult, OracleError> {
    argmin(g, cap, |t| src_cost_pairs(t, w, requirements))
}

/// Minimum weighted two-source cost (scaled by the denominator of λ).
pub fn exact_w2mrct<W: EdgeWeights + ?Sized>(
    g: &Graph,
    w: &W,
    spec: &TwoSourceSpec,
    cap: u64,
) -> Result<ExactResult, OracleError> {
    argmin(g, cap, |t| two_source_cost(t, w, spec))
}

/// Number of minimum-weight `s`–`t` paths among those with at most `k`
/// edges.
///
/// Simple paths are enumerated when every weight is positive. With a zero
/// weight present, walks of at most `k` edges are counted instead.
pub fn count_shortest_paths_bruteforce<W: EdgeWeights + ?Sized>(
    g: &Graph,
    w: &W,
    s: VertexId,
    t: VertexId,
    k: usize,
) -> u64 {
    let simple = (0..g.m()).all(|e| w.weight(e) > 0);
    let mut best: Option<(i128, u64)> = None;
    let mut on_path = vec![false; g.n()];
    on_path[s] = true;
    walk(g, w, s, t, k, 0, simple, &mut on_path, &mut best);
    best.map_or(0, |(_, c)| c)
}

#[allow(clippy::too_many_arguments)]
fn walk<W: EdgeWeights + ?Sized>(
    g: &Graph,
    w: &W,
    x: VertexId,
    t: VertexId,
    left: usize,
    weight: i128,
    simple: bool,
    on_path: &mut [bool],
    best: &mut Option<(i128, u64)>,
) {
    if x == t {
        match best {
            Some((b, c)) if *b == weight => *c += 1,
            Some((b, _)) if *b < weight => {}
            _ => *best = Some((weight, 1)),
        }
        if simple {
            return;
        }
    }
    if left == 0 {
        return;
    }
    for &(y, e) in g.neighbors(x) {
        if simple && on_path[y] {
            continue;
        }
        on_path[y] = true;
        walk(g, w, y, t, left - 1, weight + w.weight(e), simple, on_path, best);
        on_path[y] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Lambda;

    fn complete(n: usize, w: u64) -> Graph {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v, w)))
            .collect();
        Graph::new(n, edges).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let path = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        assert_eq!(enumerate_spanning_trees(&path, DEFAULT_CAP).unwrap().len(), 1);
        assert_eq!(enumerate_spanning_trees(&complete(3, 1), DEFAULT_CAP).unwrap().len(), 3);
        let k4 = enumerate_spanning_trees(&complete(4, 1), DEFAULT_CAP).unwrap();
        assert_eq!(k4.len(), 16);
        let mut sets: Vec<_> = k4.iter().map(|t| t.edges().to_vec()).collect();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), 16);
        assert_eq!(for_each_spanning_tree(&complete(5, 1), DEFAULT_CAP, |_| Ok(())).unwrap(), 125);
        assert_eq!(
            for_each_spanning_tree(&complete(5, 1), 10, |_| Ok(())),
            Err(OracleError::CapExceeded(10))
        );
        let split = Graph::new(2, []).unwrap();
        assert_eq!(enumerate_spanning_trees(&split, 5), Err(OracleError::Disconnected));
        let one = Graph::new(1, []).unwrap();
        assert_eq!(enumerate_spanning_trees(&one, 5).unwrap().len(), 1);
    }

    #[test]
    fn exact_examples() {
        let tri = Graph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)]).unwrap();
        let res = exact_mrct(&tri, &tri, DEFAULT_CAP).unwrap();
        assert_eq!(res.optimum.value(), 8);
        assert_eq!(res.tree.edges(), &[0, 1]);
        assert_eq!(res.trees_examined, 3);

        let k4 = complete(4, 1);
        let res = exact_mrct(&k4, &k4, DEFAULT_CAP).unwrap();
        assert_eq!(res.optimum.value(), 18);

        let zero = Graph::new(3, [(0, 1, 3), (1, 2, 2), (0, 2, 1)]).unwrap();
        assert_eq!(exact_sroct(&zero, &zero, &[0, 0, 0], DEFAULT_CAP).unwrap().optimum.value(), 0);

        // Triangle 1,2,3 with unit requirements: trees {1,2}: pair sums
        // 2·(1+2+3)·2 = 24; {1,3}: 2·(1+3+4)·2 = 32; {2,3}: 2·(2+3+5)·2 = 40.
        let tri = Graph::new(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)]).unwrap();
        let res = exact_sroct(&tri, &tri, &[1, 1, 1], DEFAULT_CAP).unwrap();
        assert_eq!(res.optimum.value(), 24);
        assert_eq!(res.tree.edges(), &[0, 1]);
    }

    #[test]
    fn coincident_sources_double_distance_sum() {
        let g = Graph::new(4, [(0, 1, 2), (1, 2, 1), (2, 3, 4), (0, 3, 3), (0, 2, 5)]).unwrap();
        let spec = TwoSourceSpec::new(1, 1, Lambda::one());
        let two = exact_w2mrct(&g, &g, &spec, DEFAULT_CAP).unwrap();
        let mut best = i128::MAX;
        for t in enumerate_spanning_trees(&g, DEFAULT_CAP).unwrap() {
            let sum: i128 = t.distances_from(&g, 1).unwrap().iter().map(|d| d.value()).sum();
            best = best.min(sum);
        }
        assert_eq!(two.optimum.value(), 2 * best);
    }

    #[test]
    fn path_counts() {
        let g = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]).unwrap();
        assert_eq!(count_shortest_paths_bruteforce(&g, &g, 0, 0, 0), 1);
        assert_eq!(count_shortest_paths_bruteforce(&g, &g, 0, 2, 2), 2);
        assert_eq!(count_shortest_paths_bruteforce(&g, &g, 0, 2, 1), 0);
        assert_eq!(count_shortest_paths_bruteforce(&g, &g, 0, 1, 3), 1);

        let path = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(count_shortest_paths_bruteforce(&path, &path, 0, 2, 1), 0);

        // Zero weights count walks: 0 -> 1 -> 0 ties the empty walk.
        let zero = Graph::new(2, [(0, 1, 0)]).unwrap();
        assert_eq!(count_shortest_paths_bruteforce(&zero, &zero, 0, 0, 0), 1);
        assert_eq!(count_shortest_paths_bruteforce(&zero, &zero, 0, 0, 2), 2);
    }
}
