//! Validated spanning trees and subtrees of a host [`Graph`].

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::cost::{CostError, CostValue, EdgeWeights};
use crate::graph::{EdgeId, Graph, Path, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NotATreeReason {
    Cycle,
    Disconnected,
    WrongEdgeCount,
}

impl fmt::Display for NotATreeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NotATreeReason::Cycle => "cycle",
            NotATreeReason::Disconnected => "disconnected",
            NotATreeReason::WrongEdgeCount => "wrong-edge-count",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("not a tree: {reason}")]
    NotATree { reason: NotATreeReason },
    #[error("edge id {0} does not exist in the host graph")]
    UnknownEdge(EdgeId),
    #[error("vertex {0} is not an endpoint of a host edge")]
    NotAHostEdge(VertexId),
}

impl TreeError {
    fn not_a_tree(reason: NotATreeReason) -> Self {
        TreeError::NotATree { reason }
    }
}

/// A spanning tree of a host graph, rooted at vertex 0.
///
/// The tree does not borrow the host; weight functions are passed to the
/// cost routines and indexed by host edge id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanningTree {
    n: usize,
    /// Host edge ids, ascending.
    edges: Vec<EdgeId>,
    /// Endpoints of each host edge in `edges`, same order.
    ends: Vec<(VertexId, VertexId)>,
    parent: Vec<Option<(VertexId, EdgeId)>>,
    depth: Vec<usize>,
    /// Vertices in BFS order from the root; parents precede children.
    order: Vec<VertexId>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
}

/// Checks that `edges` form a spanning tree of `g` and builds it.
///
/// Checks run in a fixed order: repeated edge ids, then cycles, then
/// coverage.
pub fn verify_spanning_tree(g: &Graph, edges: &[EdgeId]) -> Result<SpanningTree, TreeError> {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    if let Some(&bad) = sorted.iter().find(|&&e| e >= g.m()) {
        return Err(TreeError::UnknownEdge(bad));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(TreeError::not_a_tree(NotATreeReason::WrongEdgeCount));
    }
    check_acyclic(g, &sorted)?;
    let n = g.n();
    if sorted.len() != n - 1 {
        // Acyclic with fewer than n-1 edges: some vertex is cut off.
        return Err(TreeError::not_a_tree(NotATreeReason::Disconnected));
    }

    let mut adjacency = vec![Vec::new(); n];
    let mut ends = Vec::with_capacity(sorted.len());
    for &e in &sorted {
        let edge = g.edge(e);
        adjacency[edge.u].push((edge.v, e));
        adjacency[edge.v].push((edge.u, e));
        ends.push((edge.u, edge.v));
    }
    for nbrs in &mut adjacency {
        nbrs.sort_unstable();
    }

    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &(y, e) in &adjacency[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, e));
                depth[y] = depth[x] + 1;
                queue.push_back(y);
            }
        }
    }
    if order.len() != n {
        return Err(TreeError::not_a_tree(NotATreeReason::Disconnected));
    }
    Ok(SpanningTree {
        n,
        edges: sorted,
        ends,
        parent,
        depth,
        order,
        adjacency,
    })
}

/// Checks that `edges` form a tree (connected, acyclic) on the vertices they
/// touch, and returns those vertices ascending. An empty edge set is the
/// one-vertex tree rooted at `anchor`.
pub fn verify_subtree(
    g: &Graph,
    edges: &[EdgeId],
    anchor: VertexId,
) -> Result<Vec<VertexId>, TreeError> {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    if let Some(&bad) = sorted.iter().find(|&&e| e >= g.m()) {
        return Err(TreeError::UnknownEdge(bad));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(TreeError::not_a_tree(NotATreeReason::WrongEdgeCount));
    }
    check_acyclic(g, &sorted)?;
    let mut touched = vec![false; g.n()];
    touched[anchor] = true;
    for &e in &sorted {
        touched[g.edge(e).u] = true;
        touched[g.edge(e).v] = true;
    }
    let vertices: Vec<_> = (0..g.n()).filter(|&v| touched[v]).collect();
    // An acyclic graph is connected iff it has |V| - 1 edges.
    if sorted.len() + 1 != vertices.len() {
        return Err(TreeError::not_a_tree(NotATreeReason::Disconnected));
    }
    Ok(vertices)
}

fn check_acyclic(g: &Graph, edges: &[EdgeId]) -> Result<(), TreeError> {
    let mut dsu = Dsu::new(g.n());
    for &e in edges {
        let edge = g.edge(e);
        if !dsu.union(edge.u, edge.v) {
            return Err(TreeError::not_a_tree(NotATreeReason::Cycle));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

impl SpanningTree {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Host edge ids, ascending.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// `(u, v, id)` for every tree edge with `u < v`, sorted by endpoints.
    pub fn edge_pairs(&self) -> Vec<(VertexId, VertexId, EdgeId)> {
        let mut pairs: Vec<_> = self
            .ends
            .iter()
            .zip(&self.edges)
            .map(|(&(u, v), &e)| (u, v, e))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn parent(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        self.parent[v]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    /// Vertices in BFS order from vertex 0.
    pub fn bfs_order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Number of vertices in the subtree hanging below each vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.n];
        for &v in self.order.iter().rev() {
            if let Some((p, _)) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// Tree distance from `source` to every vertex under `w`.
    pub fn distances_from<W: EdgeWeights + ?Sized>(
        &self,
        w: &W,
        source: VertexId,
    ) -> Result<Vec<CostValue>, CostError> {
        let zero = CostValue::zero(w.unit());
        let mut dist = vec![zero; self.n];
        let mut seen = vec![false; self.n];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(x) = stack.pop() {
            for &(y, e) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    dist[y] = dist[x].checked_add(CostValue::new(w.weight(e), w.unit()))?;
                    stack.push(y);
                }
            }
        }
        Ok(dist)
    }
}

/// The unique simple `s`–`u` path in `t` (edges ordered from `s`) and its
/// weight under `w`.
pub fn tree_path<W: EdgeWeights + ?Sized>(
    t: &SpanningTree,
    w: &W,
    s: VertexId,
    u: VertexId,
) -> Result<(Path, CostValue), CostError> {
    let (mut a, mut b) = (s, u);
    let mut up_from_s = Vec::new();
    let mut up_from_u = Vec::new();
    while t.depth[a] > t.depth[b] {
        let (p, e) = t.parent[a].expect("non-root has a parent");
        up_from_s.push((p, e));
        a = p;
    }
    while t.depth[b] > t.depth[a] {
        let (p, e) = t.parent[b].expect("non-root has a parent");
        up_from_u.push((b, e));
        b = p;
    }
    while a != b {
        let (pa, ea) = t.parent[a].expect("non-root has a parent");
        let (pb, eb) = t.parent[b].expect("non-root has a parent");
        up_from_s.push((pa, ea));
        up_from_u.push((b, eb));
        a = pa;
        b = pb;
    }
    let mut path = Path::trivial(s);
    for (v, e) in up_from_s {
        path.vertices.push(v);
        path.edges.push(e);
    }
    for (v, e) in up_from_u.into_iter().rev() {
        path.vertices.push(v);
        path.edges.push(e);
    }
    let mut weight = CostValue::zero(w.unit());
    for &e in &path.edges {
        weight = weight.checked_add(CostValue::new(w.weight(e), w.unit()))?;
    }
    Ok((path, weight))
}

/// Spanning tree of the zero-weight subgraph found by BFS from vertex 0, if
/// that subgraph spans `g`.
pub fn zero_weight_spanning_tree(g: &Graph) -> Option<SpanningTree> {
    let mut seen = vec![false; g.n()];
    let mut chosen = Vec::new();
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, e) in g.neighbors(x) {
            if !seen[y] && g.weight(e) == 0 {
                seen[y] = true;
                chosen.push(e);
                queue.push_back(y);
            }
        }
    }
    if chosen.len() + 1 != g.n() {
        return None;
    }
    Some(verify_spanning_tree(g, &chosen).expect("BFS tree is a spanning tree"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reason(err: TreeError) -> NotATreeReason {
        match err {
            TreeError::NotATree { reason } => reason,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn verify_examples() {
        let path = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        assert!(verify_spanning_tree(&path, &[0, 1, 2]).is_ok());

        let triangle = Graph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert_eq!(
            reason(verify_spanning_tree(&triangle, &[0, 1, 2]).unwrap_err()),
            NotATreeReason::Cycle
        );

        let g = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]).unwrap();
        assert_eq!(
            reason(verify_spanning_tree(&g, &[0, 1]).unwrap_err()),
            NotATreeReason::Disconnected
        );
        assert_eq!(
            reason(verify_spanning_tree(&g, &[0, 0, 1]).unwrap_err()),
            NotATreeReason::WrongEdgeCount
        );
        assert_eq!(
            verify_spanning_tree(&g, &[7]).unwrap_err(),
            TreeError::UnknownEdge(7)
        );
    }

    #[test]
    fn subtree_check() {
        let g = Graph::new(5, [(0, 1, 1), (1, 2, 1), (3, 4, 1), (2, 3, 1)]).unwrap();
        assert_eq!(verify_subtree(&g, &[0, 1], 0).unwrap(), vec![0, 1, 2]);
        assert_eq!(verify_subtree(&g, &[], 4).unwrap(), vec![4]);
        assert_eq!(
            reason(verify_subtree(&g, &[0, 2], 0).unwrap_err()),
            NotATreeReason::Disconnected
        );
    }

    #[test]
    fn paths_in_trees() {
        // a-b-c with unit weights.
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let t = verify_spanning_tree(&g, &[0, 1]).unwrap();
        let (p, w) = tree_path(&t, &g, 0, 2).unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(w.value(), 2);
        let (p, w) = tree_path(&t, &g, 1, 1).unwrap();
        assert!(p.is_empty());
        assert_eq!(w.value(), 0);

        // Star with center 0, leaves 1 (w=2) and 2 (w=3).
        let g = Graph::new(3, [(0, 1, 2), (0, 2, 3)]).unwrap();
        let t = verify_spanning_tree(&g, &[0, 1]).unwrap();
        let (p, w) = tree_path(&t, &g, 1, 2).unwrap();
        assert_eq!(p.vertices, vec![1, 0, 2]);
        assert_eq!(p.edges, vec![0, 1]);
        assert_eq!(w.value(), 5);
    }

    #[test]
    fn zero_tree() {
        let g = Graph::new(3, [(0, 1, 0), (1, 2, 4), (0, 2, 0)]).unwrap();
        let t = zero_weight_spanning_tree(&g).unwrap();
        assert_eq!(t.edges(), &[0, 2]);
        let g = Graph::new(3, [(0, 1, 0), (1, 2, 4)]).unwrap();
        assert!(zero_weight_spanning_tree(&g).is_none());
    }
}
