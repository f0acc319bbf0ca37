//! Simple undirected graphs with nonnegative integer edge weights and vertex
//! requirements.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cost::Unit;

/// Vertices are `0..n`; the lexicographic vertex order is numeric order.
pub type VertexId = usize;
/// Index into [`Graph::edges`].
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    /// Smaller endpoint.
    pub u: VertexId,
    /// Larger endpoint.
    pub v: VertexId,
    pub weight: u64,
}

impl Edge {
    /// The endpoint that is not `x`. `x` must be an endpoint.
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("expected {expected} requirements, got {got}")]
    RequirementCount { expected: usize, got: usize },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
}

/// Immutable simple undirected graph.
///
/// Edge ids follow insertion order; endpoints are stored with `u < v`.
/// Adjacency lists are sorted by neighbor id so every traversal visits
/// neighbors in lexicographic order.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    requirements: Vec<u64>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges && self.requirements == other.requirements
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph from `(u, v, weight)` triples. Requirements default to 0.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, u64)>,
    ) -> Result<Self, GraphError> {
        Self::with_requirements(n, edges, vec![0; n])
    }

    pub fn with_requirements(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, u64)>,
        requirements: Vec<u64>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        if requirements.len() != n {
            return Err(GraphError::RequirementCount {
                expected: n,
                got: requirements.len(),
            });
        }
        let mut list = Vec::new();
        let mut index = HashMap::new();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b, weight) in edges {
            for vertex in [a, b] {
                if vertex >= n {
                    return Err(GraphError::VertexOutOfRange { vertex, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = (a.min(b), a.max(b));
            let id = list.len();
            if index.insert((u, v), id).is_some() {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            list.push(Edge { u, v, weight });
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: list,
            requirements,
            adjacency,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn weight(&self, e: EdgeId) -> u64 {
        self.edges[e].weight
    }

    pub fn requirement(&self, v: VertexId) -> u64 {
        self.requirements[v]
    }

    pub fn requirements(&self) -> &[u64] {
        &self.requirements
    }

    /// Neighbors of `v` with the connecting edge, ascending by neighbor.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn max_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }

    pub fn max_requirement(&self) -> u64 {
        self.requirements.iter().copied().max().unwrap_or(0)
    }

    /// True when every edge weight is zero (vacuously true without edges).
    pub fn is_zero_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 0)
    }

    /// Same topology and requirements, new weights (by edge id).
    pub fn with_weights(&self, weights: &[u64]) -> Result<Graph, GraphError> {
        if weights.len() != self.m() {
            return Err(GraphError::WeightCount {
                expected: self.m(),
                got: weights.len(),
            });
        }
        let mut g = self.clone();
        for (edge, &w) in g.edges.iter_mut().zip(weights) {
            edge.weight = w;
        }
        Ok(g)
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self)
    }

    /// Connected-component label of every vertex, using only the edges for
    /// which `keep` returns true. Labels are assigned in order of the
    /// smallest vertex of each component.
    pub fn components_by(&self, keep: impl Fn(EdgeId) -> bool) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(x) = stack.pop() {
                for &(y, e) in &self.adjacency[x] {
                    if label[y] == usize::MAX && keep(e) {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

impl crate::cost::EdgeWeights for Graph {
    fn unit(&self) -> Unit {
        Unit::Original
    }

    fn weight(&self, e: EdgeId) -> i128 {
        i128::from(self.edges[e].weight)
    }
}

/// True iff `g` has a single connected component (weights ignored).
pub fn is_connected(g: &Graph) -> bool {
    g.components_by(|_| true).iter().all(|&c| c == 0)
}

/// The subgraph on the same vertex set formed by the zero-weight edges.
pub fn zero_weight_subgraph(g: &Graph) -> Graph {
    let edges = g
        .edges
        .iter()
        .filter(|e| e.weight == 0)
        .map(|e| (e.u, e.v, 0));
    Graph::with_requirements(g.n, edges, g.requirements.clone())
        .expect("subgraph of a valid graph is valid")
}

/// True when the zero-weight edges alone connect every vertex.
pub fn zero_subgraph_spans(g: &Graph) -> bool {
    g.components_by(|e| g.weight(e) == 0).iter().all(|&c| c == 0)
}

/// A walk through the graph as its vertex sequence and the edges between
/// consecutive vertices. `edges.len() + 1 == vertices.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Path {
    /// The zero-edge path sitting at `v`.
    pub fn trivial(v: VertexId) -> Self {
        Path {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("paths have at least one vertex")
    }

    pub fn reversed(&self) -> Path {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.reverse();
        edges.reverse();
        Path { vertices, edges }
    }
}

/// The weight λ = p/q ≥ 1 of the first source in the two-source objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lambda {
    p: u64,
    q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("lambda must be written p/q or p with positive integers")]
    Malformed,
    #[error("lambda {p}/{q} is below 1")]
    BelowOne { p: u64, q: u64 },
}

impl Lambda {
    pub fn new(p: u64, q: u64) -> Result<Self, LambdaError> {
        if q == 0 || p == 0 {
            return Err(LambdaError::Malformed);
        }
        if p < q {
            return Err(LambdaError::BelowOne { p, q });
        }
        Ok(Lambda { p, q })
    }

    pub fn one() -> Self {
        Lambda { p: 1, q: 1 }
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }
}

impl FromStr for Lambda {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p = p.parse().map_err(|_| LambdaError::Malformed)?;
        let q = q.parse().map_err(|_| LambdaError::Malformed)?;
        Lambda::new(p, q)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Sources and λ for the weighted two-source routing cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoSourceSpec {
    pub s1: VertexId,
    pub s2: VertexId,
    pub lambda: Lambda,
}

impl TwoSourceSpec {
    pub fn new(s1: VertexId, s2: VertexId, lambda: Lambda) -> Self {
        TwoSourceSpec { s1, s2, lambda }
    }

    pub fn check(&self, g: &Graph) -> Result<(), GraphError> {
        for vertex in [self.s1, self.s2] {
            if vertex >= g.n() {
                return Err(GraphError::VertexOutOfRange { vertex, n: g.n() });
            }
        }
        Ok(())
    }
}
