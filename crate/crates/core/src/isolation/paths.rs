use rayon::prelude::*;
use thiserror::Error;

use super::hop::{tie_for_source, HopTable, UniquenessReport};
use super::ScaledWeights;
use crate::cost::{CostValue, Unit};
use crate::graph::{EdgeId, Graph, Path, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("graph is not strongly min-unique under the perturbed weights")]
    NotMinUnique(UniquenessReport),
    #[error("no vertex of the target set is reachable from {0}")]
    NoneReachable(VertexId),
    #[error("target vertex set is empty")]
    EmptySet,
}

/// All-pairs distances and next-hop pointers, valid only for strongly
/// min-unique weights.
#[derive(Debug, Clone)]
pub(super) struct PathTables {
    n: usize,
    dist: Vec<Option<i128>>,
    /// `next[t * n + x]`: the neighbor of `x` one step closer to `t`, with the
    /// connecting edge.
    next: Vec<Option<(VertexId, EdgeId)>>,
}

pub(super) fn build_tables(sw: &ScaledWeights<'_>) -> Result<PathTables, UniquenessReport> {
    let g = sw.graph();
    let n = g.n();
    let rows: Vec<(Option<_>, Vec<Option<i128>>)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let table = HopTable::build(sw, s);
            (tie_for_source(&table), table.distances())
        })
        .collect();
    if let Some(witness) = rows.iter().filter_map(|(w, _)| *w).min() {
        return Err(UniquenessReport {
            witness: Some(witness),
        });
    }
    let dist: Vec<Option<i128>> = rows.into_iter().flat_map(|(_, d)| d).collect();
    let next = (0..n)
        .into_par_iter()
        .flat_map_iter(|t| {
            let row = &dist[t * n..(t + 1) * n];
            (0..n).map(move |x| next_hop(g, sw, row, t, x))
        })
        .collect();
    Ok(PathTables { n, dist, next })
}

fn next_hop(
    g: &Graph,
    sw: &ScaledWeights<'_>,
    row: &[Option<i128>],
    target: VertexId,
    x: VertexId,
) -> Option<(VertexId, EdgeId)> {
    if x == target {
        return None;
    }
    let dx = row[x]?;
    g.neighbors(x)
        .iter()
        .copied()
        .find(|&(u, e)| row[u].is_some_and(|du| du + sw.scaled(e) == dx))
}

/// Unique shortest paths of a certified strongly min-unique weighting.
#[derive(Debug, Clone, Copy)]
pub struct ShortestPaths<'a> {
    sw: &'a ScaledWeights<'a>,
    tables: &'a PathTables,
}

impl<'a> ShortestPaths<'a> {
    pub(super) fn new(sw: &'a ScaledWeights<'a>, tables: &'a PathTables) -> Self {
        ShortestPaths { sw, tables }
    }

    pub fn weights(&self) -> &'a ScaledWeights<'a> {
        self.sw
    }

    pub fn graph(&self) -> &'a Graph {
        self.sw.graph()
    }

    pub fn n(&self) -> usize {
        self.tables.n
    }

    pub fn distance(&self, s: VertexId, t: VertexId) -> Option<i128> {
        self.tables.dist[s * self.tables.n + t]
    }

    /// The edge leaving `x` on its unique shortest path to `target`.
    pub fn next_hop(&self, target: VertexId, x: VertexId) -> Option<(VertexId, EdgeId)> {
        self.tables.next[target * self.tables.n + x]
    }

    /// The unique shortest `s`–`t` path, edges ordered from `s`.
    pub fn path(&self, s: VertexId, t: VertexId) -> Option<Path> {
        self.distance(s, t)?;
        let mut path = Path::trivial(s);
        let mut cur = s;
        while cur != t {
            let (next, e) = self.next_hop(t, cur)?;
            path.vertices.push(next);
            path.edges.push(e);
            cur = next;
        }
        Some(path)
    }

    /// The smallest-id member of `set` at minimum distance from `x`.
    pub fn closest(&self, x: VertexId, set: &[bool]) -> Result<VertexId, PathError> {
        let mut best: Option<(i128, VertexId)> = None;
        let mut any = false;
        for (z, _) in set.iter().enumerate().filter(|(_, &inside)| inside) {
            any = true;
            if let Some(d) = self.distance(x, z) {
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, z));
                }
            }
        }
        match best {
            Some((_, z)) => Ok(z),
            None if any => Err(PathError::NoneReachable(x)),
            None => Err(PathError::EmptySet),
        }
    }

    /// The unique shortest path from `v` to `closest(v, set)`.
    pub fn add_path(&self, set: &[bool], v: VertexId) -> Result<Path, PathError> {
        let target = self.closest(v, set)?;
        Ok(self
            .path(v, target)
            .expect("closest vertex is reachable"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FindPath {
    /// The unique shortest path (edges ordered from `s`) and its scaled
    /// weight.
    Found { path: Path, weight: CostValue },
    NotMinUnique(UniquenessReport),
    Unreachable,
}

/// Unique shortest `s`–`t` path if the weights are strongly min-unique.
pub fn find_path(sw: &ScaledWeights<'_>, s: VertexId, t: VertexId) -> FindPath {
    match sw.certify() {
        Err(report) => FindPath::NotMinUnique(report),
        Ok(sp) => match (sp.path(s, t), sp.distance(s, t)) {
            (Some(path), Some(d)) => FindPath::Found {
                path,
                weight: CostValue::new(d, Unit::Scaled),
            },
            _ => FindPath::Unreachable,
        },
    }
}

fn membership(n: usize, set: &[VertexId]) -> Vec<bool> {
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    inside
}

/// Lexicographically first vertex of `set` at minimum distance from `x`.
pub fn closest(sw: &ScaledWeights<'_>, x: VertexId, set: &[VertexId]) -> Result<VertexId, PathError> {
    let sp = sw.certify().map_err(PathError::NotMinUnique)?;
    sp.closest(x, &membership(sp.n(), set))
}

/// Unique shortest path from `v` to the closest vertex of `set`.
pub fn add_path(sw: &ScaledWeights<'_>, set: &[VertexId], v: VertexId) -> Result<Path, PathError> {
    let sp = sw.certify().map_err(PathError::NotMinUnique)?;
    sp.add_path(&membership(sp.n(), set), v)
}
