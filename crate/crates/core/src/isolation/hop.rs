use super::ScaledWeights;
use crate::graph::VertexId;

/// Saturating walk counter: 2 means "two or more".
type Count = u8;

fn sat_add(a: Count, b: Count) -> Count {
    (a + b).min(2)
}

/// Hop-indexed single-source table: `delta(j, x)` is the least weight of an
/// `s`–`x` walk with exactly `j` edges and `count(j, x)` how many walks reach
/// it, saturated at 2. Rows run `j = 0..n-1`.
#[derive(Debug, Clone)]
pub struct HopTable {
    source: VertexId,
    n: usize,
    delta: Vec<Option<i128>>,
    count: Vec<Count>,
}

impl HopTable {
    pub fn build(sw: &ScaledWeights<'_>, source: VertexId) -> Self {
        let g = sw.graph();
        let n = g.n();
        let mut delta = vec![None; n * n];
        let mut count = vec![0; n * n];
        delta[source] = Some(0);
        count[source] = 1;
        for j in 1..n {
            let (prev, cur) = delta.split_at_mut(j * n);
            let prev = &prev[(j - 1) * n..];
            let prev_count = &count[(j - 1) * n..j * n];
            let mut row_count = vec![0; n];
            for x in 0..n {
                let mut best: Option<i128> = None;
                let mut ways = 0;
                for &(u, e) in g.neighbors(x) {
                    let Some(du) = prev[u] else { continue };
                    let cand = du + sw.scaled(e);
                    match best {
                        Some(b) if cand > b => {}
                        Some(b) if cand == b => ways = sat_add(ways, prev_count[u]),
                        _ => {
                            best = Some(cand);
                            ways = prev_count[u];
                        }
                    }
                }
                cur[x] = best;
                row_count[x] = ways;
            }
            count[j * n..(j + 1) * n].copy_from_slice(&row_count);
        }
        HopTable {
            source,
            n,
            delta,
            count,
        }
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn delta(&self, hops: usize, x: VertexId) -> Option<i128> {
        self.delta[hops * self.n + x]
    }

    pub fn count(&self, hops: usize, x: VertexId) -> u8 {
        self.count[hops * self.n + x]
    }

    /// Least weight over walks with at most `hops` edges.
    pub fn best_within(&self, hops: usize, x: VertexId) -> Option<i128> {
        (0..=hops).filter_map(|j| self.delta(j, x)).min()
    }

    /// Smallest `(k, x)` for which two or more minimum-weight walks with at
    /// most `k` edges reach `x`.
    ///
    /// With strictly positive weights a minimum-weight walk never repeats a
    /// vertex, so counting walks here counts the paths in question.
    pub fn first_tie(&self) -> Option<(usize, VertexId)> {
        let n = self.n;
        let mut best: Vec<Option<i128>> = vec![None; n];
        let mut ways: Vec<Count> = vec![0; n];
        for k in 0..n {
            for x in 0..n {
                let Some(d) = self.delta(k, x) else { continue };
                let c = self.count(k, x);
                match best[x] {
                    Some(b) if d > b => {}
                    Some(b) if d == b => ways[x] = sat_add(ways[x], c),
                    _ => {
                        best[x] = Some(d);
                        ways[x] = c;
                    }
                }
            }
            if let Some(x) = (0..n).find(|&x| ways[x] >= 2) {
                return Some((k, x));
            }
        }
        None
    }

    /// Shortest-path distance from the source to every vertex.
    pub fn distances(&self) -> Vec<Option<i128>> {
        (0..self.n)
            .map(|x| self.best_within(self.n - 1, x))
            .collect()
    }
}

/// A source, hop bound and target with at least two minimum-weight paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness {
    pub source: VertexId,
    pub hops: usize,
    pub vertex: VertexId,
}

/// Result of the strong min-uniqueness test. The witness, when present, is
/// the lexicographically smallest `(source, hops, vertex)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniquenessReport {
    pub witness: Option<Witness>,
}

impl UniquenessReport {
    pub fn is_strongly_min_unique(&self) -> bool {
        self.witness.is_none()
    }
}

pub(super) fn tie_for_source(table: &HopTable) -> Option<Witness> {
    table.first_tie().map(|(hops, vertex)| Witness {
        source: table.source(),
        hops,
        vertex,
    })
}

/// Exact strong min-uniqueness test, parallel over sources.
pub fn check_strong_min_unique(sw: &ScaledWeights<'_>) -> UniquenessReport {
    match sw.certify() {
        Ok(_) => UniquenessReport { witness: None },
        Err(report) => report,
    }
}
