//! Exact cost functionals on spanning trees.
//!
//! All sums run over ordered vertex pairs, so a symmetric pair contributes
//! twice and the diagonal contributes nothing. Every value is an `i128`
//! carried with its unit; arithmetic is checked and mixing units is an error.

use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, TwoSourceSpec};
use crate::tree::SpanningTree;

/// Which weight function a cost was measured under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    /// The integer input weights.
    Original,
    /// Perturbed weights `w·D + ρ`.
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("cost arithmetic overflowed 128 bits")]
    Overflow,
    #[error("cannot combine {left:?} and {right:?} costs")]
    UnitMismatch { left: Unit, right: Unit },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CostValue {
    value: i128,
    unit: Unit,
}

impl CostValue {
    pub fn new(value: i128, unit: Unit) -> Self {
        CostValue { value, unit }
    }

    pub fn zero(unit: Unit) -> Self {
        CostValue { value: 0, unit }
    }

    pub fn value(&self) -> i128 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn checked_add(self, other: CostValue) -> Result<CostValue, CostError> {
        if self.unit != other.unit {
            return Err(CostError::UnitMismatch {
                left: self.unit,
                right: other.unit,
            });
        }
        self.value
            .checked_add(other.value)
            .map(|value| CostValue::new(value, self.unit))
            .ok_or(CostError::Overflow)
    }

    pub fn checked_mul(self, factor: i128) -> Result<CostValue, CostError> {
        self.value
            .checked_mul(factor)
            .map(|value| CostValue::new(value, self.unit))
            .ok_or(CostError::Overflow)
    }

    /// Compares two costs of the same unit.
    pub fn try_cmp(&self, other: &CostValue) -> Result<std::cmp::Ordering, CostError> {
        if self.unit != other.unit {
            return Err(CostError::UnitMismatch {
                left: self.unit,
                right: other.unit,
            });
        }
        Ok(self.value.cmp(&other.value))
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A weight function indexed by host edge id.
pub trait EdgeWeights: Sync {
    fn unit(&self) -> Unit;
    fn weight(&self, e: EdgeId) -> i128;
}

fn mul(a: i128, b: i128) -> Result<i128, CostError> {
    a.checked_mul(b).ok_or(CostError::Overflow)
}

fn add(a: i128, b: i128) -> Result<i128, CostError> {
    a.checked_add(b).ok_or(CostError::Overflow)
}

/// Routing cost as the plain sum of tree distances over all ordered pairs.
pub fn routing_cost_pairs<W: EdgeWeights + ?Sized>(
    t: &SpanningTree,
    w: &W,
) -> Result<CostValue, CostError> {
    let mut total = CostValue::zero(w.unit());
    for source in 0..t.n() {
        for d in t.distances_from(w, source)? {
            total = total.checked_add(d)?;
        }
    }
    Ok(total)
}

/// Routing cost via the edge decomposition: removing edge `e` splits the tree
/// into sides of sizes `a` and `n - a`, and `e` carries `2·a·(n-a)` ordered
/// pairs.
pub fn routing_cost_edges<W: EdgeWeights + ?Sized>(
    t: &SpanningTree,
    w: &W,
) -> Result<CostValue, CostError> {
    let n = t.n() as i128;
    let size = t.subtree_sizes();
    let mut total = 0i128;
    for &v in t.bfs_order() {
        if let Some((_, e)) = t.parent(v) {
            let below = size[v] as i128;
            let pairs = 2 * below * (n - below);
            total = add(total, mul(pairs, w.weight(e))?)?;
        }
    }
    Ok(CostValue::new(total, w.unit()))
}

/// Sum-requirement communication cost `Σ_{u,v} (r(u)+r(v))·d_T(u,v)` via the
/// edge decomposition: edge `e` with sides `A`, `B` contributes
/// `2·w(e)·(|A|·R(B) + |B|·R(A))`.
pub fn src_cost<W: EdgeWeights + ?Sized>(
    t: &SpanningTree,
    w: &W,
    requirements: &[u64],
) -> Result<CostValue, CostError> {
    let n = t.n() as i128;
    let mut size = vec![1i128; t.n()];
    let mut req: Vec<i128> = requirements.iter().map(|&r| i128::from(r)).collect();
    let total_req = req.iter().try_fold(0i128, |acc, &r| add(acc, r))?;
    for &v in t.bfs_order().iter().rev() {
        if let Some((p, _)) = t.parent(v) {
            size[p] += size[v];
            req[p] = add(req[p], req[v])?;
        }
    }
    let mut total = 0i128;
    for &v in t.bfs_order() {
        if let Some((_, e)) = t.parent(v) {
            let (a, ra) = (size[v], req[v]);
            let (b, rb) = (n - a, total_req - ra);
            let pairs = add(mul(a, rb)?, mul(b, ra)?)?;
            total = add(total, mul(mul(2, pairs)?, w.weight(e))?)?;
        }
    }
    Ok(CostValue::new(total, w.unit()))
}

/// The same functional as [`src_cost`], summed pair by pair.
pub fn src_cost_pairs<W: EdgeWeights + ?Sized>(
    t: &SpanningTree,
    w: &W,
    requirements: &[u64],
) -> Result<CostValue, CostError> {
    let mut total = CostValue::zero(w.unit());
    for u in 0..t.n() {
        let dist = t.distances_from(w, u)?;
        for (v, d) in dist.into_iter().enumerate() {
            let factor = i128::from(requirements[u]) + i128::from(requirements[v]);
            total = total.checked_add(d.checked_mul(factor)?)?;
        }
    }
    Ok(total)
}

/// Weighted two-source routing cost scaled by the denominator of λ:
/// `p·Σ_v d_T(s1,v) + q·Σ_v d_T(s2,v)` for λ = p/q. Values with the same
/// `q` compare like the unscaled costs.
pub fn two_source_cost<W: EdgeWeights + ?Sized>(
    t: &SpanningTree,
    w: &W,
    spec: &TwoSourceSpec,
) -> Result<CostValue, CostError> {
    let sum = |s| -> Result<CostValue, CostError> {
        t.distances_from(w, s)?
            .into_iter()
            .try_fold(CostValue::zero(w.unit()), |acc, d| acc.checked_add(d))
    };
    let p = i128::from(spec.lambda.numer());
    let q = i128::from(spec.lambda.denom());
    sum(spec.s1)?
        .checked_mul(p)?
        .checked_add(sum(spec.s2)?.checked_mul(q)?)
}
