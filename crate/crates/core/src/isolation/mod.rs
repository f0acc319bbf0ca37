//! Random weight perturbation that makes shortest paths unique, the exact
//! test for strong min-uniqueness, and extraction of the unique paths.
//!
//! Perturbed weights live in a fixed-point scale: with `D = n^a`, every edge
//! gets `W(e) = w(e)·D + ρ(e)` where `ρ(e)` is uniform on `{1, …, n^b}`. All
//! downstream comparisons use these integers; original-unit values are only
//! recovered for reporting.

mod hop;
mod paths;

use std::sync::OnceLock;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cost::{EdgeWeights, Unit};
use crate::graph::{EdgeId, Graph};

pub use hop::{check_strong_min_unique, HopTable, UniquenessReport, Witness};
pub use paths::{add_path, closest, find_path, FindPath, PathError, ShortestPaths};

use paths::PathTables;

pub const DEFAULT_DENOM_EXP: u32 = 10;
pub const DEFAULT_NUMER_EXP: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerturbError {
    #[error("perturbation exponents need numer-exp >= 1 and denom-exp - numer-exp >= 4 (got a={denom_exp}, b={numer_exp})")]
    InvalidExponents { denom_exp: u32, numer_exp: u32 },
    #[error("worst-case costs for n={n} with denom-exp {denom_exp} exceed 128-bit range; lower --denom-exp (and --numer-exp)")]
    OverflowBound { n: usize, denom_exp: u32 },
    #[error("edge {0} has non-positive weight; isolated weights must be strictly positive")]
    NonPositiveWeight(EdgeId),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
}

/// Seed and exponents of the perturbation. Requires `b >= 1` and
/// `a - b >= 4` so each edge moves by at most `1/n^4` original units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PerturbationConfig {
    pub seed: u64,
    denom_exp: u32,
    numer_exp: u32,
}

impl PerturbationConfig {
    pub fn new(seed: u64, denom_exp: u32, numer_exp: u32) -> Result<Self, PerturbError> {
        if numer_exp < 1 || denom_exp < numer_exp + 4 {
            return Err(PerturbError::InvalidExponents {
                denom_exp,
                numer_exp,
            });
        }
        Ok(PerturbationConfig {
            seed,
            denom_exp,
            numer_exp,
        })
    }

    /// Exponents `a = 10`, `b = 6`.
    pub fn with_seed(seed: u64) -> Self {
        PerturbationConfig {
            seed,
            denom_exp: DEFAULT_DENOM_EXP,
            numer_exp: DEFAULT_NUMER_EXP,
        }
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn numer_exp(&self) -> u32 {
        self.numer_exp
    }

    pub fn with_seed_offset(&self, offset: u64) -> Self {
        PerturbationConfig {
            seed: self.seed.wrapping_add(offset),
            ..*self
        }
    }

    /// Upper bound `n^5 / (2·n^b)` on the probability that the perturbed
    /// graph is not strongly min-unique.
    pub fn failure_probability_bound(&self, n: usize) -> Ratio<i128> {
        let n = n as i128;
        Ratio::new(n.pow(5), 2 * n.pow(self.numer_exp))
    }
}

/// Strictly positive integer edge weights on a host graph, usually produced
/// by [`perturb`].
#[derive(Debug, Clone)]
pub struct ScaledWeights<'g> {
    graph: &'g Graph,
    scaled: Vec<i128>,
    rho: Vec<i128>,
    denom: i128,
    numer_max: i128,
    config: Option<PerturbationConfig>,
    tables: OnceLock<Result<PathTables, UniquenessReport>>,
}

fn pow(base: usize, exp: u32) -> Option<i128> {
    (base as i128).checked_pow(exp)
}

/// Worst-case magnitude of any cost functional on an `n`-vertex tree with
/// edge weights at most `max_edge` and a per-pair multiplier at most
/// `factor`: `n^3 · max_edge · factor`.
fn cost_bound(n: usize, max_edge: i128, factor: i128) -> Option<i128> {
    pow(n, 3)?.checked_mul(max_edge)?.checked_mul(factor.max(1))
}

/// Draws `ρ(e)` for every edge (in edge-id order) from a ChaCha8 stream
/// seeded with `cfg.seed`, and scales.
///
/// Fails with [`PerturbError::OverflowBound`] when routing or s.r.c. costs
/// could leave the `i128` range.
pub fn perturb<'g>(g: &'g Graph, cfg: &PerturbationConfig) -> Result<ScaledWeights<'g>, PerturbError> {
    let n = g.n();
    let overflow = PerturbError::OverflowBound {
        n,
        denom_exp: cfg.denom_exp,
    };
    let denom = pow(n, cfg.denom_exp).ok_or_else(|| overflow.clone())?;
    let numer_max = pow(n, cfg.numer_exp).ok_or_else(|| overflow.clone())?;
    let max_edge = i128::from(g.max_weight())
        .checked_mul(denom)
        .and_then(|x| x.checked_add(numer_max))
        .ok_or_else(|| overflow.clone())?;
    let factor = 2 * i128::from(g.max_requirement());
    cost_bound(n, max_edge, factor).ok_or(overflow)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let numer_max_u = numer_max as u128;
    let rho: Vec<i128> = (0..g.m())
        .map(|_| rng.gen_range(1..=numer_max_u) as i128)
        .collect();
    let scaled = g
        .edges()
        .iter()
        .zip(&rho)
        .map(|(e, &r)| i128::from(e.weight) * denom + r)
        .collect();
    Ok(ScaledWeights {
        graph: g,
        scaled,
        rho,
        denom,
        numer_max,
        config: Some(*cfg),
        tables: OnceLock::new(),
    })
}

impl<'g> ScaledWeights<'g> {
    /// Uses `weights` as given (`D = 1`, no random part). All weights must
    /// be positive.
    pub fn exact(graph: &'g Graph, weights: Vec<i128>) -> Result<Self, PerturbError> {
        if weights.len() != graph.m() {
            return Err(PerturbError::WeightCount {
                expected: graph.m(),
                got: weights.len(),
            });
        }
        if let Some(e) = weights.iter().position(|&w| w <= 0) {
            return Err(PerturbError::NonPositiveWeight(e));
        }
        Ok(ScaledWeights {
            graph,
            rho: vec![0; weights.len()],
            scaled: weights,
            denom: 1,
            numer_max: 0,
            config: None,
            tables: OnceLock::new(),
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// The fixed-point denominator `D = n^a`.
    pub fn denom(&self) -> i128 {
        self.denom
    }

    /// Largest possible random numerator `n^b` (0 for exact weights).
    pub fn numer_max(&self) -> i128 {
        self.numer_max
    }

    pub fn config(&self) -> Option<&PerturbationConfig> {
        self.config.as_ref()
    }

    pub fn scaled(&self, e: EdgeId) -> i128 {
        self.scaled[e]
    }

    pub fn scaled_weights(&self) -> &[i128] {
        &self.scaled
    }

    /// The random numerator `ρ(e)`.
    pub fn rho(&self, e: EdgeId) -> i128 {
        self.rho[e]
    }

    /// `floor(W(e) / D)`, which equals the original weight.
    pub fn descale(&self, e: EdgeId) -> i128 {
        self.scaled[e].div_euclid(self.denom)
    }

    /// Largest perturbation in original units, `max_e ρ(e) / D`.
    pub fn max_perturbation(&self) -> Ratio<i128> {
        let max = self.rho.iter().copied().max().unwrap_or(0);
        Ratio::new(max, self.denom)
    }

    /// Errors if costs with a per-pair multiplier up to `factor` could
    /// overflow.
    pub fn ensure_headroom(&self, factor: i128) -> Result<(), PerturbError> {
        let max_edge = self.scaled.iter().copied().max().unwrap_or(0);
        cost_bound(self.graph.n(), max_edge, factor)
            .map(|_| ())
            .ok_or(PerturbError::OverflowBound {
                n: self.graph.n(),
                denom_exp: self.config.map_or(0, |c| c.denom_exp),
            })
    }

    /// Runs the strong min-uniqueness test once and, on success, returns the
    /// all-pairs unique shortest paths. The outcome is cached.
    pub fn certify(&self) -> Result<ShortestPaths<'_>, UniquenessReport> {
        let tables = self.tables.get_or_init(|| paths::build_tables(self));
        match tables {
            Ok(tables) => Ok(ShortestPaths::new(self, tables)),
            Err(report) => Err(report.clone()),
        }
    }
}

impl EdgeWeights for ScaledWeights<'_> {
    fn unit(&self) -> Unit {
        Unit::Scaled
    }

    fn weight(&self, e: EdgeId) -> i128 {
        self.scaled[e]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Graph {
        Graph::new(4, [(0, 1, 3), (1, 2, 0), (2, 3, 7), (0, 3, 1)]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(PerturbationConfig::new(0, 10, 6).is_ok());
        assert!(PerturbationConfig::new(0, 5, 1).is_ok());
        assert!(PerturbationConfig::new(0, 9, 6).is_err());
        assert!(PerturbationConfig::new(0, 10, 0).is_err());
    }

    #[test]
    fn deterministic_and_in_range() {
        let g = square();
        let cfg = PerturbationConfig::with_seed(42);
        let a = perturb(&g, &cfg).unwrap();
        let b = perturb(&g, &cfg).unwrap();
        assert_eq!(a.scaled_weights(), b.scaled_weights());
        let nb = 4i128.pow(6);
        assert_eq!(a.denom(), 4i128.pow(10));
        for e in 0..g.m() {
            let rho = a.scaled(e) - i128::from(g.weight(e)) * a.denom();
            assert!((1..=nb).contains(&rho));
            assert_eq!(rho, a.rho(e));
            assert_eq!(a.descale(e), i128::from(g.weight(e)));
            assert!(a.scaled(e) > 0);
        }
        let other = perturb(&g, &PerturbationConfig::with_seed(43)).unwrap();
        assert_ne!(a.scaled_weights(), other.scaled_weights());
    }

    #[test]
    fn failure_bound_for_four_vertices() {
        let cfg = PerturbationConfig::with_seed(0);
        assert_eq!(cfg.failure_probability_bound(4), Ratio::new(1, 8));
    }

    #[test]
    fn perturbation_stays_below_n_minus_4() {
        let g = square();
        for (a, b) in [(10, 6), (5, 1), (8, 3)] {
            let cfg = PerturbationConfig::new(1, a, b).unwrap();
            let sw = perturb(&g, &cfg).unwrap();
            assert!(sw.max_perturbation() <= Ratio::new(1, 4i128.pow(4)));
        }
    }

    #[test]
    fn preflight_rejects_huge_graphs() {
        let n = 2000;
        let edges: Vec<_> = (1..n).map(|v| (0, v, 1_000_000u64)).collect();
        let g = Graph::new(n, edges).unwrap();
        let err = perturb(&g, &PerturbationConfig::with_seed(0)).unwrap_err();
        assert!(matches!(err, PerturbError::OverflowBound { n: 2000, .. }));
        let small = PerturbationConfig::new(0, 5, 1).unwrap();
        assert!(perturb(&g, &small).is_ok());
    }

    #[test]
    fn exact_weights_must_be_positive() {
        let g = square();
        assert_eq!(
            ScaledWeights::exact(&g, vec![1, 0, 2, 3]).unwrap_err(),
            PerturbError::NonPositiveWeight(1)
        );
        assert!(ScaledWeights::exact(&g, vec![1, 1, 2, 3]).is_ok());
    }
}
