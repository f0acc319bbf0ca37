//! Randomized approximation of minimum routing cost spanning trees.
//!
//! The solvers perturb integer edge weights so that shortest paths become
//! unique with high probability, certify that uniqueness exactly, and then
//! build candidate trees from unique shortest paths:
//!
//! * [`mrct::parallel_mrct`] searches general stars over small cores.
//! * [`sroct::parallel_sroct`] picks the best shortest path tree over all
//!   roots for the sum-requirement objective.
//! * [`two_mrct::weighted_2mrct`] joins two shortest path forests for the
//!   weighted two-source objective.
//!
//! Every solver returns [`Outcome::Fail`] when the perturbation did not
//! isolate, and [`Outcome::Disconnected`] for disconnected inputs. Exact
//! brute-force solvers live in `oracle` behind the `oracle` feature.

pub mod cost;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod isolation;
pub mod mrct;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod sroct;
pub mod tree;
pub mod two_mrct;

use std::fmt;

use thiserror::Error;

pub use cost::{CostError, CostValue, EdgeWeights, Unit};
pub use graph::{Graph, GraphError, Lambda, Path, TwoSourceSpec, VertexId, EdgeId};
pub use isolation::{PerturbError, PerturbationConfig, ScaledWeights, UniquenessReport};
pub use tree::{SpanningTree, TreeError};

/// Result of a randomized solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Solved(T),
    /// The perturbed weights were not strongly min-unique.
    Fail(UniquenessReport),
    Disconnected,
}

impl<T> Outcome<T> {
    pub fn solved(self) -> Option<T> {
        match self {
            Outcome::Solved(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail(_))
    }
}

/// Which intermediate tree failed validation in the two-source construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    T1,
    T2,
    T,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::T1 => "T1",
            Construction::T2 => "T2",
            Construction::T => "T",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Path(#[from] isolation::PathError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("constructed {which} is not a tree: {source}")]
    ConstructionInvalid {
        which: Construction,
        source: TreeError,
    },
    #[error("{candidates} candidate cores exceed the budget of {budget}; raise --budget or --epsilon")]
    BudgetExceeded { candidates: u128, budget: u128 },
    #[error("epsilon must be positive")]
    InvalidEpsilon,
}
