//! ε-indecomposability, ε-matchings between decompositions, and certified gaps between the
//! interleaving and bottleneck distances.

mod bottleneck;
mod eps_indec;
mod hk;
mod instability;

pub use bottleneck::{bottleneck_upper_bound, edge_certificate, EdgeReport, MatchOutcome, Slot};
pub use eps_indec::{is_eps_indecomposable, EpsIndecomposable};
pub use hk::max_bipartite_matching;
pub use instability::{instability_demo, CandidateBound, InstabilityReport};

use pmod_construct::ConstructError;
use pmod_core::CoreError;
use pmod_decomp::DecompError;
use pmod_interleave::InterleaveError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("ε must be positive")]
    NonPositiveEps,
    #[error("ε must be non-negative")]
    NegativeEps,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Interleave(#[from] InterleaveError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Core(#[from] CoreError),
}
