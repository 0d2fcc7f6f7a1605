//! Interleaving certificates, ε-triviality and lower bounds on the interleaving distance.

mod cert;
mod factor;
mod json;
mod local;
mod rank;
mod trivial;

pub use cert::{
    compose_certificates, direct_sum_certificates, sum_modules, identity_certificate, iso_certificate, snap_certificate, sum_certificates,
    weaken, zero_certificate, Certificate,
};
pub use factor::{factor_through_grid, FactorWitness};
pub use json::CertificateJson;
pub use local::local_change_certificate;
pub use rank::{rank_lower_bound, rank_lower_bound_with, Bound, DEFAULT_PAIR_BUDGET};
pub use trivial::{is_eps_trivial, is_strictly_eps_trivial, triviality_radius, HalfOpenBox, TrivialRegion};

use pmod_core::{CoreError, Violation};
use pmod_kan::KanError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InterleaveError {
    #[error("ε must be positive")]
    NonPositiveEps,
    #[error("ε must be non-negative")]
    NegativeEps,
    #[error("region is not {0}-trivial")]
    RegionNotTrivial(String),
    #[error("modules disagree outside the region at vertex {0:?}")]
    Disagreement(Vec<String>),
    #[error("middle modules of the composed certificates differ")]
    MiddleMismatch,
    #[error("certificate check failed: {0}")]
    Verification(String),
    #[error("mesh-width precondition failed: {0}")]
    MeshBounds(String),
    #[error("module is not {0}-trivial, so no certificate to zero exists at half that value")]
    NotTrivial(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Kan(#[from] KanError),
}

impl From<Violation> for InterleaveError {
    fn from(v: Violation) -> Self {
        InterleaveError::Verification(v.to_string())
    }
}
