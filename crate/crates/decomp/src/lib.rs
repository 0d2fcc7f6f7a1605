//! Endomorphism algebras, radicals, idempotents and decomposition into indecomposables.

pub mod algebra;
pub mod end;
pub mod split;

pub use algebra::StructAlgebra;
pub use end::{
    brute_force_is_indecomposable, end_algebra, find_idempotent, find_idempotent_with, is_indecomposable, local_report, radical,
    EndAlgebra, LocalReport, DEFAULT_SEED, DEFAULT_TRIALS,
};
pub use split::{decompose, decompose_with, fitting_split, split_by_idempotent, Decomposition, Split};

use pmod_core::{CoreError, Violation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("the zero module has no indecomposable summand")]
    ZeroModule,
    #[error("trace-form radical needs p > {dim} (got p = {p})")]
    CharacteristicTooSmall { p: u32, dim: usize },
    #[error("the endomorphism algebra is local; no nontrivial idempotent exists")]
    Local,
    #[error("no idempotent found after {trials} random trials with seed {seed}; retry with another seed or more trials")]
    Exhausted { seed: u64, trials: usize },
    #[error("endomorphism is not idempotent")]
    NotIdempotent,
    #[error("endomorphism is not natural: {0}")]
    NotNatural(Violation),
    #[error("subspaces are not preserved by the structure map at {0}")]
    NotInvariant(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}
