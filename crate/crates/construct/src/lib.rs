//! Gluing on hyper-rectangles, the gadget `G`, thin corners, antennas, tacking, and the
//! approximation of arbitrary modules by indecomposable ones.
//!
//! Every construction returns its output together with an interleaving certificate back to its
//! input. Certificates are verified on construction and outputs are re-checked for
//! indecomposability; nothing is trusted.

mod antenna;
mod approx;
mod corner;
mod gadget;
mod rect;
mod tack;

pub use antenna::{add_antenna, has_antenna, move_antenna};
pub use approx::{approximate_indecomposable, cube_module, Approximation};
pub use corner::{add_thin_corner, has_thin_corner};
pub use gadget::{gadget_map_to_top, module_g};
pub use rect::{compress, modify_on_rectangle, summands_meet_boundary, HyperRectangle};
pub use tack::{tack, tack_pair, TackReport};

use pmod_core::{CoreError, GridModule, Q};
use pmod_decomp::DecompError;
use pmod_interleave::{Certificate, InterleaveError, TrivialRegion};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("the module is zero")]
    ZeroModule,
    #[error("the module is decomposable")]
    Decomposable,
    #[error("constructed module failed the indecomposability check: {0}")]
    NotIndecomposable(String),
    #[error("not on the pitch lattice: {0}")]
    NotOnLattice(String),
    #[error("modules disagree on the rectangle boundary at {0}")]
    Disagreement(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("this construction needs at least two parameters")]
    OneParameter,
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Interleave(#[from] InterleaveError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Which indecomposability checks a construction runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub input: bool,
    pub output: bool,
}

impl Checks {
    pub const ALL: Checks = Checks { input: true, output: true };
    pub const OUTPUT: Checks = Checks { input: false, output: true };
    pub const NONE: Checks = Checks { input: false, output: false };
}

/// One modification step: the new module, a verified certificate from the input to it, the
/// region the step was confined to, and the distinguished vertex it produced.
#[derive(Clone, Debug)]
pub struct Stage {
    pub module: Arc<GridModule>,
    pub certificate: Certificate,
    pub region: TrivialRegion,
    pub point: Vec<Q>,
}

pub(crate) fn check_indecomposable(m: &GridModule, output: bool) -> Result<(), ConstructError> {
    if m.is_zero() {
        return Err(if output { ConstructError::NotIndecomposable("zero".into()) } else { ConstructError::ZeroModule });
    }
    if pmod_decomp::is_indecomposable(m)? {
        Ok(())
    } else if output {
        Err(ConstructError::NotIndecomposable("endomorphism algebra is not local".into()))
    } else {
        Err(ConstructError::Decomposable)
    }
}

pub(crate) fn fmt_point(x: &[Q]) -> String {
    let parts: Vec<String> = x.iter().map(pmod_core::rational::fmt_q).collect();
    format!("({})", parts.join(", "))
}
