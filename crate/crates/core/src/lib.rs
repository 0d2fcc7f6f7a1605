//! Exact linear algebra over F_p, finite grids, grid modules, morphisms and hom spaces.

pub mod error;
pub mod field;
pub mod grid;
pub mod hom;
pub mod iso;
pub mod json;
pub mod module;
pub mod random;
pub mod rational;

pub use error::{CoreError, Violation};
pub use field::{FieldConfig, Mat};
pub use grid::{AxisMap, Grid};
pub use hom::{hom_space, HomSpace};
pub use iso::{is_isomorphic, is_isomorphic_with, IsoOutcome};
pub use module::{GridModule, ModuleMorphism};
pub use rational::Q;
