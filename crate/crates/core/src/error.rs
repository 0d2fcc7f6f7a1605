use crate::field::Mat;
use thiserror::Error;

/// First failure found when checking a module or morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A matrix has the wrong shape.
    Shape { what: String, vertex: Vec<usize>, expected: (usize, usize), found: (usize, usize) },
    /// A unit square fails to commute.
    Square { vertex: Vec<usize>, axes: (usize, usize), residual: Mat },
    /// A morphism fails naturality along an edge.
    Naturality { vertex: Vec<usize>, axis: usize, residual: Mat },
    /// Any other equation that failed, described in words.
    Equation { description: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Shape { what, vertex, expected, found } => write!(
                f,
                "{what} at vertex {vertex:?}: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Violation::Square { vertex, axes, residual } => write!(
                f,
                "square at vertex {vertex:?} on axes {axes:?} does not commute (residual {}x{}, {} nonzero entries)",
                residual.rows(),
                residual.cols(),
                residual.data().iter().filter(|&&x| x != 0).count()
            ),
            Violation::Naturality { vertex, axis, residual } => write!(
                f,
                "naturality fails at vertex {vertex:?} along axis {axis} (residual {}x{})",
                residual.rows(),
                residual.cols()
            ),
            Violation::Equation { description } => f.write_str(description),
        }
    }
}

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("parameter count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("modules live on different grids")]
    GridMismatch,
    #[error("modules use different fields: p = {0} vs p = {1}")]
    FieldMismatch(u32, u32),
    #[error("vertex {0:?} is not below vertex {1:?}")]
    NotComparable(Vec<usize>, Vec<usize>),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("violation: {0}")]
    Violation(Violation),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<Violation> for CoreError {
    fn from(v: Violation) -> Self {
        CoreError::Violation(v)
    }
}
