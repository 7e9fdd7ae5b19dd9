use core::fmt;

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    InvalidParameter(String),
    /// `numerator / spacing` is not an integer, so the boundary line would
    /// not be a union of mesh edges.
    NonConforming {
        what: &'static str,
        ratio: f64,
    },
    /// A mesh or node map violates conformity.
    Mesh(String),
    /// No node of the target mesh sits at the image of `node`.
    UnmatchedNode {
        node: usize,
        x: f64,
        y: f64,
    },
    /// The mesh is not symmetric under the exchange `x <-> y`.
    NotExchangeSymmetric,
    /// Matrices have inconsistent shapes or patterns.
    Dimension(String),
    /// The factorization hit a (near-)zero pivot: the shift sits within the
    /// pivot tolerance of an eigenvalue.
    NearEigenvalue {
        shift: f64,
        pivot_index: usize,
        pivot_ratio: f64,
    },
    /// `B` failed to be positive definite.
    NotPositiveDefinite,
    /// The iterative eigensolver ran out of budget before certifying all pairs.
    NoConvergence {
        requested: usize,
        residuals: Vec<f64>,
    },
    ZeroVector,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonConforming { what, ratio } => {
                write!(f, "{what} is not an integer multiple of the mesh spacing (ratio {ratio})")
            }
            Error::Mesh(msg) => write!(f, "mesh error: {msg}"),
            Error::UnmatchedNode { node, x, y } => {
                write!(f, "node {node} maps to ({x}, {y}), which is not a node of the target mesh")
            }
            Error::NotExchangeSymmetric => f.write_str("mesh is not symmetric under x <-> y"),
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::NearEigenvalue { shift, pivot_index, pivot_ratio } => write!(
                f,
                "shift {shift} is numerically an eigenvalue (pivot {pivot_index} has relative size {pivot_ratio:e}); perturb it"
            ),
            Error::NotPositiveDefinite => f.write_str("mass matrix is not positive definite"),
            Error::NoConvergence { requested, residuals } => write!(
                f,
                "eigensolver did not certify {requested} pairs; achieved residuals {residuals:?}"
            ),
            Error::ZeroVector => f.write_str("zero vector has no Rayleigh quotient"),
        }
    }
}

impl core::error::Error for Error {}
