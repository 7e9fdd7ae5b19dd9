//! Finite-element spectral machinery for a pair of hard-wall-bound particles
//! on the half-line.
//!
//! The two-particle configuration space `{x > 0, y > 0, |x - y| < d}` and
//! its comparison domains (diagonal and axis-aligned crosses, the Neumann
//! square and the cross arms) are meshed with a criss-cross triangulation,
//! discretized with piecewise-linear elements, and analysed with a sparse
//! shift-invert Lanczos eigensolver plus exact inertia counting.
//!
//! The crate is `no_std` and only needs `alloc`. IO, reports and the CLI
//! live in the companion `pairspec` crate.

#![no_std]

extern crate alloc;

mod dense;
mod error;
mod ordering;

pub mod bracketing;
pub mod eigensolve;
pub mod femassembly;
pub mod geometry;
pub mod ldl;
pub mod sparse;
pub mod spectral_reference;

pub use bracketing::{
    build_bracket_pair, build_embedding, BracketCounts, BracketPair, EmbeddingMap,
};
pub use dense::{dense_generalized_eigen, DenseEigen};
pub use eigensolve::{
    count_below, lowest_eigenpairs, lowest_eigenpairs_with, rayleigh_quotient, residual,
    EigenMethod, EigenOptions, InertiaCounter, SpectralResult,
};
pub use error::Error;
pub use femassembly::{
    assemble, assemble_domain, assemble_unconstrained, reduce_to_sector, AssembledSystem,
    SectorLabel,
};
pub use geometry::{
    make_domain, map_nodes, reflect_or_translate_nodes, triangulate, BoundaryFamily,
    BoundaryOrigin, BoundaryTag, DomainKind, DomainSpec, Isometry, Mesh, PairParameters,
    ScaleVariant,
};
pub use sparse::SymCsr;
pub use spectral_reference::{
    domain_threshold, sector_threshold, square_neumann_spectrum, strip_threshold, ThresholdCatalog,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
