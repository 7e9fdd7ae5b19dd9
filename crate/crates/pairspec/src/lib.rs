//! Command-line driver, reports and file formats for `pairspec-core`.

pub mod error;
pub mod extrapolate;
pub mod io;
pub mod report;
pub mod solve;
pub mod sweep;
pub mod verify;

pub use error::{PairspecError, Result};
