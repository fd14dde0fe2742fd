//! Exact construction and verification of higher-dimensional arithmetic
//! progressions in cut-and-project model sets and Meyer sets.
//!
//! All geometry is carried out in a real quadratic field `Q(√D)`; every
//! construction is re-verified with exact arithmetic before it is returned.
//! Heuristic steps (covering radii, search radii) can only cause retries,
//! never wrong outputs.

pub mod aprank;
pub mod cli;
pub mod cps;
pub mod error;
pub mod exact;
pub mod progression;
pub mod vdw;

pub use error::{Error, Result};
