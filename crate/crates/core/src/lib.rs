//! Open cavity-QED network simulation.
//!
//! Two atoms in distant cavities joined by a fiber are evolved with a
//! microscopic master equation in the dressed basis, and the reduced atomic
//! state is scored with entropic, geometric and entanglement measures.
//! Polariton chains and multipartite tangle bounds live alongside.

pub mod chains;
pub mod correlations;
pub mod error;
pub mod mme;
pub mod multipartite;
pub mod network;
pub mod optimize;
pub mod qstate;

pub use error::{Error, Result};
pub use qstate::{ComplexMatrix, DensityOperator, SubsystemLayout};
