//! Exact construction and spectral verification of two-body gadget Hamiltonians for the
//! toric code, finite-group quantum doubles, and a triangular-lattice variant.

pub mod algebra;
pub mod certify;
pub mod config;
pub mod double;
pub mod error;
pub mod group;
pub mod lattice;
pub mod model;
pub mod op;
pub mod pauli;
pub mod report;
pub mod sparse;
pub mod spectral;
pub mod subspace;
pub mod suite;

pub use error::{GadgetError, Result};
