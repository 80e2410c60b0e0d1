//! Discrete relativistic propagators on lattices.
//!
//! The crate computes phase-weighted sums over achronal lattice paths under
//! polygonal Minkowski metrics on flat, toroidal, Klein-bottle, and tropical
//! de-Sitter lattices, together with the continuous-multinomial machinery
//! needed for their continuum profiles.
//!
//! Phase bookkeeping is exact: every propagator is first assembled as a
//! [`propagators::PhaseHistogram`] mapping proper times to big-integer path
//! counts, and only collapses to a complex amplitude once a mass is chosen.

pub mod contmult;
pub mod error;
pub mod exact;
pub mod interactions;
pub mod lattice;
pub mod metrics;
pub mod paths;
pub mod propagators;

pub use error::{Error, Result};
pub use lattice::{LatticePoint, RefinedSpace, SpaceSpec};
pub use metrics::{axes_of_symmetry, AxesOfSymmetry, CausalInterval};
pub use propagators::{Amplitude, PhaseHistogram};
