//! Exact time-dependent states of a particle in an infinite square well,
//! built from Jacobi theta functions, together with their phase-space
//! (Wigner comb, probability flow) and Gibbs-ensemble descriptions.
//!
//! Natural units `m = l = hbar = 1` are the default; every operation accepts
//! arbitrary positive [`SystemParams`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod field;
pub mod numerics;
pub mod phase_space;
mod series;
pub mod theta;
pub mod thermo;
pub mod verify;
pub mod wavefunction;

pub use error::{Error, Result};
pub use numerics::{FieldSample, SampleTag, Truncation};
pub use wavefunction::{DerivedScales, QuantumState, SystemParams};
