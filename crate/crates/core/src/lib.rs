//! Decoherence and geometric phase of a qubit under pure dephasing by a
//! bosonic bath (ohmic or supraohmic spectral density, exponential cutoff,
//! any temperature).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoherence_factor;
pub mod decoherence_time;
pub mod environment;
pub mod qubit_dynamics;
pub mod error;
pub mod geometric_phase;
pub mod interpolation;
pub mod quadrature;

pub use error::{Error, ErrorClass, Result};
