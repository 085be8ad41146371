//! Link-level simulator for two-phase distributed uplink joint transmission.
//!
//! A serving UE multicasts its payload to nearby collaborator UEs (phase 1),
//! then the whole group transmits jointly to the base station as a mobile
//! distributed antenna array (phase 2). This crate models both phases over
//! an urban-microcell radio environment, combines them under a time-sharing
//! constraint, selects which collaborators are worth using, and runs seeded
//! Monte Carlo sweeps that export per-point capacity statistics as CSV.
//!
//! All numeric kernels are generic over the scalar type through the
//! [`Real`] trait; the aliases at the crate root fix `f64`, which is what
//! the simulation binary uses.

pub mod channel;
pub mod error;
pub mod figures;
pub mod harness;
pub mod linalg;
pub mod phase;
pub mod real;
pub mod rfenv;
pub mod selection;
pub mod waterfill;

pub use error::{Error, Result};
pub use real::Real;

/// Complex matrix over `f64`, the default simulation precision.
pub type CMatrix64 = linalg::CMatrix<f64>;
