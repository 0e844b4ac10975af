//! # steerkit
//!
//! Certification of one-way EPR steering for two-qubit states, plus a
//! simulator for the photon-counting pipeline that prepares and reconstructs
//! such states in the lab.
//!
//! The crate is organised bottom-up:
//!
//! - [`qmat`]: dense complex algebra for 2×2 and 4×4 Hermitian operators.
//! - [`states`]: the mixed singlet/product family, the θ-family, PPT checks
//!   and closest-parameter retrieval.
//! - [`steering`]: measurement meshes, assemblages, the local-hidden-state LP
//!   (column generation with exact pricing), steering certificates, critical
//!   radius brackets and steering-hierarchy classification.
//! - [`expsim`]: hologram pool, animation sampling, Poissonian coincidence
//!   counts, over-complete tomography and bootstrap.
//! - [`cli`]: the command implementations behind the `steerkit` binary.
//!
//! Every certificate that leaves this crate can be re-checked by direct
//! evaluation; LP numerics only ever decide *which* certificate to try.

#![forbid(unsafe_code)]

pub mod cli;
pub mod expsim;
pub mod qmat;
pub mod states;
pub mod steering;

mod error;

pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, DensityMatrix, Side};
