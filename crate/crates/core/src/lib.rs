//! Numerical workbench for time-independent Hamiltonian simulation.
//!
//! The crate builds `exp(-iHt)` for decomposed Hamiltonians `H = sum H_i` two
//! ways and compares them head to head:
//!
//! * a block-encoding route: each factor's evolution unitary is converted back
//!   into an encoding of the factor itself, the encodings are combined into an
//!   encoding of `pi H / (2m)`, and polynomial evolution via the Bessel /
//!   Chebyshev expansion of `exp(-ixt)` reconstructs the full evolution with
//!   error scaling polylogarithmically in the inverse target error;
//! * the product-formula route: symmetric Suzuki formulas `S_2k` with
//!   segmented time, whose cost scales as a power of the inverse error.
//!
//! Everything runs on dense complex matrices at desk scale (dimension cap
//! 4096, overridable through `HAMSIM_MAX_DIM`), with a Jacobi eigensolver as
//! the exact-arithmetic oracle behind every correctness check.

pub mod blockenc;
pub mod error;
pub mod hamlib;
pub mod jacobi_anger;
pub mod matkernel;
pub mod pipeline;
pub mod qet;
pub mod rng;
pub mod stats;
pub mod trotter;
pub mod unitary_log;

pub use error::{Error, Result};
pub use matkernel::ComplexMatrix;
