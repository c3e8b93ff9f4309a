//! Brute-force many-body references for small mode counts.
//!
//! These are deliberately naive: dense `2^D` Fock space via Jordan-Wigner and
//! a dense `4^D` Lindblad superoperator. They exist to validate the Gaussian
//! code paths and are not used by the scenarios except `oracle-check`.

pub mod fock;
pub mod lindblad;

pub use fock::{DensityOperator, FockSpace, MAX_FOCK_MODES};
pub use lindblad::{LindbladOracle, MAX_LINDBLAD_MODES};
