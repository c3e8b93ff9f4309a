//! Mesoscopic-leads simulator for open quadratic fermion chains.
//!
//! A finite tight-binding system is coupled to a handful of leads, each a
//! finite band of modes that is itself damped toward a Fermi distribution.
//! The joint state stays Gaussian, so everything is carried by the
//! single-particle covariance `C_ij = <d_j^dag d_i>` and its Lyapunov equation.
//!
//! Modules, bottom up:
//!
//! * [`lattice`] builds the extended single-particle model.
//! * [`gaussian`] evaluates entropies, relative entropies and fidelities.
//! * [`dynamics`] integrates the covariance and solves for its steady state.
//! * [`thermo`] turns a trajectory into currents, entropy rates and budgets.
//! * [`scenario`] runs the canned numerical experiments and writes CSV.
//! * [`oracle`] holds brute-force Fock-space references used by the tests.

pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod scenario;
pub mod thermo;

pub use error::{Error, Result};
pub use faer::c64;
