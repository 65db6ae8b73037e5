//! Numerical laboratory for chaos diagnostics in open quantum systems.
//!
//! The crate covers three connected layers:
//!
//! * mean-field dynamics of the open anisotropic Dicke model with
//!   finite-time and long-time Lyapunov exponents ([`classical`]),
//! * Lindblad dynamics of the quantum model with subsystem von Neumann
//!   entropies and fidelity out-of-time-order correlators
//!   ([`lindblad`], [`observables`]),
//! * a random-matrix Liouvillian with tunable regular-to-chaotic
//!   interpolation and complex level-spacing statistics
//!   ([`rmt`], [`spectra`]).

pub mod classical;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod lindblad;
pub mod linalg;
pub mod observables;
pub mod rmt;
pub mod sparse;
pub mod spectra;
pub mod testkit;

pub use error::{QchaosError, Result};

pub type C64 = num_complex::Complex64;
pub type CMat = ndarray::Array2<C64>;
pub type CVec = ndarray::Array1<C64>;
