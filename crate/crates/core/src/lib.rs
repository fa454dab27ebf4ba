//! Numerical spectral zeta regularization and analytic torsion for two
//! lattice quotients: the real line modulo its integer lattice and the
//! Heisenberg group modulo its integer lattice.
//!
//! The crate provides closed-form spectra for the localized Laplacians,
//! certified truncated heat traces, Hurwitz-zeta closed forms with their
//! derivatives and Laurent data, and a generic Mellin-transform engine that
//! regularizes arbitrary heat curves. The torsion module assembles the
//! headline quantities along independent routes and reports their
//! discrepancies.

pub mod closed_forms;
pub mod error;
pub mod heat_trace;
pub mod kahan;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod spectra;
pub mod torsion;
pub mod zeta_reg;

pub use error::{Error, Result};
pub use spectra::{GroupTag, KConvention};
pub use torsion::{QuadratureSpec, Route, TorsionReport};
