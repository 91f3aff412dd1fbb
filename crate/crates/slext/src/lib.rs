//! Numerical toolkit for nonnegative self-adjoint extensions of strictly
//! positive Sturm-Liouville operators
//!
//!   tau u = (1/r) ( -(p u')' + q u )       on (a, b),
//!
//! where one or both endpoints may be singular but nonoscillatory (limit
//! circle). Solutions carry a quasi-derivative `u^[1] = p u'`, and boundary
//! behaviour at a singular endpoint is expressed through generalized boundary
//! values built from Wronskians against a principal/nonprincipal solution
//! pair of `tau u = 0`.
//!
//! The crate provides:
//!
//! * problem setup with closed-form endpoint seeds ([`problem`]),
//! * an adaptive Runge-Kutta integrator and singularity-aware quadrature
//!   ([`odecore`]),
//! * generalized boundary values and the scalar data pack that drives the
//!   extension theory ([`boundary`]),
//! * the classification of nonnegative extensions by boundary conditions,
//!   including the Friedrichs and Krein-von Neumann endpoints of the order
//!   ([`extensions`]),
//! * eigenvalue computation through characteristic functions ([`spectra`]),
//! * reflection-symmetric decompositions and two-interval couplings
//!   ([`symmetric`]),
//! * Bessel-type model problems, Lamb-type zeros and the associated sharp
//!   Hardy constants ([`bessel`]).
//!
//! Everything is driven by a single [`NumericsConfig`]; the defaults match
//! the tolerances promised by the command line tool `slext`.

pub mod bessel;
pub mod boundary;
pub mod cli;
pub mod config;
pub mod error;
mod expr;
pub mod extensions;
pub mod odecore;
pub mod problem;
pub mod selftest;
pub mod spectra;
pub mod symmetric;

pub use config::NumericsConfig;
pub use error::{Error, Result};
pub use problem::{builtin_bessel, builtin_regular, builtin_symmetric_bessel, Problem};
