//! Polynomial and rational solvers for planar Laplace problems, with the
//! convergence-rate theory that separates them on domains with inlets.
//!
//! The polynomial route fits `u ≈ Re p(z)` in a Vandermonde-with-Arnoldi
//! basis; the rational route adds simple poles placed outside the domain
//! (from AAA applied to the Schwarz function, to the boundary data, or
//! clustered on the known branch cuts of the inverted ellipse). The
//! [`rates`] module gives the closed-form analyticity radii and
//! degree-per-digit costs those solvers are measured against.

pub mod aaa;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod polysolver;
pub mod ratsolver;
pub mod rates;
pub mod schwarz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
