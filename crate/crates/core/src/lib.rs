//! Sine and cosine transforms of isotropic measures on the sphere, the convex
//! bodies they induce, and numerical verification of the volume inequalities
//! relating them.
//!
//! Module map:
//! - [`numerics`]: dimension constants, sphere quadrature, Gegenbauer ratios.
//! - [`measures`]: atomic spherical measures and isotropic generators.
//! - [`transforms`]: sine/cosine transforms and Funk–Hecke multipliers.
//! - [`bodies`]: support-function bodies, gauges, polar and direct volumes.
//! - [`bltheory`]: rank `n−1` Brascamp–Lieb machinery and the volume chain.
//! - [`tomography`]: polytopes, projection body `Π`, the operator `Ψ`,
//!   surface isotropic position.
//! - [`report`] and [`suites`]: JSON verification reports and the named
//!   suites driven by the CLI.

// `!(x > 0.0)` is how validation rejects NaN along with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bltheory;
pub mod bodies;
pub mod error;
pub mod hull;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod numerics;
pub mod report;
pub mod suites;
pub mod tomography;
pub mod transforms;

pub use error::{Error, Result};
