//! Numerical convex-duality laboratory in dimensions 1 through 4.
//!
//! The crate is organized around a handful of constructive objects:
//!
//! * [`geometry`] — convex bodies, polar duality `K^z`, volumes and
//!   centroids, Santaló points, Löwner-ellipsoid distance estimates.
//! * [`transform`] — scalar fields on tensor grids together with the
//!   discrete Legendre–Fenchel transform and biconjugation.
//! * [`weights`] — normalized log-concave non-increasing weights `ϱ`,
//!   their exponent `α = −log ϱ`, crossing points, and radial moments.
//! * [`functional`] — functional volume products, Ball's body `K_{f,z}`,
//!   the Fradelizi–Meyer center, and Borell's one-dimensional inequality.
//! * [`stability`] — deficits, the radius `R(ε)`, L1 stability fits over
//!   `(z, c, ξ, T)`, the exceptional set `Ψ`, and scan harnesses.
//! * [`quad`] — shared quadrature: adaptive 1D Gauss–Kronrod, sphere
//!   grids, tensor-grid trapezoids, and Monte Carlo cross-checks.
//!
//! All operations are pure functions of their inputs; values are freely
//! shareable across threads.

pub mod error;
pub mod functional;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod optim;
pub mod quad;
pub mod selftest;
pub mod stability;
pub mod transform;
pub mod weights;

pub use error::{Error, Result};
