//! Iterated barycenters on Riemannian charts, numerical coverage of a
//! neighborhood by an iterated simplex, upper-bound certificates for
//! geodesically convex functions, and an exact model of the countable star
//! space with its two metrics.
//!
//! The numeric modules are generic over [`Real`] (`f32`/`f64`); the star space
//! is generic over [`star::StarScalar`], which includes exact rationals.

// NaN-rejecting checks are written as `!(x > 0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barycenter;
pub mod cli;
pub mod error;
pub mod lemma;
pub mod linalg;
pub mod manifold;
pub mod sampling;
pub mod scalar;
pub mod star;

pub use error::{GeoError, Result};
pub use manifold::{ChartSpec, GeodesicPath, MetricField, Point, SolverSettings, TangentVector};
pub use scalar::Real;

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type Chart64 = ChartSpec<f64>;
pub type Chart32 = ChartSpec<f32>;
pub type Metric64 = MetricField<f64>;
pub type Path64 = GeodesicPath<f64>;
