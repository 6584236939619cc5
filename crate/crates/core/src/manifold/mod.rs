//! Charts, metric fields, Christoffel symbols and geodesic solvers.

mod chart;
mod christoffel;
mod geodesic;
mod metric;
mod point;

pub use chart::{ChartSpec, ChartValidation, ScaledGeodesicReport, SolverSettings};
pub(crate) use chart::Shot;
pub use christoffel::{christoffel, christoffel_with, Christoffel, PartialsMode};
pub use geodesic::{path_length, GeodesicPath};
pub use metric::{MetricField, MetricKind};
pub use point::{Point, TangentVector};
