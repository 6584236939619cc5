//! The countable star: unit branches `[0, 1] × N*` glued at their origins,
//! with the branch-weighted metric `d1` and the flat metric `d2`.
//!
//! Everything here is generic over [`StarScalar`], so distances, geodesic
//! positions and function values are exact when evaluated over rationals.

mod boundary;
mod compactness;
mod functions;
mod geodesic;
mod point;

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio, Rational64};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use thiserror::Error;

pub use boundary::{classify_geodesic_boundary, tip_to_tip_geodesic, BoundaryWitness, Classification};
pub use compactness::{compactness_witness, BranchPattern, CompactnessOutcome, CoordinatePattern, SequenceSpec};
pub use functions::{discontinuity_witness, NoWitnessReason, StarFunction, WitnessOutcome, WitnessRow};
pub use geodesic::{star_geodesic, StarGeodesic};
pub use point::{star_dist, StarMetric, StarPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarError {
    #[error("invalid star point: {0}")]
    InvalidPoint(String),
    #[error("geodesic parameter outside [0, 1]: {0}")]
    InvalidParameter(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
}

/// Ordered field used for star coordinates.
pub trait StarScalar: Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync {
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_u64(value: u64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// Whether arithmetic in this type is exact.
    fn is_exact() -> bool;
}

impl StarScalar for f64 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_u64(value: u64) -> Self {
        value as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn is_exact() -> bool {
        false
    }
}

impl StarScalar for Rational64 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn from_u64(value: u64) -> Self {
        Ratio::from_integer(i64::try_from(value).expect("branch index fits in i64"))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}

impl StarScalar for BigRational {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_u64(value: u64) -> Self {
        Ratio::from_integer(BigInt::from_u64(value).expect("u64 fits in BigInt"))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}
