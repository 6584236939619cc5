use std::fmt;

use crate::error::{GeoError, Result};
use crate::linalg;
use crate::scalar::Real;

/// A point in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    pub coords: Vec<T>,
}

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: vec![T::zero(); dim] }
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Self { coords: coords.iter().map(|&c| T::lit(c)).collect() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { coords: self.coords.iter().map(|&c| c * s).collect() }
    }

    pub fn norm(&self) -> T {
        linalg::norm(&self.coords)
    }

    /// Euclidean coordinate distance.
    pub fn coord_distance(&self, other: &Self) -> T {
        linalg::norm(&linalg::sub(&self.coords, &other.coords))
    }

    /// Coordinate displacement `other - self`.
    pub fn displacement_to(&self, other: &Self) -> Vec<T> {
        linalg::sub(&other.coords, &self.coords)
    }

    pub fn lerp(&self, other: &Self, t: T) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (T::one() - t) * a + t * b)
            .collect();
        Self { coords }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(GeoError::DimensionMismatch { expected: dim, found: self.dim() });
        }
        if !self.is_finite() {
            return Err(GeoError::NonFinite { what: "point coordinates" });
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Tangent vector `vec` at `base`, with T_pU identified with R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T> {
    pub base: Point<T>,
    pub vec: Vec<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: Point<T>, vec: Vec<T>) -> Result<Self> {
        if vec.len() != base.dim() {
            return Err(GeoError::DimensionMismatch { expected: base.dim(), found: vec.len() });
        }
        if !vec.iter().all(|v| v.is_finite()) {
            return Err(GeoError::NonFinite { what: "tangent vector" });
        }
        Ok(Self { base, vec })
    }
}
