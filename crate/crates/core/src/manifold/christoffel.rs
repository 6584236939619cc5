//! Christoffel symbols of the second kind.

use crate::error::{GeoError, Result};
use crate::manifold::metric::MetricField;
use crate::manifold::point::Point;
use crate::scalar::Real;

/// How metric partial derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartialsMode<T> {
    /// Analytic partials when the metric provides them, central differences otherwise.
    Auto { step: T },
    FiniteDifference { step: T },
}

impl<T: Real> Default for PartialsMode<T> {
    fn default() -> Self {
        Self::Auto { step: T::default_fd_step() }
    }
}

/// `Γ^k_{ij}` stored as `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> Christoffel<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    /// `a^k = Γ^k_{ij} v^i v^j`.
    pub fn contract(&self, v: &[T]) -> Vec<T> {
        let d = self.dim;
        (0..d)
            .map(|k| {
                let mut acc = T::zero();
                for i in 0..d {
                    for j in 0..d {
                        acc = acc + self.get(k, i, j) * v[i] * v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

pub fn christoffel<T: Real>(metric: &MetricField<T>, p: &Point<T>) -> Result<Christoffel<T>> {
    christoffel_with(metric, p, PartialsMode::default())
}

/// `Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
pub fn christoffel_with<T: Real>(
    metric: &MetricField<T>,
    p: &Point<T>,
    mode: PartialsMode<T>,
) -> Result<Christoffel<T>> {
    p.check_dim(metric.dim())?;
    christoffel_at(metric, &p.coords, mode)
}

pub(crate) fn christoffel_at<T: Real>(
    metric: &MetricField<T>,
    x: &[T],
    mode: PartialsMode<T>,
) -> Result<Christoffel<T>> {
    let d = metric.dim();
    let g = metric.eval_coords(x)?;
    let dg = match mode {
        PartialsMode::Auto { step } => match metric.analytic_partials(x) {
            Some(dg) => dg,
            None => metric.finite_difference_partials(x, step)?,
        },
        PartialsMode::FiniteDifference { step } => metric.finite_difference_partials(x, step)?,
    };
    let lu = g.lu().map_err(|_| GeoError::Singular)?;
    let half = T::lit(0.5);
    let mut data = vec![T::zero(); d * d * d];
    let mut first_kind = vec![T::zero(); d];
    for i in 0..d {
        for j in i..d {
            for l in 0..d {
                first_kind[l] = half * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
            }
            let second = lu.solve(&first_kind)?;
            for k in 0..d {
                data[(k * d + i) * d + j] = second[k];
                data[(k * d + j) * d + i] = second[k];
            }
        }
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(GeoError::NonFinite { what: "Christoffel symbols" });
    }
    Ok(Christoffel { dim: d, data })
}
