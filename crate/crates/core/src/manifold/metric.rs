//! Metric fields on a chart: `p ↦ g(p)`, symmetric positive definite.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::linalg::{self, Matrix};
use crate::manifold::point::{Point, TangentVector};
use crate::scalar::Real;

type MatrixFn<T> = dyn Fn(&[T]) -> Matrix<T> + Send + Sync;
type PartialsFn<T> = dyn Fn(&[T]) -> Vec<Matrix<T>> + Send + Sync;

/// Symmetry tolerance (relative) for user-supplied metric matrices.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// The family a metric field belongs to.
#[derive(Clone)]
pub enum MetricKind<T> {
    Euclidean,
    /// Unit-sphere chart by stereographic projection from the antipode of the
    /// chart center: `g = 4 (1 + |x|^2)^{-2} I`.
    SphereChart,
    /// Poincaré ball model: `g = 4 (1 - |x|^2)^{-2} I`, defined for `|x| < 1`.
    HyperbolicBall,
    /// `g = exp(2 Σ_i a_i x_i^2) I`; all coefficients 1 gives `exp(2|x|^2) I`.
    ConformalTest { coefficients: Vec<T> },
    /// `g_h(p) = g(hp)`. For `h = 0` the field is the frozen matrix `g(0)`.
    Scaled { h: T, inner: Arc<MetricField<T>>, frozen: Option<Matrix<T>> },
    Custom { name: String, eval: Arc<MatrixFn<T>>, partials: Option<Arc<PartialsFn<T>>> },
}

impl<T: fmt::Debug> fmt::Debug for MetricKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euclidean => write!(f, "Euclidean"),
            Self::SphereChart => write!(f, "SphereChart"),
            Self::HyperbolicBall => write!(f, "HyperbolicBall"),
            Self::ConformalTest { coefficients } => {
                f.debug_struct("ConformalTest").field("coefficients", coefficients).finish()
            }
            Self::Scaled { h, inner, .. } => f.debug_struct("Scaled").field("h", h).field("inner", &inner.kind).finish(),
            Self::Custom { name, partials, .. } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("analytic_partials", &partials.is_some())
                .finish(),
        }
    }
}

/// A smooth field of inner products on a `dim`-dimensional chart.
#[derive(Debug, Clone)]
pub struct MetricField<T> {
    dim: usize,
    kind: MetricKind<T>,
}

impl<T: Real> MetricField<T> {
    pub fn euclidean(dim: usize) -> Self {
        Self { dim, kind: MetricKind::Euclidean }
    }

    pub fn sphere_chart(dim: usize) -> Self {
        Self { dim, kind: MetricKind::SphereChart }
    }

    pub fn hyperbolic_ball(dim: usize) -> Self {
        Self { dim, kind: MetricKind::HyperbolicBall }
    }

    /// The isotropic test metric `exp(2|x|^2) I`.
    pub fn conformal_test(dim: usize) -> Self {
        Self { dim, kind: MetricKind::ConformalTest { coefficients: vec![T::one(); dim] } }
    }

    pub fn conformal_with_coefficients(coefficients: Vec<T>) -> Self {
        Self { dim: coefficients.len(), kind: MetricKind::ConformalTest { coefficients } }
    }

    /// A metric given by closures; without `partials`, Christoffel symbols
    /// fall back to central differences.
    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        eval: impl Fn(&[T]) -> Matrix<T> + Send + Sync + 'static,
        partials: Option<Arc<PartialsFn<T>>>,
    ) -> Self {
        Self { dim, kind: MetricKind::Custom { name: name.into(), eval: Arc::new(eval), partials } }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MetricKind<T> {
        &self.kind
    }

    /// Short tag naming the metric family, e.g. `scaled(0.25, conformal-test)`.
    pub fn kind_tag(&self) -> String {
        match &self.kind {
            MetricKind::Euclidean => "euclidean".into(),
            MetricKind::SphereChart => "sphere-chart".into(),
            MetricKind::HyperbolicBall => "hyperbolic-ball".into(),
            MetricKind::ConformalTest { .. } => "conformal-test".into(),
            MetricKind::Scaled { h, inner, .. } => format!("scaled({h}, {})", inner.kind_tag()),
            MetricKind::Custom { name, .. } => format!("custom({name})"),
        }
    }

    /// `g_h(p; u, v) = g(hp; u, v)` for `|h| ≤ 1`.
    pub fn scaled(&self, h: T) -> Result<Self> {
        if !h.is_finite() || h.abs() > T::one() {
            return Err(GeoError::Domain(format!("scale factor h = {h} must satisfy |h| <= 1")));
        }
        let frozen = if h == T::zero() { Some(self.eval(&Point::origin(self.dim))?) } else { None };
        Ok(Self { dim: self.dim, kind: MetricKind::Scaled { h, inner: Arc::new(self.clone()), frozen } })
    }

    /// Conformal factor `λ(x)` with `g = λ I`, and its gradient.
    fn conformal_factor(&self, x: &[T]) -> Option<(T, Vec<T>)> {
        let r2: T = linalg::dot(x, x);
        let one = T::one();
        let four = T::lit(4.0);
        match &self.kind {
            MetricKind::SphereChart => {
                let s = one + r2;
                let lam = four / (s * s);
                let dl = -T::lit(16.0) / (s * s * s);
                Some((lam, x.iter().map(|&xi| dl * xi).collect()))
            }
            MetricKind::HyperbolicBall => {
                let s = one - r2;
                let lam = four / (s * s);
                let dl = T::lit(16.0) / (s * s * s);
                Some((lam, x.iter().map(|&xi| dl * xi).collect()))
            }
            MetricKind::ConformalTest { coefficients } => {
                let phi: T = coefficients.iter().zip(x).map(|(&a, &xi)| a * xi * xi).sum();
                let lam = (T::lit(2.0) * phi).exp();
                let grad = coefficients
                    .iter()
                    .zip(x)
                    .map(|(&a, &xi)| lam * T::lit(4.0) * a * xi)
                    .collect();
                Some((lam, grad))
            }
            _ => None,
        }
    }

    /// For conformal fields `g = e^{2φ} I`, the gradient `∇φ` at `x`, with
    /// the same domain and positivity checks as [`Self::eval`].
    pub(crate) fn conformal_log_gradient(&self, x: &[T]) -> Option<Result<Vec<T>>> {
        match &self.kind {
            MetricKind::Euclidean => Some(Ok(vec![T::zero(); self.dim])),
            MetricKind::SphereChart | MetricKind::HyperbolicBall | MetricKind::ConformalTest { .. } => {
                if let Err(e) = self.check_domain(x) {
                    return Some(Err(e));
                }
                let (lam, grad) = self.conformal_factor(x)?;
                if !lam.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                    return Some(Err(GeoError::NonFinite { what: "metric matrix" }));
                }
                if !(lam > T::zero()) {
                    return Some(Err(GeoError::MetricDegenerate));
                }
                let two_lam = lam + lam;
                Some(Ok(grad.into_iter().map(|g| g / two_lam).collect()))
            }
            MetricKind::Scaled { h, inner, frozen } => {
                if frozen.is_some() {
                    return Some(Ok(vec![T::zero(); self.dim]));
                }
                let hx: Vec<T> = x.iter().map(|&c| c * *h).collect();
                Some(inner.conformal_log_gradient(&hx)?.map(|g| g.into_iter().map(|c| c * *h).collect()))
            }
            MetricKind::Custom { .. } => None,
        }
    }

    /// Unvalidated matrix `g(x)`.
    pub(crate) fn raw_matrix(&self, x: &[T]) -> Matrix<T> {
        match &self.kind {
            MetricKind::Euclidean => Matrix::identity(self.dim),
            MetricKind::SphereChart | MetricKind::HyperbolicBall | MetricKind::ConformalTest { .. } => {
                let (lam, _) = self.conformal_factor(x).expect("conformal kind");
                Matrix::scaled_identity(self.dim, lam)
            }
            MetricKind::Scaled { h, inner, frozen } => match frozen {
                Some(g0) => g0.clone(),
                None => {
                    let hx: Vec<T> = x.iter().map(|&c| c * *h).collect();
                    inner.raw_matrix(&hx)
                }
            },
            MetricKind::Custom { eval, .. } => eval(x),
        }
    }

    /// Analytic partial derivatives `∂g/∂x_k`, indexed by `k`, when available.
    pub fn analytic_partials(&self, x: &[T]) -> Option<Vec<Matrix<T>>> {
        match &self.kind {
            MetricKind::Euclidean => Some(vec![Matrix::zeros(self.dim); self.dim]),
            MetricKind::SphereChart | MetricKind::HyperbolicBall | MetricKind::ConformalTest { .. } => {
                let (_, grad) = self.conformal_factor(x)?;
                Some(grad.into_iter().map(|gk| Matrix::scaled_identity(self.dim, gk)).collect())
            }
            MetricKind::Scaled { h, inner, frozen } => {
                if frozen.is_some() {
                    return Some(vec![Matrix::zeros(self.dim); self.dim]);
                }
                let hx: Vec<T> = x.iter().map(|&c| c * *h).collect();
                let inner_partials = inner.analytic_partials(&hx)?;
                Some(inner_partials.into_iter().map(|m| m.scale(*h)).collect())
            }
            MetricKind::Custom { partials, .. } => partials.as_ref().map(|f| f(x)),
        }
    }

    /// Central-difference partials `∂g/∂x_k` with the given step.
    pub fn finite_difference_partials(&self, x: &[T], step: T) -> Result<Vec<Matrix<T>>> {
        let two_step = step + step;
        let mut out = Vec::with_capacity(self.dim);
        let mut probe = x.to_vec();
        for k in 0..self.dim {
            probe[k] = x[k] + step;
            let plus = self.raw_matrix(&probe);
            probe[k] = x[k] - step;
            let minus = self.raw_matrix(&probe);
            probe[k] = x[k];
            let mut d = Matrix::zeros(self.dim);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    d[(i, j)] = (plus[(i, j)] - minus[(i, j)]) / two_step;
                }
            }
            if !d.is_finite() {
                return Err(GeoError::NonFinite { what: "metric partial derivatives" });
            }
            out.push(d);
        }
        Ok(out)
    }

    fn check_domain(&self, x: &[T]) -> Result<()> {
        match &self.kind {
            MetricKind::HyperbolicBall => {
                let r = linalg::norm(x);
                if r >= T::one() {
                    return Err(GeoError::OutsideChart { radius: r.as_f64(), chart_radius: 1.0 });
                }
                Ok(())
            }
            MetricKind::Scaled { h, inner, frozen: None } => {
                let hx: Vec<T> = x.iter().map(|&c| c * *h).collect();
                inner.check_domain(&hx)
            }
            _ => Ok(()),
        }
    }

    /// Validated metric matrix at `p`.
    pub fn eval(&self, p: &Point<T>) -> Result<Matrix<T>> {
        p.check_dim(self.dim)?;
        self.eval_coords(&p.coords)
    }

    pub(crate) fn eval_coords(&self, x: &[T]) -> Result<Matrix<T>> {
        self.check_domain(x)?;
        let g = self.raw_matrix(x);
        if g.dim() != self.dim {
            return Err(GeoError::DimensionMismatch { expected: self.dim, found: g.dim() });
        }
        if !g.is_finite() {
            return Err(GeoError::NonFinite { what: "metric matrix" });
        }
        if let MetricKind::Custom { .. } = self.kind {
            let asym = g.relative_asymmetry();
            if asym > T::lit(SYMMETRY_TOLERANCE) {
                return Err(GeoError::MetricAsymmetric { asymmetry: asym.as_f64() });
            }
        }
        if !g.is_positive_definite() {
            return Err(GeoError::MetricDegenerate);
        }
        Ok(g)
    }

    /// `g(p; u, v) = u^T g(p) v`.
    pub fn inner(&self, p: &Point<T>, u: &[T], v: &[T]) -> Result<T> {
        for w in [u, v] {
            if w.len() != self.dim {
                return Err(GeoError::DimensionMismatch { expected: self.dim, found: w.len() });
            }
        }
        let g = self.eval(p)?;
        Ok(g.bilinear(u, v))
    }

    /// Inner product of two tangent vectors sharing a base point.
    pub fn metric_eval(&self, u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
        if u.base != v.base {
            return Err(GeoError::Domain("tangent vectors live at different base points".into()));
        }
        self.inner(&u.base, &u.vec, &v.vec)
    }

    /// Norm of `v` at `x`.
    pub(crate) fn speed(&self, x: &[T], v: &[T]) -> Result<T> {
        let g = self.eval_coords(x)?;
        Ok(g.bilinear(v, v).max(T::zero()).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Point<f64> {
        Point::from_f64(c)
    }

    #[test]
    fn euclidean_unit_vector() {
        let m = MetricField::<f64>::euclidean(2);
        assert_eq!(m.inner(&p(&[0.3, 0.1]), &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn conformal_test_value() {
        let m = MetricField::<f64>::conformal_test(2);
        let got = m.inner(&p(&[0.5, 0.0]), &[0.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!((got - 0.5f64.exp()).abs() < 1e-15);
        assert!((got - 1.648_721_270_700_128).abs() < 1e-12);
    }

    #[test]
    fn scaled_half_evaluates_inner_at_hp() {
        let m = MetricField::<f64>::conformal_test(2);
        let mh = m.scaled(0.5).unwrap();
        let g = mh.eval(&p(&[0.4, 0.0])).unwrap();
        let want = (2.0f64 * 0.04).exp();
        assert!((g[(0, 0)] - want).abs() < 1e-15 && (g[(1, 1)] - want).abs() < 1e-15);
        assert_eq!(g[(0, 1)], 0.0);
        assert_eq!(mh.kind_tag(), "scaled(0.5, conformal-test)");
    }

    #[test]
    fn scaled_one_is_pointwise_identical() {
        let m = MetricField::<f64>::sphere_chart(2);
        let m1 = m.scaled(1.0).unwrap();
        for c in [[0.1, 0.2], [-0.7, 0.3], [0.0, 0.0]] {
            assert_eq!(m.eval(&p(&c)).unwrap(), m1.eval(&p(&c)).unwrap());
        }
    }

    #[test]
    fn scaled_zero_is_frozen_constant() {
        let m = MetricField::<f64>::sphere_chart(2);
        let m0 = m.scaled(0.0).unwrap();
        let g0 = m.eval(&Point::origin(2)).unwrap();
        for c in [[0.1, 0.2], [-0.7, 0.3]] {
            assert_eq!(m0.eval(&p(&c)).unwrap(), g0);
        }
        let u = [0.3, -1.2];
        let v = [2.0, 0.5];
        assert_eq!(m0.inner(&p(&[0.9, 0.9]), &u, &v).unwrap(), g0.bilinear(&u, &v));
        assert!(m0.analytic_partials(&[0.4, 0.1]).unwrap().iter().all(|d| d.max_abs() == 0.0));
    }

    #[test]
    fn scale_outside_unit_interval_is_rejected() {
        let m = MetricField::<f64>::euclidean(2);
        assert!(matches!(m.scaled(1.5), Err(GeoError::Domain(_))));
        assert!(matches!(m.scaled(-1.01), Err(GeoError::Domain(_))));
        assert!(m.scaled(-1.0).is_ok());
    }

    #[test]
    fn degenerate_and_nonfinite_metrics_are_errors() {
        let indefinite = MetricField::<f64>::custom(
            "indefinite",
            2,
            |_x| Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap(),
            None,
        );
        assert_eq!(indefinite.eval(&p(&[0.0, 0.0])), Err(GeoError::MetricDegenerate));
        let blowup = MetricField::<f64>::custom(
            "blowup",
            1,
            |x| Matrix::scaled_identity(1, 1.0 / x[0]),
            None,
        );
        assert!(matches!(blowup.eval(&p(&[0.0])), Err(GeoError::NonFinite { .. })));
        let asym = MetricField::<f64>::custom(
            "asym",
            2,
            |_x| Matrix::from_rows(&[vec![2.0, 0.1], vec![0.0, 2.0]]).unwrap(),
            None,
        );
        assert!(matches!(asym.eval(&p(&[0.0, 0.0])), Err(GeoError::MetricAsymmetric { .. })));
    }

    #[test]
    fn hyperbolic_rejects_points_outside_unit_ball() {
        let m = MetricField::<f64>::hyperbolic_ball(2);
        assert!(m.eval(&p(&[0.5, 0.5])).is_ok());
        assert!(matches!(m.eval(&p(&[1.0, 0.5])), Err(GeoError::OutsideChart { .. })));
    }

    #[test]
    fn analytic_partials_match_finite_differences() {
        let metrics = [
            MetricField::<f64>::sphere_chart(2),
            MetricField::hyperbolic_ball(2),
            MetricField::conformal_with_coefficients(vec![1.0, 0.5]),
            MetricField::conformal_test(2).scaled(-0.5).unwrap(),
        ];
        for m in &metrics {
            let x = [0.3, -0.2];
            let a = m.analytic_partials(&x).unwrap();
            let fd = m.finite_difference_partials(&x, 1e-5).unwrap();
            for (da, df) in a.iter().zip(&fd) {
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((da[(i, j)] - df[(i, j)]).abs() < 1e-8, "{}", m.kind_tag());
                    }
                }
            }
        }
    }
}
