//! Chart balls and the geodesic solvers that live on them.

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::linalg::{self, Matrix};
use crate::manifold::christoffel::PartialsMode;
use crate::manifold::geodesic::{integrate, Confinement, GeodesicPath};
use crate::manifold::metric::MetricField;
use crate::manifold::point::{Point, TangentVector};
use crate::sampling;
use crate::scalar::Real;

/// Numerical parameters shared by the geodesic solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings<T> {
    /// Terminal-point tolerance of the shooting solver, in chart coordinates.
    pub bvp_tolerance: T,
    /// RK4 steps on `[0, 1]`.
    pub ode_steps: usize,
    /// Central-difference step for metric partials and shooting sensitivities.
    pub fd_step: T,
    pub max_newton_iterations: usize,
    pub max_step_halvings: usize,
}

impl<T: Real> Default for SolverSettings<T> {
    fn default() -> Self {
        Self {
            bvp_tolerance: T::default_bvp_tolerance(),
            ode_steps: 100,
            fd_step: T::default_fd_step(),
            max_newton_iterations: 30,
            max_step_halvings: 30,
        }
    }
}

/// Open coordinate ball `B(center, radius)` carrying a metric field.
#[derive(Debug, Clone)]
pub struct ChartSpec<T> {
    pub center: Point<T>,
    pub radius: T,
    pub metric: MetricField<T>,
    pub solver: SolverSettings<T>,
}

/// A converged shooting solve: the initial velocity and the last
/// sensitivity matrix used, reusable as a warm start for nearby problems.
#[derive(Debug, Clone)]
pub(crate) struct Shot<T> {
    pub velocity: Vec<T>,
    pub jacobian: Option<Matrix<T>>,
}

/// Result of [`ChartSpec::scaled_geodesic_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledGeodesicReport<T> {
    pub h: T,
    pub max_deviation: T,
    pub worst_param: T,
}

/// Outcome of sampling pairs and solving the boundary-value problem for each.
#[derive(Debug, Clone)]
pub struct ChartValidation<T> {
    pub pairs: usize,
    pub failures: Vec<(Point<T>, Point<T>, GeoError)>,
}

impl<T> ChartValidation<T> {
    /// Numeric stand-in for "totally normal": every sampled pair converged.
    pub fn is_totally_normal(&self) -> bool {
        self.failures.is_empty()
    }
}

impl<T: Real> ChartSpec<T> {
    pub fn new(center: Point<T>, radius: T, metric: MetricField<T>) -> Result<Self> {
        Self::with_settings(center, radius, metric, SolverSettings::default())
    }

    pub fn with_settings(center: Point<T>, radius: T, metric: MetricField<T>, solver: SolverSettings<T>) -> Result<Self> {
        center.check_dim(metric.dim())?;
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(GeoError::Domain(format!("chart radius must be positive, got {radius}")));
        }
        if !(solver.bvp_tolerance > T::zero()) || !(solver.fd_step > T::zero()) || solver.ode_steps == 0 {
            return Err(GeoError::Domain("solver tolerances and step counts must be positive".into()));
        }
        Ok(Self { center, radius, metric, solver })
    }

    /// Chart ball of the given radius centered at the origin.
    pub fn centered(radius: T, metric: MetricField<T>) -> Result<Self> {
        Self::new(Point::origin(metric.dim()), radius, metric)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn partials_mode(&self) -> PartialsMode<T> {
        PartialsMode::Auto { step: self.solver.fd_step }
    }

    /// Same ball and solver settings with a different metric.
    pub fn with_metric(&self, metric: MetricField<T>) -> Result<Self> {
        Self::with_settings(self.center.clone(), self.radius, metric, self.solver)
    }

    /// Same ball carrying `g_h`.
    pub fn scaled(&self, h: T) -> Result<Self> {
        self.with_metric(self.metric.scaled(h)?)
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        p.dim() == self.dim() && p.is_finite() && p.coord_distance(&self.center) < self.radius
    }

    pub(crate) fn require_inside(&self, p: &Point<T>) -> Result<()> {
        p.check_dim(self.dim())?;
        let r = p.coord_distance(&self.center);
        if r >= self.radius {
            return Err(GeoError::OutsideChart { radius: r.as_f64(), chart_radius: self.radius.as_f64() });
        }
        Ok(())
    }

    fn confinement(&self) -> Confinement<'_, T> {
        Confinement { center: &self.center.coords, radius: self.radius }
    }

    pub fn metric_eval(&self, p: &Point<T>, u: &[T], v: &[T]) -> Result<T> {
        self.require_inside(p)?;
        self.metric.inner(p, u, v)
    }

    /// Geodesic `t ↦ Exp_p(t v)`, `t ∈ [0, 1]`.
    pub fn exp_map(&self, v: &TangentVector<T>) -> Result<GeodesicPath<T>> {
        self.require_inside(&v.base)?;
        if v.vec.len() != self.dim() {
            return Err(GeoError::DimensionMismatch { expected: self.dim(), found: v.vec.len() });
        }
        let traj = integrate(
            &self.metric,
            self.partials_mode(),
            &v.base.coords,
            &v.vec,
            T::one(),
            self.solver.ode_steps,
            Some(self.confinement()),
            true,
        )?;
        Ok(GeodesicPath::from_trajectory(self.metric.clone(), self.partials_mode(), traj, v.vec.clone(), None))
    }

    /// Endpoint of the RK4 geodesic from `p` with initial velocity `v`.
    fn shoot(&self, p: &Point<T>, v: &[T]) -> Result<Vec<T>> {
        let traj = integrate(
            &self.metric,
            self.partials_mode(),
            &p.coords,
            v,
            T::one(),
            self.solver.ode_steps,
            Some(self.confinement()),
            false,
        )?;
        Ok(traj.positions.into_iter().next().expect("final node"))
    }

    /// Central-difference sensitivity of the endpoint with respect to the initial velocity.
    fn shooting_jacobian(&self, p: &Point<T>, v: &[T], end: &[T]) -> Result<Matrix<T>> {
        let d = self.dim();
        let delta = self.solver.fd_step * linalg::norm(v).max(T::one());
        let mut jac = Matrix::zeros(d);
        let mut probe = v.to_vec();
        for j in 0..d {
            probe[j] = v[j] + delta;
            let plus = self.shoot(p, &probe);
            probe[j] = v[j] - delta;
            let minus = self.shoot(p, &probe);
            probe[j] = v[j];
            let column: Vec<T> = match (plus, minus) {
                (Ok(a), Ok(b)) => a.iter().zip(&b).map(|(&x, &y)| (x - y) / (delta + delta)).collect(),
                (Ok(a), Err(_)) => a.iter().zip(end).map(|(&x, &y)| (x - y) / delta).collect(),
                (Err(_), Ok(b)) => end.iter().zip(&b).map(|(&x, &y)| (x - y) / delta).collect(),
                (Err(e), Err(_)) => return Err(e),
            };
            for i in 0..d {
                jac[(i, j)] = column[i];
            }
        }
        Ok(jac)
    }

    /// Initial velocity of the geodesic from `p` to `q` by single shooting.
    ///
    /// Damped Newton (step halving) on the endpoint residual, started from the
    /// hint when it shoots inside the chart and from the straight-line
    /// velocity `q − p` otherwise. The central-difference sensitivity is
    /// reused while it keeps contracting the residual and refreshed when it
    /// stops. Once the residual is within tolerance (but not already far below
    /// it) one further step is attempted and kept if it improves the residual.
    pub(crate) fn solve_shooting(&self, p: &Point<T>, q: &Point<T>, hint: Option<&Shot<T>>) -> Result<Shot<T>> {
        self.require_inside(p)?;
        self.require_inside(q)?;
        let tol = self.solver.bvp_tolerance;
        let fail = |residual: T, iterations: usize| GeoError::BvpFailure { residual: residual.as_f64(), iterations };

        let mut start = hint.and_then(|h| self.shoot(p, &h.velocity).ok().map(|e| (h.velocity.clone(), e)));
        if start.is_none() {
            // straight-line start, shortened if the trial leaves the chart
            let mut v = p.displacement_to(q);
            for _ in 0..=self.solver.max_step_halvings {
                if let Ok(e) = self.shoot(p, &v) {
                    start = Some((v, e));
                    break;
                }
                v.iter_mut().for_each(|c| *c = *c * T::lit(0.5));
            }
        }
        let (mut v, mut end) = start.ok_or_else(|| fail(T::infinity(), 0))?;
        let mut residual = linalg::sub(&end, &q.coords);
        let mut res = linalg::norm(&residual);
        let mut jacobian = hint.and_then(|h| h.jacobian.clone());
        let mut last_jacobian = jacobian.clone();

        let mut iterations = 0;
        let mut polished = false;
        loop {
            let converged = res <= tol;
            let negligible = res <= tol * T::lit(1e-3);
            if (converged && polished) || negligible || iterations >= self.solver.max_newton_iterations {
                break;
            }
            iterations += 1;
            let fresh = jacobian.is_none();
            let jac = match jacobian.take() {
                Some(j) => j,
                None => match self.shooting_jacobian(p, &v, &end) {
                    Ok(j) => j,
                    Err(_) if converged => break,
                    Err(_) => return Err(fail(res, iterations)),
                },
            };
            let direction = match jac.solve(&residual) {
                Ok(dir) => dir,
                Err(_) if converged => break,
                Err(_) if !fresh => continue,
                Err(_) => return Err(fail(res, iterations)),
            };
            let previous = res;
            let mut lambda = T::one();
            let mut accepted = false;
            for _ in 0..=self.solver.max_step_halvings {
                let trial = linalg::axpy(-lambda, &direction, &v);
                if let Ok(trial_end) = self.shoot(p, &trial) {
                    let trial_residual = linalg::sub(&trial_end, &q.coords);
                    let trial_res = linalg::norm(&trial_residual);
                    if trial_res < res {
                        v = trial;
                        end = trial_end;
                        residual = trial_residual;
                        res = trial_res;
                        accepted = true;
                        break;
                    }
                }
                if converged {
                    break;
                }
                lambda = lambda * T::lit(0.5);
            }
            if accepted && (fresh || res <= previous * T::lit(0.25)) {
                last_jacobian = Some(jac.clone());
                jacobian = Some(jac);
            }
            if converged {
                polished = true;
            } else if !accepted && fresh {
                return Err(fail(res, iterations));
            }
        }
        if !(res <= tol) {
            return Err(fail(res, iterations));
        }
        Ok(Shot { velocity: v, jacobian: last_jacobian })
    }

    /// `γ(t)` for the geodesic from `p` with initial velocity `v`, integrated
    /// over `[0, t]` with the configured step count.
    pub(crate) fn geodesic_point(&self, p: &Point<T>, v: &[T], t: T) -> Result<Point<T>> {
        let traj = integrate(&self.metric, self.partials_mode(), &p.coords, v, t, self.solver.ode_steps, None, false)?;
        Ok(Point::new(traj.positions.into_iter().next_back().expect("final node")))
    }

    /// Geodesic from `p` to `q` by single shooting on the initial velocity.
    pub fn geodesic_bvp(&self, p: &Point<T>, q: &Point<T>) -> Result<GeodesicPath<T>> {
        let shot = self.solve_shooting(p, q, None)?;
        let traj = integrate(
            &self.metric,
            self.partials_mode(),
            &p.coords,
            &shot.velocity,
            T::one(),
            self.solver.ode_steps,
            Some(self.confinement()),
            true,
        )?;
        Ok(GeodesicPath::from_trajectory(self.metric.clone(), self.partials_mode(), traj, shot.velocity, Some(q)))
    }

    /// Riemannian distance, as the length of the solved geodesic.
    pub fn distance(&self, p: &Point<T>, q: &Point<T>) -> Result<T> {
        self.geodesic_bvp(p, q)?.length()
    }

    /// Compares `γ^{(h)}_{p,q}` under `g_h` with `h^{-1} γ^{(1)}_{hp,hq}` under `g`.
    pub fn scaled_geodesic_check(&self, p: &Point<T>, q: &Point<T>, h: T) -> Result<ScaledGeodesicReport<T>> {
        if h == T::zero() {
            return Err(GeoError::Domain("scaling identity requires h != 0".into()));
        }
        let scaled_chart = self.scaled(h)?;
        let scaled_path = scaled_chart.geodesic_bvp(p, q)?;
        let reference = self.geodesic_bvp(&p.scaled(h), &q.scaled(h))?;
        let inv_h = T::one() / h;
        let mut report = ScaledGeodesicReport { h, max_deviation: T::zero(), worst_param: T::zero() };
        for (i, (a, b)) in scaled_path.samples().iter().zip(reference.samples()).enumerate() {
            let dev = a.coord_distance(&b.scaled(inv_h));
            if dev > report.max_deviation {
                report.max_deviation = dev;
                report.worst_param = scaled_path.param(i);
            }
        }
        Ok(report)
    }

    /// Samples `n_pairs` uniform pairs in the ball and solves each geodesic.
    pub fn validate(&self, n_pairs: usize, seed: u64) -> ChartValidation<T> {
        let failures: Vec<_> = (0..n_pairs)
            .into_par_iter()
            .filter_map(|k| {
                let mut rng = sampling::stream_rng(seed, k as u64);
                let p = sampling::sample_in_ball(&mut rng, &self.center, self.radius);
                let q = sampling::sample_in_ball(&mut rng, &self.center, self.radius);
                self.geodesic_bvp(&p, &q).err().map(|e| (p, q, e))
            })
            .collect();
        ChartValidation { pairs: n_pairs, failures }
    }
}
