//! Discretized geodesics, the fixed-step RK4 geodesic integrator and path length.

use std::fmt::Write as _;

use crate::error::{GeoError, Result};
use crate::linalg;
use crate::manifold::christoffel::{christoffel_at, PartialsMode};
use crate::manifold::metric::MetricField;
use crate::manifold::point::Point;
use crate::scalar::Real;

/// Ball that trajectories must not leave.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Confinement<'a, T> {
    pub center: &'a [T],
    pub radius: T,
}

/// Positions and velocities at the `steps + 1` nodes of an RK4 run.
pub(crate) struct Trajectory<T> {
    pub positions: Vec<Vec<T>>,
    pub velocities: Vec<Vec<T>>,
}

fn acceleration<T: Real>(metric: &MetricField<T>, mode: PartialsMode<T>, x: &[T], v: &[T]) -> Result<Vec<T>> {
    if let PartialsMode::Auto { .. } = mode {
        // conformal fields: Γ^k_ij v^i v^j = 2 (v·∇φ) v^k − |v|^2 ∂_kφ
        if let Some(grad_phi) = metric.conformal_log_gradient(x) {
            let grad_phi = grad_phi?;
            let vg = linalg::dot(v, &grad_phi);
            let vv = linalg::dot(v, v);
            let two = T::lit(2.0);
            return Ok(v.iter().zip(&grad_phi).map(|(&vk, &gk)| vv * gk - two * vg * vk).collect());
        }
    }
    let gamma = christoffel_at(metric, x, mode)?;
    Ok(gamma.contract(v).into_iter().map(|a| -a).collect())
}

/// Integrates `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0` over `[0, duration]` with `steps` RK4 steps.
///
/// With `record == false` only the final node is kept.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate<T: Real>(
    metric: &MetricField<T>,
    mode: PartialsMode<T>,
    x0: &[T],
    v0: &[T],
    duration: T,
    steps: usize,
    confinement: Option<Confinement<'_, T>>,
    record: bool,
) -> Result<Trajectory<T>> {
    let steps = steps.max(1);
    let dt = duration / T::from_usize_lossy(steps);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);

    let mut x = x0.to_vec();
    let mut v = v0.to_vec();
    let mut positions = Vec::with_capacity(if record { steps + 1 } else { 1 });
    let mut velocities = Vec::with_capacity(if record { steps + 1 } else { 1 });
    if record {
        positions.push(x.clone());
        velocities.push(v.clone());
    }

    let at_param = |i: usize| (T::from_usize_lossy(i) * dt).as_f64();
    let exit = |i: usize, e: GeoError| match e {
        GeoError::OutsideChart { .. } | GeoError::MetricDegenerate | GeoError::NonFinite { .. } => {
            GeoError::ChartExit { t: at_param(i) }
        }
        other => other,
    };

    for i in 0..steps {
        let k1x = v.clone();
        let k1v = acceleration(metric, mode, &x, &v).map_err(|e| exit(i, e))?;

        let x2 = linalg::axpy(half * dt, &k1x, &x);
        let v2 = linalg::axpy(half * dt, &k1v, &v);
        let k2v = acceleration(metric, mode, &x2, &v2).map_err(|e| exit(i, e))?;

        let x3 = linalg::axpy(half * dt, &v2, &x);
        let v3 = linalg::axpy(half * dt, &k2v, &v);
        let k3v = acceleration(metric, mode, &x3, &v3).map_err(|e| exit(i, e))?;

        let x4 = linalg::axpy(dt, &v3, &x);
        let v4 = linalg::axpy(dt, &k3v, &v);
        let k4v = acceleration(metric, mode, &x4, &v4).map_err(|e| exit(i, e))?;

        for c in 0..x.len() {
            x[c] = x[c] + dt * sixth * (k1x[c] + two * v2[c] + two * v3[c] + v4[c]);
            v[c] = v[c] + dt * sixth * (k1v[c] + two * k2v[c] + two * k3v[c] + k4v[c]);
        }
        if x.iter().chain(&v).any(|c| !c.is_finite()) {
            return Err(GeoError::ChartExit { t: at_param(i + 1) });
        }
        if let Some(ball) = confinement {
            if linalg::norm(&linalg::sub(&x, ball.center)) >= ball.radius {
                return Err(GeoError::ChartExit { t: at_param(i + 1) });
            }
        }
        if record {
            positions.push(x.clone());
            velocities.push(v.clone());
        }
    }
    if !record {
        positions.push(x);
        velocities.push(v);
    }
    Ok(Trajectory { positions, velocities })
}

/// A path sampled at `t_i = i / N`, `i = 0..=N`.
///
/// Solver-produced paths also carry the tangent at every sample and the initial
/// velocity, so they can be re-evaluated at arbitrary parameters.
#[derive(Debug, Clone)]
pub struct GeodesicPath<T> {
    samples: Vec<Point<T>>,
    velocities: Option<Vec<Vec<T>>>,
    initial_velocity: Option<Vec<T>>,
    metric: MetricField<T>,
    mode: PartialsMode<T>,
}

impl<T: Real> GeodesicPath<T> {
    /// A sampled path without velocity information (lengths use chords).
    pub fn from_samples(metric: MetricField<T>, samples: Vec<Point<T>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(GeoError::Domain("a path needs at least two samples".into()));
        }
        for s in &samples {
            s.check_dim(metric.dim())?;
        }
        Ok(Self { samples, velocities: None, initial_velocity: None, metric, mode: PartialsMode::default() })
    }

    pub(crate) fn from_trajectory(
        metric: MetricField<T>,
        mode: PartialsMode<T>,
        trajectory: Trajectory<T>,
        initial_velocity: Vec<T>,
        snap_end: Option<&Point<T>>,
    ) -> Self {
        let mut samples: Vec<Point<T>> = trajectory.positions.into_iter().map(Point::new).collect();
        if let Some(q) = snap_end {
            *samples.last_mut().expect("non-empty trajectory") = q.clone();
        }
        Self {
            samples,
            velocities: Some(trajectory.velocities),
            initial_velocity: Some(initial_velocity),
            metric,
            mode,
        }
    }

    pub fn samples(&self) -> &[Point<T>] {
        &self.samples
    }

    pub fn velocities(&self) -> Option<&[Vec<T>]> {
        self.velocities.as_deref()
    }

    pub fn initial_velocity(&self) -> Option<&[T]> {
        self.initial_velocity.as_deref()
    }

    pub fn metric(&self) -> &MetricField<T> {
        &self.metric
    }

    pub fn start(&self) -> &Point<T> {
        &self.samples[0]
    }

    pub fn end(&self) -> &Point<T> {
        self.samples.last().expect("non-empty path")
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn param(&self, i: usize) -> T {
        T::from_usize_lossy(i) / T::from_usize_lossy(self.steps())
    }

    /// Position at parameter `t ∈ [0, 1]`.
    ///
    /// Solver paths are re-integrated from the start over `[0, t]` with the
    /// same step count, which keeps the result smooth in `t`; `t = 1` returns
    /// the stored endpoint. Plain sampled paths are interpolated linearly.
    pub fn eval(&self, t: T) -> Result<Point<T>> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(GeoError::Domain(format!("path parameter {t} outside [0, 1]")));
        }
        if t == T::zero() {
            return Ok(self.start().clone());
        }
        if t == T::one() {
            return Ok(self.end().clone());
        }
        match &self.initial_velocity {
            Some(v) => {
                let traj = integrate(&self.metric, self.mode, &self.start().coords, v, t, self.steps(), None, false)?;
                Ok(Point::new(traj.positions.into_iter().next_back().expect("final node")))
            }
            None => {
                let scaled = t * T::from_usize_lossy(self.steps());
                let i = scaled.floor().to_usize().unwrap_or(0).min(self.steps() - 1);
                let frac = scaled - T::from_usize_lossy(i);
                Ok(self.samples[i].lerp(&self.samples[i + 1], frac))
            }
        }
    }

    /// Length of the sub-path between samples `i ≤ j`.
    pub fn arc_length(&self, i: usize, j: usize) -> Result<T> {
        segment_length(&self.metric, self, i, j)
    }

    pub fn length(&self) -> Result<T> {
        self.arc_length(0, self.steps())
    }

    /// `max_i |L(0, t_i) − t_i L| / L`; zero for constant paths.
    pub fn affine_defect(&self) -> Result<T> {
        let n = self.steps();
        let mut cumulative = vec![T::zero(); n + 1];
        for i in 0..n {
            cumulative[i + 1] = cumulative[i] + self.arc_length(i, i + 1)?;
        }
        let total = cumulative[n];
        if total == T::zero() {
            return Ok(T::zero());
        }
        Ok((0..=n).fold(T::zero(), |m, i| m.max((cumulative[i] - self.param(i) * total).abs())) / total)
    }

    /// CSV with header `t,x_1,...,x_d`.
    pub fn to_csv(&self) -> String {
        let d = self.metric.dim();
        let mut out = String::from("t");
        for k in 1..=d {
            let _ = write!(out, ",x_{k}");
        }
        out.push('\n');
        for (i, s) in self.samples.iter().enumerate() {
            let _ = write!(out, "{}", self.param(i));
            for c in &s.coords {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

/// Composite trapezoidal approximation of `L(η) = ∫ g(η; η̇, η̇)^{1/2} dt` under `metric`.
///
/// Uses the stored tangents when present; otherwise each chord `Δx` stands in
/// for `η̇ dt` and the integrand is averaged over the segment endpoints.
pub fn path_length<T: Real>(metric: &MetricField<T>, path: &GeodesicPath<T>) -> Result<T> {
    segment_length(metric, path, 0, path.steps())
}

fn segment_length<T: Real>(metric: &MetricField<T>, path: &GeodesicPath<T>, i: usize, j: usize) -> Result<T> {
    if i > j || j > path.steps() {
        return Err(GeoError::Domain(format!("invalid sample range {i}..{j}")));
    }
    let half = T::lit(0.5);
    let mut total = T::zero();
    match &path.velocities {
        Some(vel) => {
            let dt = T::one() / T::from_usize_lossy(path.steps());
            for s in i..j {
                let a = metric.speed(&path.samples[s].coords, &vel[s])?;
                let b = metric.speed(&path.samples[s + 1].coords, &vel[s + 1])?;
                total = total + half * (a + b) * dt;
            }
        }
        None => {
            for s in i..j {
                let chord = path.samples[s].displacement_to(&path.samples[s + 1]);
                let a = metric.speed(&path.samples[s].coords, &chord)?;
                let b = metric.speed(&path.samples[s + 1].coords, &chord)?;
                total = total + half * (a + b);
            }
        }
    }
    Ok(total)
}
