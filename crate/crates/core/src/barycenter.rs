//! Iterated barycenters, the stepsize map `F(t; h)` over the scaled-metric
//! family, its Jacobian at the mean stepsizes, and hull sampling.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::linalg::Matrix;
use crate::manifold::{ChartSpec, Point, Shot};
use crate::scalar::Real;

/// Condition number above which a simplex is treated as degenerate.
pub const DEGENERATE_CONDITION: f64 = 1e8;

/// Stepsizes `(t_2, …, t_k)`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepsizeVector<T> {
    values: Vec<T>,
}

impl<T: Real> StepsizeVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        for (j, &t) in values.iter().enumerate() {
            if !(t >= T::zero() && t <= T::one()) {
                return Err(GeoError::InvalidStepsize(format!("t_{} = {t} is outside [0, 1]", j + 2)));
            }
        }
        Ok(Self { values })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::lit(v)).collect())
    }

    /// `(1/2, 1/3, …, 1/(len + 1))`, the stepsizes whose Euclidean iterated
    /// barycenter is the arithmetic mean.
    pub fn mean(len: usize) -> Self {
        Self { values: (2..len + 2).map(|k| T::one() / T::from_usize_lossy(k)).collect() }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Iterated barycenter `B_k(p_1, …, p_k; t_2, …, t_k)` on `chart`.
pub fn iterated_barycenter<T: Real>(chart: &ChartSpec<T>, points: &[Point<T>], t: &StepsizeVector<T>) -> Result<Point<T>> {
    Ok(barycenter_chain(chart, points, t)?.pop().expect("at least one point"))
}

/// All partial barycenters `B_1, …, B_k`.
pub fn barycenter_chain<T: Real>(
    chart: &ChartSpec<T>,
    points: &[Point<T>],
    t: &StepsizeVector<T>,
) -> Result<Vec<Point<T>>> {
    if points.is_empty() {
        return Err(GeoError::Domain("iterated barycenter of zero points".into()));
    }
    if t.len() + 1 != points.len() {
        return Err(GeoError::InvalidStepsize(format!(
            "{} points need {} stepsizes, got {}",
            points.len(),
            points.len() - 1,
            t.len()
        )));
    }
    for p in points {
        chart.require_inside(p)?;
    }
    Ok(run_chain(chart, points, t.values(), None)?.0)
}

type ChainRun<T> = (Vec<Point<T>>, Vec<Option<Shot<T>>>);

/// Stage-by-stage chain; stage `k` shoots from `B_{k−1}` to `p_k`, warm-started
/// from `hints[k − 2]` when given. Returns the chain and the shooting solves.
fn run_chain<T: Real>(
    chart: &ChartSpec<T>,
    points: &[Point<T>],
    t: &[T],
    hints: Option<&[Option<Shot<T>>]>,
) -> Result<ChainRun<T>> {
    let mut chain = Vec::with_capacity(points.len());
    let mut shots = Vec::with_capacity(t.len());
    chain.push(points[0].clone());
    for (k, (pk, &tk)) in points[1..].iter().zip(t).enumerate() {
        let prev = chain.last().expect("non-empty chain");
        let (next, shot) = if tk == T::zero() {
            (prev.clone(), None)
        } else if tk == T::one() {
            (pk.clone(), None)
        } else {
            let hint = hints.and_then(|h| h[k].as_ref());
            let shot = match chart.solve_shooting(prev, pk, hint) {
                Err(_) if hint.is_some() => chart.solve_shooting(prev, pk, None)?,
                other => other?,
            };
            (chart.geodesic_point(prev, &shot.velocity, tk)?, Some(shot))
        };
        chain.push(next);
        shots.push(shot);
    }
    Ok((chain, shots))
}

/// `F(·; h)` carrying shooting warm starts from one evaluation to the next.
///
/// Repeated evaluations at nearby stepsizes (Newton iterations, finite
/// differences, neighbouring targets) then converge in a step or two.
pub(crate) struct WarmMap<'a, T> {
    points: &'a [Point<T>],
    chart: ChartSpec<T>,
    shots: Vec<Option<Shot<T>>>,
}

impl<'a, T: Real> WarmMap<'a, T> {
    pub(crate) fn new(simplex: &'a SimplexSpec<T>, h: T) -> Result<Self> {
        Ok(Self { points: &simplex.points, chart: simplex.chart.scaled(h)?, shots: vec![None; simplex.dim()] })
    }

    /// Evaluates and keeps the new solves as warm starts.
    pub(crate) fn eval(&mut self, t: &StepsizeVector<T>) -> Result<Point<T>> {
        let (mut chain, shots) = run_chain(&self.chart, self.points, t.values(), Some(&self.shots))?;
        for (kept, new) in self.shots.iter_mut().zip(shots) {
            if new.is_some() {
                *kept = new;
            }
        }
        Ok(chain.pop().expect("non-empty chain"))
    }

    /// Evaluates without touching the warm starts.
    pub(crate) fn probe(&self, t: &[T]) -> Result<Point<T>> {
        Ok(run_chain(&self.chart, self.points, t, Some(&self.shots))?.0.pop().expect("non-empty chain"))
    }

    /// Central-difference Jacobian, same layout as [`SimplexSpec::stepsize_jacobian`].
    pub(crate) fn jacobian(&self, t: &StepsizeVector<T>, step: T) -> Result<Matrix<T>> {
        fd_jacobian(t, step, |probe| self.probe(probe))
    }
}

fn fd_jacobian<T: Real>(t: &StepsizeVector<T>, step: T, mut eval: impl FnMut(&[T]) -> Result<Point<T>>) -> Result<Matrix<T>> {
    let d = t.len();
    let mut jac = Matrix::zeros(d);
    for k in 0..d {
        let mut plus = t.values().to_vec();
        let mut minus = t.values().to_vec();
        plus[k] = (plus[k] + step).min(T::one());
        minus[k] = (minus[k] - step).max(T::zero());
        let width = plus[k] - minus[k];
        let fp = eval(&plus)?;
        let fm = eval(&minus)?;
        for i in 0..d {
            jac[(i, k)] = (fp.coords[i] - fm.coords[i]) / width;
        }
    }
    Ok(jac)
}

/// Ordered vertices `p_1, …, p_{d+1}` in a `d`-dimensional chart.
#[derive(Debug, Clone)]
pub struct SimplexSpec<T> {
    points: Vec<Point<T>>,
    chart: ChartSpec<T>,
}

impl<T: Real> SimplexSpec<T> {
    pub fn new(points: Vec<Point<T>>, chart: ChartSpec<T>) -> Result<Self> {
        let d = chart.dim();
        if points.len() != d + 1 {
            return Err(GeoError::DimensionMismatch { expected: d + 1, found: points.len() });
        }
        for p in &points {
            chart.require_inside(p)?;
        }
        Ok(Self { points, chart })
    }

    /// Regular simplex inscribed in the sphere of radius `circumradius` about the origin.
    pub fn regular(chart: ChartSpec<T>, circumradius: T) -> Result<Self> {
        let d = chart.dim();
        let n = d + 1;
        // Orthonormal basis of {y ∈ R^n : Σ y = 0}, applied to e_i − centroid.
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
        for j in 0..n {
            if basis.len() == d {
                break;
            }
            let mut v: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64).collect();
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > 1e-12 {
                basis.push(v.into_iter().map(|x| x / len).collect());
            }
        }
        let vertex_norm = ((n as f64 - 1.0) / n as f64).sqrt();
        let scale = circumradius.as_f64() / vertex_norm;
        let points = (0..n)
            .map(|i| {
                let coords: Vec<f64> = basis
                    .iter()
                    .map(|b| scale * (b[i] - b.iter().sum::<f64>() / n as f64))
                    .collect();
                Point::from_f64(&coords)
            })
            .collect();
        Self::new(points, chart)
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn chart(&self) -> &ChartSpec<T> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `|p_1 + … + p_{d+1}|`.
    pub fn centering_defect(&self) -> T {
        let d = self.dim();
        let mut sum = vec![T::zero(); d];
        for p in &self.points {
            for (s, &c) in sum.iter_mut().zip(&p.coords) {
                *s = *s + c;
            }
        }
        crate::linalg::norm(&sum)
    }

    /// Copy with the vertices multiplied by `h` (same chart and metric).
    pub fn scaled_vertices(&self, h: T) -> Result<Self> {
        Self::new(self.points.iter().map(|p| p.scaled(h)).collect(), self.chart.clone())
    }

    /// `F(t; h)`: the iterated barycenter of the vertices under `g_h`.
    pub fn bary_map(&self, t: &StepsizeVector<T>, h: T) -> Result<Point<T>> {
        iterated_barycenter(&self.chart.scaled(h)?, &self.points, t)
    }

    /// `F_1, …, F_{d+1}` under `g_h`.
    pub fn bary_chain(&self, t: &StepsizeVector<T>, h: T) -> Result<Vec<Point<T>>> {
        barycenter_chain(&self.chart.scaled(h)?, &self.points, t)
    }

    /// Jacobian of `F(·; 0)` at the mean stepsizes in closed form.
    ///
    /// Row `k − 1` is `∂F/∂t_k = k (p_k − p̄_{k−1}) / (d + 1)` where `p̄_j` is the
    /// mean of the first `j` vertices, so this is the transpose of the
    /// column-per-parameter layout returned by [`Self::stepsize_jacobian`].
    pub fn jacobian_closed_form(&self) -> Result<Matrix<T>> {
        let d = self.dim();
        let scale = T::one() / T::from_usize_lossy(d + 1);
        let mut running = self.points[0].coords.clone();
        let mut rows = Vec::with_capacity(d);
        for k in 2..=d + 1 {
            let prev_mean: Vec<T> = running.iter().map(|&s| s / T::from_usize_lossy(k - 1)).collect();
            let pk = &self.points[k - 1].coords;
            let kf = T::from_usize_lossy(k);
            rows.push(pk.iter().zip(&prev_mean).map(|(&a, &b)| kf * (a - b) * scale).collect());
            for (s, &c) in running.iter_mut().zip(pk) {
                *s = *s + c;
            }
        }
        let jac = Matrix::from_rows(&rows)?;
        let condition = jac.condition_number();
        if !(condition <= T::lit(DEGENERATE_CONDITION)) {
            return Err(GeoError::DegenerateSimplex { condition: condition.as_f64() });
        }
        Ok(jac)
    }

    /// Central-difference Jacobian of `F(·; h)` at `t`; entry `(i, k)` is `∂F_i/∂t_{k+2}`.
    ///
    /// Probes are clamped to `[0, 1]` (one-sided at the faces of the cube).
    pub fn stepsize_jacobian(&self, t: &StepsizeVector<T>, h: T, step: T) -> Result<Matrix<T>> {
        let chart = self.chart.scaled(h)?;
        fd_jacobian(t, step, |probe| Ok(run_chain(&chart, &self.points, probe, None)?.0.pop().expect("non-empty chain")))
    }

    /// Evaluates `F(·; h)` on the grid `{0, 1/r, …, 1}^d`.
    ///
    /// Nodes whose geodesics fail are recorded and skipped.
    pub fn hull_sample(&self, h: T, resolution: usize) -> Result<HullSample<T>> {
        if resolution < 2 {
            return Err(GeoError::Domain(format!("hull resolution must be at least 2, got {resolution}")));
        }
        let chart = self.chart.scaled(h)?;
        let d = self.dim();
        let per_axis = resolution + 1;
        let total = per_axis.pow(d as u32);
        let evaluated: Vec<(StepsizeVector<T>, Result<Point<T>>)> = (0..total)
            .into_par_iter()
            .map(|index| {
                let mut digits = vec![0usize; d];
                let mut rest = index;
                for slot in digits.iter_mut().rev() {
                    *slot = rest % per_axis;
                    rest /= per_axis;
                }
                let t = StepsizeVector {
                    values: digits
                        .iter()
                        .map(|&i| T::from_usize_lossy(i) / T::from_usize_lossy(resolution))
                        .collect(),
                };
                let point = iterated_barycenter(&chart, &self.points, &t);
                (t, point)
            })
            .collect();
        let mut sample = HullSample { dim: d, nodes: Vec::new(), failures: Vec::new() };
        for (t, point) in evaluated {
            match point {
                Ok(point) => sample.nodes.push(HullNode { t, point }),
                Err(e) => sample.failures.push((t, e)),
            }
        }
        Ok(sample)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullNode<T> {
    pub t: StepsizeVector<T>,
    pub point: Point<T>,
}

/// Point cloud of an iterated barycentric hull.
#[derive(Debug, Clone)]
pub struct HullSample<T> {
    pub dim: usize,
    pub nodes: Vec<HullNode<T>>,
    pub failures: Vec<(StepsizeVector<T>, GeoError)>,
}

impl<T: Real> HullSample<T> {
    /// CSV with header `t_2,…,t_{d+1},x_1,…,x_d`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (2..=self.dim + 1)
            .map(|k| format!("t_{k}"))
            .chain((1..=self.dim).map(|k| format!("x_{k}")))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for node in &self.nodes {
            let fields: Vec<String> = node
                .t
                .values()
                .iter()
                .chain(&node.point.coords)
                .map(|v| v.to_string())
                .collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }
}
