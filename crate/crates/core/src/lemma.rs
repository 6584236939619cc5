//! Numerical verification that a ball around the chart center is covered by
//! an iterated simplex, and the consequences for geodesically convex
//! functions: the upper-bound certificate, a convexity checker and an
//! empirical Lipschitz probe.

use rayon::prelude::*;

use crate::barycenter::{barycenter_chain, SimplexSpec, StepsizeVector, WarmMap};
use crate::error::{GeoError, Result};
use crate::linalg;
use crate::manifold::{ChartSpec, Point};
use crate::sampling;
use crate::scalar::Real;

/// Residual threshold for a successful stepsize inversion.
pub const INVERSION_TOLERANCE: f64 = 1e-9;
/// Convexity gaps below this are attributed to solver noise.
pub const CONVEXITY_TOLERANCE: f64 = 1e-9;
/// Slack allowed in `f(x) ≤ bound` and in every stage of the induction chain.
pub const BOUND_TOLERANCE: f64 = 1e-9;

const MAX_STEP_HALVINGS: usize = 12;

/// A real-valued function on the chart.
pub trait Objective<T>: Sync {
    fn value(&self, p: &Point<T>) -> Result<T>;
}

impl<T, F> Objective<T> for F
where
    T: Real,
    F: Fn(&Point<T>) -> T + Sync,
{
    fn value(&self, p: &Point<T>) -> Result<T> {
        Ok(self(p))
    }
}

/// `scale · dist(anchor, p)^2 + offset` with the Riemannian distance of `chart`.
#[derive(Debug, Clone)]
pub struct SquaredDistance<T> {
    pub chart: ChartSpec<T>,
    pub anchor: Point<T>,
    pub scale: T,
    pub offset: T,
}

impl<T: Real> SquaredDistance<T> {
    pub fn new(chart: ChartSpec<T>, anchor: Point<T>) -> Self {
        Self { chart, anchor, scale: T::one(), offset: T::zero() }
    }
}

impl<T: Real> Objective<T> for SquaredDistance<T> {
    fn value(&self, p: &Point<T>) -> Result<T> {
        let d = self.chart.distance(&self.anchor, p)?;
        Ok(self.scale * d * d + self.offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSettings<T> {
    pub tolerance: T,
    pub max_iterations: usize,
    /// Iterates are kept in `[clip, 1 − clip]^d`.
    pub clip: T,
    pub fd_step: T,
}

impl<T: Real> Default for InversionSettings<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(INVERSION_TOLERANCE).max(T::epsilon() * T::lit(1e4)),
            max_iterations: 50,
            clip: T::lit(1e-6),
            fd_step: T::default_fd_step(),
        }
    }
}

/// Stepsizes `t` with `F(t; h) = x` up to `residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion<T> {
    pub t: StepsizeVector<T>,
    pub residual: T,
    pub iterations: usize,
}

fn residual_of<T: Real>(map: &mut WarmMap<'_, T>, t: &StepsizeVector<T>, x: &Point<T>) -> Result<(Vec<T>, T)> {
    let fx = map.eval(t)?;
    let r = linalg::sub(&fx.coords, &x.coords);
    let n = linalg::norm(&r);
    Ok((r, n))
}

/// Solves `F(t; h) = x` by damped Newton iteration with a central-difference
/// Jacobian, starting from `t0` (default `(1/2, 1/3, …, 1/(d+1))`).
pub fn invert_stepsizes<T: Real>(
    simplex: &SimplexSpec<T>,
    h: T,
    x: &Point<T>,
    t0: Option<&StepsizeVector<T>>,
    settings: &InversionSettings<T>,
) -> Result<Inversion<T>> {
    invert_warm(&mut WarmMap::new(simplex, h)?, simplex.dim(), x, t0, settings)
}

fn invert_warm<T: Real>(
    map: &mut WarmMap<'_, T>,
    d: usize,
    x: &Point<T>,
    t0: Option<&StepsizeVector<T>>,
    settings: &InversionSettings<T>,
) -> Result<Inversion<T>> {
    x.check_dim(d)?;
    let lo = settings.clip;
    let hi = T::one() - settings.clip;
    let mut t = match t0 {
        Some(t0) => {
            if t0.len() != d || !t0.values().iter().all(|&v| v > T::zero() && v < T::one()) {
                return Err(GeoError::InvalidStepsize("initial stepsizes must lie in (0, 1)^d".into()));
            }
            t0.clone()
        }
        None => StepsizeVector::mean(d),
    };
    let fail = |residual: T, iterations: usize| GeoError::InversionFailure { residual: residual.as_f64(), iterations };

    let (mut r, mut res) = residual_of(map, &t, x)?;
    let mut iterations = 0;
    let mut polished = false;
    loop {
        let converged = res <= settings.tolerance;
        if (converged && polished) || res == T::zero() || iterations >= settings.max_iterations {
            break;
        }
        iterations += 1;
        let jac = map.jacobian(&t, settings.fd_step)?;
        let step = match jac.solve(&r) {
            Ok(step) => step,
            Err(_) if converged => break,
            Err(_) => return Err(GeoError::DegenerateConfiguration),
        };
        let mut lambda = T::one();
        let mut accepted = false;
        let previous = res;
        for _ in 0..MAX_STEP_HALVINGS {
            let trial: Vec<T> = t
                .values()
                .iter()
                .zip(&step)
                .map(|(&ti, &si)| (ti - lambda * si).max(lo).min(hi))
                .collect();
            let trial = StepsizeVector::new(trial)?;
            if let Ok((tr, tres)) = residual_of(map, &trial, x) {
                if tres < res {
                    t = trial;
                    r = tr;
                    res = tres;
                    accepted = true;
                    break;
                }
            }
            if converged {
                break;
            }
            lambda = lambda * T::lit(0.5);
        }
        if converged {
            polished = true;
        } else if !accepted {
            return Err(fail(res, iterations));
        } else {
            // pinned against a face of the clipping box without real progress:
            // the root, if any, lies outside (0, 1)^d
            let pinned = t.values().iter().any(|&v| v <= lo || v >= hi);
            if pinned && res > T::lit(0.9) * previous {
                return Err(fail(res, iterations));
            }
        }
    }
    if !(res <= settings.tolerance) {
        return Err(fail(res, iterations));
    }
    Ok(Inversion { t, residual: res, iterations })
}

/// Polar target grid: `angular` directions times `radial` shells, plus the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarGrid {
    pub angular: usize,
    pub radial: usize,
}

impl PolarGrid {
    pub fn new(angular: usize, radial: usize) -> Self {
        Self { angular, radial }
    }

    /// Unit directions: `±1` in 1-d, equally spaced angles in 2-d, a Fibonacci
    /// lattice of `angular` points in 3-d.
    pub fn directions<T: Real>(&self, dim: usize) -> Result<Vec<Vec<T>>> {
        let n = self.angular.max(1);
        match dim {
            1 => Ok(vec![vec![T::one()], vec![-T::one()]]),
            2 => Ok((0..n)
                .map(|i| {
                    let a = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n);
                    vec![a.cos(), a.sin()]
                })
                .collect()),
            3 => {
                let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
                Ok((0..n)
                    .map(|i| {
                        let z = T::one() - T::lit(2.0) * (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(n);
                        let r = (T::one() - z * z).max(T::zero()).sqrt();
                        let a = golden * T::from_usize_lossy(i);
                        vec![r * a.cos(), r * a.sin(), z]
                    })
                    .collect())
            }
            _ => Err(GeoError::Domain(format!("polar grids are defined for d ≤ 3, got d = {dim}"))),
        }
    }

    /// Rays of targets at radii `eta · j / radial`, `j = 1..=radial`.
    pub fn rays<T: Real>(&self, dim: usize, eta: T) -> Result<Vec<Vec<Point<T>>>> {
        let radial = self.radial.max(1);
        Ok(self
            .directions::<T>(dim)?
            .into_iter()
            .map(|dir| {
                (1..=radial)
                    .map(|j| {
                        let r = eta * T::from_usize_lossy(j) / T::from_usize_lossy(radial);
                        Point::new(dir.iter().map(|&c| c * r).collect())
                    })
                    .collect()
            })
            .collect())
    }
}

/// Per-target outcome of a coverage sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetOutcome<T> {
    pub target: Point<T>,
    pub result: std::result::Result<Inversion<T>, GeoError>,
}

#[derive(Debug, Clone)]
pub struct CoverageReport<T> {
    pub h: T,
    pub eta_estimate: T,
    pub grid_size: usize,
    pub success_fraction: T,
    /// Largest residual over successful inversions.
    pub max_residual: T,
    /// Per-coordinate `(min, max)` of the recovered stepsizes.
    pub stepsize_box: Vec<(T, T)>,
    pub targets: Vec<TargetOutcome<T>>,
}

impl<T: Real> CoverageReport<T> {
    /// All targets inverted.
    pub fn certified(&self) -> bool {
        self.success_fraction == T::one()
    }

    pub fn failures(&self) -> usize {
        self.targets.iter().filter(|o| o.result.is_err()).count()
    }
}

fn require_centered<T: Real>(simplex: &SimplexSpec<T>) -> Result<()> {
    let scale = simplex.points().iter().fold(T::one(), |m, p| m.max(p.norm()));
    if simplex.centering_defect() > T::lit(1e-12) * scale.max(T::one()) {
        return Err(GeoError::Domain("coverage requires vertices summing to zero".into()));
    }
    Ok(())
}

/// Inverts `F(·; h)` at every node of a polar grid on `B(0, eta)`.
///
/// Each ray is walked outward, seeding every inversion with the stepsizes
/// recovered at the previous shell; rays are independent.
pub fn coverage_sweep<T: Real>(
    simplex: &SimplexSpec<T>,
    h: T,
    eta: T,
    grid: PolarGrid,
    settings: &InversionSettings<T>,
) -> Result<CoverageReport<T>> {
    require_centered(simplex)?;
    if !(eta > T::zero()) || eta >= simplex.chart().radius {
        return Err(GeoError::Domain(format!("eta = {eta} must lie in (0, chart radius)")));
    }
    let d = simplex.dim();
    let center = Point::origin(d);
    let center_outcome = TargetOutcome {
        target: center.clone(),
        result: invert_stepsizes(simplex, h, &center, None, settings),
    };
    let seed = center_outcome.result.as_ref().ok().map(|inv| inv.t.clone());
    let rays = grid.rays(d, eta)?;
    let ray_outcomes: Vec<Vec<TargetOutcome<T>>> = rays
        .into_par_iter()
        .map(|ray| {
            let mut warm = seed.clone();
            let mut previous_ok = true;
            let mut map = WarmMap::new(simplex, h);
            ray.into_iter()
                .map(|target| {
                    let map = match &mut map {
                        Ok(map) => map,
                        Err(e) => return TargetOutcome { target, result: Err(e.clone()) },
                    };
                    let mut result = invert_warm(map, d, &target, warm.as_ref(), settings);
                    if result.is_err() && warm.is_some() && previous_ok {
                        result = invert_warm(map, d, &target, None, settings);
                    }
                    previous_ok = result.is_ok();
                    if let Ok(inv) = &result {
                        warm = Some(inv.t.clone());
                    }
                    TargetOutcome { target, result }
                })
                .collect()
        })
        .collect();

    let mut targets = vec![center_outcome];
    targets.extend(ray_outcomes.into_iter().flatten());
    let grid_size = targets.len();
    let mut successes = 0usize;
    let mut max_residual = T::zero();
    let mut stepsize_box = vec![(T::infinity(), T::neg_infinity()); d];
    for outcome in &targets {
        if let Ok(inv) = &outcome.result {
            successes += 1;
            max_residual = max_residual.max(inv.residual);
            for (b, &v) in stepsize_box.iter_mut().zip(inv.t.values()) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
    }
    Ok(CoverageReport {
        h,
        eta_estimate: eta,
        grid_size,
        success_fraction: T::from_usize_lossy(successes) / T::from_usize_lossy(grid_size),
        max_residual,
        stepsize_box,
        targets,
    })
}

/// Radii tried by [`certify_radius`] and the best certified sweep.
#[derive(Debug, Clone)]
pub struct RadiusSearch<T> {
    pub trials: Vec<(T, bool)>,
    pub certified: Option<CoverageReport<T>>,
}

impl<T: Real> RadiusSearch<T> {
    pub fn certified_radius(&self) -> T {
        self.certified.as_ref().map_or(T::zero(), |r| r.eta_estimate)
    }
}

/// Bisects on `eta ∈ (0, eta_max]` for the largest radius whose sweep certifies.
pub fn certify_radius<T: Real>(
    simplex: &SimplexSpec<T>,
    h: T,
    eta_max: T,
    grid: PolarGrid,
    bisection_steps: usize,
    settings: &InversionSettings<T>,
) -> Result<RadiusSearch<T>> {
    let mut trials = Vec::new();
    let top = coverage_sweep(simplex, h, eta_max, grid, settings)?;
    trials.push((eta_max, top.certified()));
    if top.certified() {
        return Ok(RadiusSearch { trials, certified: Some(top) });
    }
    let mut lo = T::zero();
    let mut hi = eta_max;
    let mut best = None;
    for _ in 0..bisection_steps {
        let mid = T::lit(0.5) * (lo + hi);
        let report = coverage_sweep(simplex, h, mid, grid, settings)?;
        trials.push((mid, report.certified()));
        if report.certified() {
            lo = mid;
            best = Some(report);
        } else {
            hi = mid;
        }
    }
    Ok(RadiusSearch { trials, certified: best })
}

/// One stage `k` of `f(B_k) ≤ (1 − t_k) f(B_{k−1}) + t_k f(p_k) ≤ max_{j≤k} f(p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStage<T> {
    pub k: usize,
    pub value: T,
    pub convex_combination: T,
    pub running_max: T,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTarget<T> {
    pub target: Point<T>,
    pub t: StepsizeVector<T>,
    pub value: T,
    pub chain: Vec<ChainStage<T>>,
}

impl<T: Real> BoundTarget<T> {
    pub fn chain_holds(&self) -> bool {
        self.chain.iter().all(|s| s.holds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate<T> {
    /// `max_j f(h p_j)`.
    pub bound: T,
    pub verified: bool,
    pub targets: Vec<BoundTarget<T>>,
}

/// Upper bound for `f` on targets covered by the iterated simplex with
/// vertices `h p_1, …, h p_{d+1}` under the chart metric.
///
/// Each target `x` is located through `F(t; h) = x / h`; the barycenter chain
/// of the scaled vertices is then replayed stage by stage under the original
/// metric and checked against the convexity inequalities.
pub fn bound_certificate<T: Real>(
    simplex: &SimplexSpec<T>,
    f: &dyn Objective<T>,
    h: T,
    targets: &[Point<T>],
    settings: &InversionSettings<T>,
) -> Result<BoundCertificate<T>> {
    if h == T::zero() {
        return Err(GeoError::Domain("bound certificate requires h != 0".into()));
    }
    let chart = simplex.chart();
    let vertices: Vec<Point<T>> = simplex.points().iter().map(|p| p.scaled(h)).collect();
    let vertex_values = vertices.iter().map(|p| f.value(p)).collect::<Result<Vec<T>>>()?;
    let bound = vertex_values.iter().copied().fold(T::neg_infinity(), T::max);
    let tol = T::lit(BOUND_TOLERANCE);
    let inv_h = T::one() / h;

    let located: Vec<Result<Inversion<T>>> = targets
        .par_iter()
        .map(|x| invert_stepsizes(simplex, h, &x.scaled(inv_h), None, settings))
        .collect();
    let failed = located.iter().filter(|r| r.is_err()).count();
    if failed > 0 {
        return Err(GeoError::CannotCertify { failed, total: targets.len() });
    }

    let records: Vec<Result<BoundTarget<T>>> = targets
        .par_iter()
        .zip(located.into_par_iter())
        .map(|(x, inv)| {
            let inv = inv?;
            let chain_points = barycenter_chain(chart, &vertices, &inv.t)?;
            let mut chain = Vec::with_capacity(chain_points.len().saturating_sub(1));
            let mut previous = vertex_values[0];
            let mut running_max = vertex_values[0];
            for k in 2..=chain_points.len() {
                let tk = inv.t.values()[k - 2];
                let value = f.value(&chain_points[k - 1])?;
                let convex_combination = (T::one() - tk) * previous + tk * vertex_values[k - 1];
                running_max = running_max.max(vertex_values[k - 1]);
                let holds = value <= convex_combination + tol && convex_combination <= running_max + tol;
                chain.push(ChainStage { k, value, convex_combination, running_max, holds });
                previous = value;
            }
            Ok(BoundTarget { target: x.clone(), t: inv.t, value: f.value(x)?, chain })
        })
        .collect();
    let targets = records.into_iter().collect::<Result<Vec<_>>>()?;
    let verified = targets.iter().all(|r| r.value <= bound + tol && r.chain_holds());
    Ok(BoundCertificate { bound, verified, targets })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityWitness<T> {
    pub p: Point<T>,
    pub q: Point<T>,
    pub t: T,
    pub violation: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord<T> {
    pub index: usize,
    pub p: Point<T>,
    pub q: Point<T>,
    /// Largest gap `f(γ(t)) − (1−t) f(p) − t f(q)` on this pair, with its parameter.
    pub worst: Option<(T, T)>,
    pub error: Option<GeoError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport<T> {
    pub pairs_tested: usize,
    pub failed_pairs: usize,
    pub worst_violation: T,
    pub witness: Option<ConvexityWitness<T>>,
    pub pairs: Vec<PairRecord<T>>,
}

impl<T: Real> ConvexityReport<T> {
    pub fn is_convex(&self, tolerance: T) -> bool {
        self.worst_violation <= tolerance
    }
}

/// Samples pairs in the chart ball and measures the convexity gap along
/// each solved geodesic at `t = j / (n_t + 1)`, `j = 1..=n_t`.
pub fn convexity_check<T: Real>(
    chart: &ChartSpec<T>,
    f: &dyn Objective<T>,
    n_pairs: usize,
    n_t: usize,
    seed: u64,
) -> ConvexityReport<T> {
    let pairs: Vec<PairRecord<T>> = (0..n_pairs)
        .into_par_iter()
        .map(|index| {
            let mut rng = sampling::stream_rng(seed, index as u64);
            let p = sampling::sample_in_ball(&mut rng, &chart.center, chart.radius);
            let q = sampling::sample_in_ball(&mut rng, &chart.center, chart.radius);
            let worst = pair_gap(chart, f, &p, &q, n_t);
            match worst {
                Ok(worst) => PairRecord { index, p, q, worst, error: None },
                Err(e) => PairRecord { index, p, q, worst: None, error: Some(e) },
            }
        })
        .collect();
    let mut report = ConvexityReport {
        pairs_tested: 0,
        failed_pairs: 0,
        worst_violation: T::neg_infinity(),
        witness: None,
        pairs: Vec::new(),
    };
    for rec in &pairs {
        if rec.error.is_some() {
            report.failed_pairs += 1;
            continue;
        }
        report.pairs_tested += 1;
        if let Some((gap, t)) = rec.worst {
            if gap > report.worst_violation {
                report.worst_violation = gap;
                report.witness = Some(ConvexityWitness { p: rec.p.clone(), q: rec.q.clone(), t, violation: gap });
            }
        }
    }
    report.pairs = pairs;
    report
}

fn pair_gap<T: Real>(chart: &ChartSpec<T>, f: &dyn Objective<T>, p: &Point<T>, q: &Point<T>, n_t: usize) -> Result<Option<(T, T)>> {
    let path = chart.geodesic_bvp(p, q)?;
    let fp = f.value(p)?;
    let fq = f.value(q)?;
    let mut worst: Option<(T, T)> = None;
    for j in 1..=n_t {
        let t = T::from_usize_lossy(j) / T::from_usize_lossy(n_t + 1);
        let gap = f.value(&path.eval(t)?)? - (T::one() - t) * fp - t * fq;
        if worst.is_none_or(|(g, _)| gap > g) {
            worst = Some((gap, t));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate<T> {
    /// `max |f(a) − f(b)| / dist(a, b)` over the used pairs.
    pub estimate: T,
    pub pairs_used: usize,
    pub skipped: usize,
}

/// Empirical lower bound on the Lipschitz constant of `f` on `B(center, radius)`.
pub fn lipschitz_probe<T: Real>(
    chart: &ChartSpec<T>,
    f: &dyn Objective<T>,
    center: &Point<T>,
    radius: T,
    n_pairs: usize,
    seed: u64,
) -> Result<LipschitzEstimate<T>> {
    chart.require_inside(center)?;
    if !(radius > T::zero()) || center.coord_distance(&chart.center) + radius > chart.radius {
        return Err(GeoError::Domain("probe ball must lie inside the chart".into()));
    }
    let ratios: Vec<Option<T>> = (0..n_pairs)
        .into_par_iter()
        .map(|index| {
            let mut rng = sampling::stream_rng(seed, index as u64);
            let a = sampling::sample_in_ball(&mut rng, center, radius);
            let b = sampling::sample_in_ball(&mut rng, center, radius);
            let dist = chart.distance(&a, &b).ok()?;
            if dist < T::lit(1e-12) {
                return None;
            }
            let fa = f.value(&a).ok()?;
            let fb = f.value(&b).ok()?;
            Some((fa - fb).abs() / dist)
        })
        .collect();
    let used: Vec<T> = ratios.iter().flatten().copied().collect();
    Ok(LipschitzEstimate {
        estimate: used.iter().copied().fold(T::zero(), T::max),
        pairs_used: used.len(),
        skipped: ratios.len() - used.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::MetricField;

    fn pt(c: &[f64]) -> Point<f64> {
        Point::from_f64(c)
    }

    fn triangle_simplex(metric: MetricField<f64>) -> SimplexSpec<f64> {
        let chart = ChartSpec::centered(2.0, metric).unwrap();
        SimplexSpec::new(vec![pt(&[1.0, 1.0]), pt(&[-1.0, 0.0]), pt(&[0.0, -1.0])], chart).unwrap()
    }

    #[test]
    fn planted_preimage_is_recovered() {
        let s = triangle_simplex(MetricField::conformal_test(2));
        let planted = StepsizeVector::from_f64(&[0.4, 0.3]).unwrap();
        let x = s.bary_map(&planted, 0.5).unwrap();
        let inv = invert_stepsizes(&s, 0.5, &x, None, &InversionSettings::default()).unwrap();
        assert!(inv.residual <= 1e-9);
        assert!(linalg::max_abs_diff(inv.t.values(), planted.values()) < 1e-7);
    }

    #[test]
    fn centered_origin_gives_mean_stepsizes() {
        let s = triangle_simplex(MetricField::conformal_test(2));
        let inv = invert_stepsizes(&s, 0.0, &pt(&[0.0, 0.0]), None, &InversionSettings::default()).unwrap();
        assert!(linalg::max_abs_diff(inv.t.values(), &[0.5, 1.0 / 3.0]) < 1e-12);
    }

    #[test]
    fn far_target_fails_to_invert() {
        let s = triangle_simplex(MetricField::euclidean(2));
        let r = invert_stepsizes(&s, 1.0, &pt(&[1.5, -1.5]), None, &InversionSettings::default());
        assert!(matches!(r, Err(GeoError::InversionFailure { .. })));
    }

    #[test]
    fn bad_initial_guess_is_rejected() {
        let s = triangle_simplex(MetricField::euclidean(2));
        let t0 = StepsizeVector::from_f64(&[0.0, 0.5]).unwrap();
        let r = invert_stepsizes(&s, 1.0, &pt(&[0.0, 0.0]), Some(&t0), &InversionSettings::default());
        assert!(matches!(r, Err(GeoError::InvalidStepsize(_))));
    }

    #[test]
    fn polar_grid_shapes() {
        let g = PolarGrid::new(16, 8);
        assert_eq!(g.rays::<f64>(2, 0.1).unwrap().len(), 16);
        assert_eq!(g.rays::<f64>(1, 0.1).unwrap().len(), 2);
        let dirs = g.directions::<f64>(3).unwrap();
        assert!(dirs.iter().all(|d| (linalg::norm(d) - 1.0).abs() < 1e-12));
        assert!(g.directions::<f64>(4).is_err());
        let ray = &g.rays::<f64>(2, 0.4).unwrap()[4];
        assert!((ray[7].norm() - 0.4).abs() < 1e-15 && (ray[0].norm() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn uncentered_simplex_is_rejected() {
        let chart = ChartSpec::centered(2.0, MetricField::euclidean(2)).unwrap();
        let s = SimplexSpec::new(vec![pt(&[1.0, 1.0]), pt(&[-1.0, 0.0]), pt(&[0.5, -1.0])], chart).unwrap();
        assert!(coverage_sweep(&s, 1.0, 0.1, PolarGrid::new(4, 2), &InversionSettings::default()).is_err());
    }

    #[test]
    fn coverage_fails_far_outside_the_hull() {
        let s = triangle_simplex(MetricField::euclidean(2));
        let report = coverage_sweep(&s, 1.0, 1.5, PolarGrid::new(8, 4), &InversionSettings::default()).unwrap();
        assert!(report.success_fraction < 1.0);
        assert!(report.failures() > 0);
        assert!(!report.certified());
    }

    #[test]
    fn constant_function_bound() {
        let s = triangle_simplex(MetricField::conformal_test(2));
        let f = |_p: &Point<f64>| 2.5;
        let targets = vec![pt(&[0.0, 0.0]), pt(&[0.02, -0.01])];
        let cert = bound_certificate(&s, &f, 0.25, &targets, &InversionSettings::default()).unwrap();
        assert_eq!(cert.bound, 2.5);
        assert!(cert.verified);
    }

    #[test]
    fn linear_function_chain_is_tight() {
        let s = triangle_simplex(MetricField::euclidean(2));
        let f = |p: &Point<f64>| 0.7 * p.coords[0] - 1.3 * p.coords[1];
        let targets = vec![pt(&[0.1, 0.05]), pt(&[-0.2, 0.1])];
        let cert = bound_certificate(&s, &f, 1.0, &targets, &InversionSettings::default()).unwrap();
        assert!(cert.verified);
        for rec in &cert.targets {
            for stage in &rec.chain {
                assert!((stage.value - stage.convex_combination).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn uncovered_target_cannot_certify() {
        let s = triangle_simplex(MetricField::euclidean(2));
        let f = |p: &Point<f64>| p.norm();
        let r = bound_certificate(&s, &f, 1.0, &[pt(&[1.5, -1.5])], &InversionSettings::default());
        assert!(matches!(r, Err(GeoError::CannotCertify { failed: 1, total: 1 })));
    }

    #[test]
    fn convexity_discriminates() {
        let chart = ChartSpec::centered(1.0, MetricField::euclidean(2)).unwrap();
        let convex = |p: &Point<f64>| p.norm().powi(2);
        let concave = |p: &Point<f64>| -p.norm().powi(2);
        let good = convexity_check(&chart, &convex, 50, 10, 1);
        assert!(good.is_convex(1e-9));
        let bad = convexity_check(&chart, &concave, 50, 10, 1);
        assert!(bad.worst_violation > 0.0);
        let w = bad.witness.unwrap();
        let exact = w.t * (1.0 - w.t) * w.p.coord_distance(&w.q).powi(2);
        assert!((w.violation - exact).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_of_constant_is_zero() {
        let chart = ChartSpec::centered(1.0, MetricField::conformal_test(2)).unwrap();
        let f = |_p: &Point<f64>| 1.0;
        let est = lipschitz_probe(&chart, &f, &pt(&[0.0, 0.0]), 0.5, 20, 4).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.pairs_used, 20);
    }

    #[test]
    fn lipschitz_ball_must_fit_chart() {
        let chart = ChartSpec::centered(1.0, MetricField::euclidean(2)).unwrap();
        let f = |_p: &Point<f64>| 1.0;
        assert!(lipschitz_probe(&chart, &f, &pt(&[0.5, 0.0]), 0.6, 5, 1).is_err());
    }
}
