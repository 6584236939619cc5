use num_rational::Rational64;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::config::{ExperimentConfig, FunctionSpec, MetricName, StarDemo};
use super::{CliError, Command, Report};
use crate::barycenter::{SimplexSpec, StepsizeVector};
use crate::lemma::{self, Objective, SquaredDistance};
use crate::linalg::{self, Matrix};
use crate::manifold::{ChartSpec, Point};
use crate::sampling;
use crate::star::{
    classify_geodesic_boundary, compactness_witness, discontinuity_witness, star_dist, tip_to_tip_geodesic,
    BoundaryWitness, BranchPattern, Classification, CompactnessOutcome, CoordinatePattern, NoWitnessReason,
    SequenceSpec, StarFunction, StarPoint, WitnessOutcome,
};

/// Tolerance for the closed-form geodesic oracles reported by `geodesic`.
const GEODESIC_ORACLE_TOLERANCE: f64 = 1e-6;
/// Tolerance for the affine stepsize oracle in Euclidean coverage sweeps.
const AFFINE_ORACLE_TOLERANCE: f64 = 1e-7;
/// Random simplexes worse conditioned than this are redrawn.
const DRAW_CONDITION_LIMIT: f64 = 1e4;

pub(super) fn dispatch(command: &Command, config: &ExperimentConfig) -> Result<Report, CliError> {
    let mut records = vec![header(command, config)];
    let mut files = Vec::new();
    let passed = match command {
        Command::Geodesic { .. } => geodesic(config, &mut records, &mut files)?,
        Command::Barycenter { .. } => barycenter(config, &mut records)?,
        Command::Hull => hull(config, &mut records, &mut files)?,
        Command::JacobianCheck => jacobian_check(config, &mut records)?,
        Command::Lemma => coverage(config, &mut records, &mut files)?,
        Command::Convexity => convexity(config, &mut records)?,
        Command::Bound => bound(config, &mut records)?,
        Command::Lipschitz => lipschitz(config, &mut records)?,
        Command::Star { .. } => star(config, &mut records)?,
    };
    Ok(Report { records, files, passed })
}

fn header(command: &Command, config: &ExperimentConfig) -> Value {
    json!({
        "record": "header",
        "command": command.name(),
        "seed": config.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "metric": config.metric.kind,
        "dim": config.metric.dim,
        "chart_radius": config.chart.radius,
    })
}

fn coords(p: &Point<f64>) -> Value {
    json!(p.coords)
}

fn seed(config: &ExperimentConfig) -> u64 {
    config.seed.expect("seed checked before dispatch")
}

fn objective(spec: &FunctionSpec, chart: &ChartSpec<f64>) -> Box<dyn Objective<f64>> {
    match spec.clone() {
        FunctionSpec::SqNorm => Box::new(|p: &Point<f64>| p.coords.iter().map(|x| x * x).sum::<f64>()),
        FunctionSpec::NegSqNorm => Box::new(|p: &Point<f64>| -p.coords.iter().map(|x| x * x).sum::<f64>()),
        FunctionSpec::Linear { a } => Box::new(move |p: &Point<f64>| a.iter().zip(&p.coords).map(|(a, x)| a * x).sum::<f64>()),
        FunctionSpec::Constant { c } => Box::new(move |_: &Point<f64>| c),
        FunctionSpec::SqDist { anchor } => {
            let anchor = anchor.map_or_else(|| chart.center.clone(), |a| Point::from_f64(&a));
            Box::new(SquaredDistance::new(chart.clone(), anchor))
        }
    }
}

/// Point of the unit sphere for a stereographic chart coordinate.
fn embed(x: &[f64]) -> Vec<f64> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let mut s: Vec<f64> = x.iter().map(|v| 2.0 * v / (1.0 + r2)).collect();
    s.push((1.0 - r2) / (1.0 + r2));
    s
}

fn unembed(s: &[f64]) -> Vec<f64> {
    let (z, head) = s.split_last().expect("non-empty embedding");
    head.iter().map(|v| v / (1.0 + z)).collect()
}

fn great_circle(p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
    let (a, b) = (embed(p), embed(q));
    let cos: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0);
    let omega = cos.acos();
    if omega < 1e-15 {
        return p.to_vec();
    }
    let (wa, wb) = (((1.0 - t) * omega).sin() / omega.sin(), (t * omega).sin() / omega.sin());
    unembed(&a.iter().zip(&b).map(|(x, y)| wa * x + wb * y).collect::<Vec<_>>())
}

fn geodesic(config: &ExperimentConfig, records: &mut Vec<Value>, files: &mut Vec<(String, String)>) -> Result<bool, CliError> {
    let chart = config.chart()?;
    let d = chart.dim();
    let p = config.geodesic.p.as_deref().map_or_else(|| chart.center.clone(), Point::from_f64);
    let q = config.geodesic.q.as_deref().map_or_else(
        || {
            let mut c = chart.center.coords.clone();
            c[0] += 0.5 * chart.radius;
            Point::new(c)
        },
        Point::from_f64,
    );
    let path = chart.geodesic_bvp(&p, &q)?;
    let residual = path.eval(1.0)?.coord_distance(&q);
    let oracle = match config.metric.kind {
        _ if config.metric.scale.is_some() => None,
        MetricName::Euclidean => Some("straight-line"),
        MetricName::SphereChart => Some("great-circle"),
        _ => None,
    };
    let mut deviation: f64 = 0.0;
    for (i, x) in path.samples().iter().enumerate() {
        let t = path.param(i);
        let expected = match oracle {
            Some("straight-line") => Some(p.lerp(&q, t).coords),
            Some(_) => Some(great_circle(&p.coords, &q.coords, t)),
            None => None,
        };
        if let Some(e) = &expected {
            deviation = deviation.max(linalg::max_abs_diff(&x.coords, e));
        }
        records.push(json!({ "record": "sample", "i": i, "t": t, "x": coords(x) }));
    }
    let pass = oracle.is_none() || deviation <= GEODESIC_ORACLE_TOLERANCE;
    records.push(json!({
        "record": "summary",
        "dim": d,
        "p": coords(&p),
        "q": coords(&q),
        "length": path.length()?,
        "residual": residual,
        "affine_defect": path.affine_defect()?,
        "oracle": oracle,
        "oracle_deviation": oracle.map(|_| deviation),
        "pass": pass,
    }));
    files.push(("path.csv".into(), path.to_csv()));
    Ok(pass)
}

fn barycenter(config: &ExperimentConfig, records: &mut Vec<Value>) -> Result<bool, CliError> {
    let simplex = config.simplex()?;
    let t = match &config.barycenter.t {
        Some(t) => StepsizeVector::from_f64(t)?,
        None => StepsizeVector::mean(simplex.dim()),
    };
    if t.len() != simplex.dim() {
        return Err(CliError::Config(format!("barycenter.t needs {} stepsizes", simplex.dim())));
    }
    let h = config.barycenter.h;
    let chain = simplex.bary_chain(&t, h)?;
    for (k, b) in chain.iter().enumerate() {
        records.push(json!({ "record": "stage", "k": k + 1, "point": coords(b) }));
    }
    let last = chain.last().expect("chain starts at p_1");
    records.push(json!({
        "record": "summary",
        "h": h,
        "t": t.values(),
        "vertices": simplex.points().iter().map(coords).collect::<Vec<_>>(),
        "point": coords(last),
        "pass": true,
    }));
    Ok(true)
}

fn hull(config: &ExperimentConfig, records: &mut Vec<Value>, files: &mut Vec<(String, String)>) -> Result<bool, CliError> {
    let simplex = config.simplex()?;
    let sample = simplex.hull_sample(config.hull.h, config.hull.resolution)?;
    for node in &sample.nodes {
        records.push(json!({ "record": "node", "t": node.t.values(), "x": coords(&node.point) }));
    }
    for (t, e) in &sample.failures {
        records.push(json!({ "record": "failure", "t": t.values(), "error": e.to_string() }));
    }
    let pass = sample.failures.is_empty();
    records.push(json!({
        "record": "summary",
        "h": config.hull.h,
        "resolution": config.hull.resolution,
        "nodes": sample.nodes.len(),
        "failures": sample.failures.len(),
        "pass": pass,
    }));
    files.push(("hull.csv".into(), sample.to_csv()));
    Ok(pass)
}

/// Largest `|closed[k][j] − fd[j][k]|`: the closed form stores one row per
/// parameter, the finite-difference Jacobian one column per parameter.
pub(crate) fn jacobian_deviation(closed: &Matrix<f64>, fd: &Matrix<f64>) -> f64 {
    let n = closed.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        for j in 0..n {
            worst = worst.max((closed[(k, j)] - fd[(j, k)]).abs());
        }
    }
    worst
}

fn config_for_dim(config: &ExperimentConfig, d: usize) -> ExperimentConfig {
    let mut c = config.clone();
    c.metric.dim = d;
    if c.metric.coefficients.as_ref().is_some_and(|a| a.len() != d) {
        c.metric.coefficients = None;
    }
    c.chart.center = None;
    c
}

fn jacobian_check(config: &ExperimentConfig, records: &mut Vec<Value>) -> Result<bool, CliError> {
    let jc = &config.jacobian;
    let mut worst: f64 = 0.0;
    let mut all_rejected = true;
    for &d in &jc.dims {
        if d == 0 {
            return Err(CliError::Config("jacobian.dims entries must be positive".into()));
        }
        let chart = config_for_dim(config, d).chart()?;
        if jc.radius >= chart.radius {
            return Err(CliError::Config("jacobian.radius must be below chart.radius".into()));
        }
        let mut rng = sampling::stream_rng(seed(config), d as u64);
        let mut accepted = 0;
        let mut draws = 0usize;
        while accepted < jc.count {
            draws += 1;
            if draws > 100 * jc.count.max(1) {
                return Err(CliError::Solver(crate::GeoError::DegenerateConfiguration));
            }
            let points = (0..=d).map(|_| sampling::sample_in_ball(&mut rng, &chart.center, jc.radius)).collect();
            let simplex = SimplexSpec::new(points, chart.clone())?;
            let closed = match simplex.jacobian_closed_form() {
                Ok(m) if m.condition_number() <= DRAW_CONDITION_LIMIT => m,
                _ => continue,
            };
            let fd = simplex.stepsize_jacobian(&StepsizeVector::mean(d), 0.0, config.solver.fd_step)?;
            let deviation = jacobian_deviation(&closed, &fd);
            worst = worst.max(deviation);
            records.push(json!({
                "record": "simplex",
                "dim": d,
                "index": accepted,
                "vertices": simplex.points().iter().map(coords).collect::<Vec<_>>(),
                "condition": closed.condition_number(),
                "max_deviation": deviation,
            }));
            accepted += 1;
        }
        // Every vertex on the first axis: affinely dependent for d ≥ 2, a repeated vertex for d = 1.
        let planted: Vec<Point<f64>> = (0..=d)
            .map(|j| {
                let mut c = vec![0.0; d];
                c[0] = if d == 1 { 0.1 } else { 0.1 * j as f64 };
                Point::new(c)
            })
            .collect();
        let outcome = SimplexSpec::new(planted, chart.clone())?.jacobian_closed_form();
        let rejected = matches!(outcome, Err(crate::GeoError::DegenerateSimplex { .. }));
        all_rejected &= rejected;
        records.push(json!({ "record": "degenerate", "dim": d, "rejected": rejected }));
    }
    let pass = worst <= jc.tolerance && all_rejected;
    records.push(json!({
        "record": "summary",
        "count_per_dim": jc.count,
        "dims": jc.dims,
        "max_deviation": worst,
        "tolerance": jc.tolerance,
        "degenerate_rejected": all_rejected,
        "pass": pass,
    }));
    Ok(pass)
}

/// Stepsizes of the Euclidean iterated barycenter through `x`: with barycentric
/// coordinates `λ`, `t_k = λ_k / (λ_1 + … + λ_k)`.
pub(crate) fn affine_stepsizes(vertices: &[Point<f64>], x: &Point<f64>) -> Result<Vec<f64>, crate::GeoError> {
    let n = vertices.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n - 1 {
        rows.push(vertices.iter().map(|p| p.coords[i]).collect());
    }
    rows.push(vec![1.0; n]);
    let mut rhs = x.coords.clone();
    rhs.push(1.0);
    let lambda = Matrix::from_rows(&rows)?.solve(&rhs)?;
    let mut partial = lambda[0];
    Ok((1..n)
        .map(|k| {
            partial += lambda[k];
            lambda[k] / partial
        })
        .collect())
}

fn coverage(config: &ExperimentConfig, records: &mut Vec<Value>, files: &mut Vec<(String, String)>) -> Result<bool, CliError> {
    let simplex = config.simplex()?;
    let lc = &config.lemma;
    let settings = config.inversion_settings();
    let report = match lc.eta {
        Some(eta) => lemma::coverage_sweep(&simplex, lc.h, eta, config.grid(), &settings)?,
        None => {
            let search = lemma::certify_radius(&simplex, lc.h, lc.eta_max, config.grid(), lc.bisection_steps, &settings)?;
            for (eta, ok) in &search.trials {
                records.push(json!({ "record": "trial", "eta": eta, "certified": ok }));
            }
            match search.certified {
                Some(r) => r,
                None => {
                    records.push(json!({ "record": "summary", "h": lc.h, "certified": false, "eta": 0.0, "pass": false }));
                    return Ok(false);
                }
            }
        }
    };
    let euclidean = config.metric.kind == MetricName::Euclidean;
    let mut oracle_deviation: f64 = 0.0;
    let mut csv = String::from("target,");
    csv.push_str(&(1..=simplex.dim()).map(|i| format!("x_{i}")).collect::<Vec<_>>().join(","));
    for k in 2..=simplex.dim() + 1 {
        csv.push_str(&format!(",t_{k}"));
    }
    csv.push_str(",residual\n");
    for (i, o) in report.targets.iter().enumerate() {
        match &o.result {
            Ok(inv) => {
                let mut rec = json!({
                    "record": "target",
                    "index": i,
                    "x": coords(&o.target),
                    "t": inv.t.values(),
                    "residual": inv.residual,
                    "iterations": inv.iterations,
                });
                if euclidean {
                    let oracle = affine_stepsizes(simplex.points(), &o.target)?;
                    let dev = linalg::max_abs_diff(&oracle, inv.t.values());
                    oracle_deviation = oracle_deviation.max(dev);
                    rec["oracle_deviation"] = json!(dev);
                }
                records.push(rec);
                let fields: Vec<String> = o.target.coords.iter().chain(inv.t.values()).map(|v| v.to_string()).collect();
                csv.push_str(&format!("{i},{},{}\n", fields.join(","), inv.residual));
            }
            Err(e) => records.push(json!({ "record": "target", "index": i, "x": coords(&o.target), "error": e.to_string() })),
        }
    }
    let oracle_ok = !euclidean || oracle_deviation <= AFFINE_ORACLE_TOLERANCE;
    let pass = report.certified() && report.max_residual <= lc.tolerance && oracle_ok;
    records.push(json!({
        "record": "summary",
        "h": report.h,
        "eta": report.eta_estimate,
        "grid_size": report.grid_size,
        "success_fraction": report.success_fraction,
        "failures": report.failures(),
        "max_residual": report.max_residual,
        "stepsize_box": report.stepsize_box,
        "certified": report.certified(),
        "oracle_deviation": euclidean.then_some(oracle_deviation),
        "pass": pass,
    }));
    files.push(("coverage.csv".into(), csv));
    Ok(pass)
}

fn convexity(config: &ExperimentConfig, records: &mut Vec<Value>) -> Result<bool, CliError> {
    let chart = config.chart()?;
    let cc = &config.convexity;
    let f = objective(&cc.function, &chart);
    let report = lemma::convexity_check(&chart, &*f, cc.n_pairs, cc.n_t, seed(config));
    for rec in &report.pairs {
        records.push(json!({
            "record": "pair",
            "index": rec.index,
            "p": coords(&rec.p),
            "q": coords(&rec.q),
            "worst_gap": rec.worst.map(|w| w.0),
            "worst_t": rec.worst.map(|w| w.1),
            "error": rec.error.as_ref().map(|e| e.to_string()),
        }));
    }
    let convex = report.is_convex(cc.tolerance);
    let witness = report.witness.as_ref().filter(|w| w.violation > cc.tolerance).map(|w| {
        json!({ "p": coords(&w.p), "q": coords(&w.q), "t": w.t, "violation": w.violation })
    });
    let pass = convex == cc.expect_convex && report.pairs_tested > 0;
    records.push(json!({
        "record": "summary",
        "function": cc.function,
        "pairs_tested": report.pairs_tested,
        "failed_pairs": report.failed_pairs,
        "n_t": cc.n_t,
        "worst_violation": report.worst_violation,
        "tolerance": cc.tolerance,
        "convex": convex,
        "expect_convex": cc.expect_convex,
        "witness": witness,
        "pass": pass,
    }));
    Ok(pass)
}

fn bound(config: &ExperimentConfig, records: &mut Vec<Value>) -> Result<bool, CliError> {
    let simplex = config.simplex()?;
    let h = config.bound.h.unwrap_or(config.lemma.h);
    let f = objective(&config.bound.function, simplex.chart());
    let d = simplex.dim();
    let mut targets = vec![Point::origin(d)];
    targets.extend(config.grid().rays(d, h.abs() * config.bound.eta)?.into_iter().flatten());
    let cert = lemma::bound_certificate(&simplex, &*f, h, &targets, &config.inversion_settings())?;
    let mut chains_hold = true;
    for (i, t) in cert.targets.iter().enumerate() {
        chains_hold &= t.chain_holds();
        let chain: Vec<Value> = t
            .chain
            .iter()
            .map(|s| {
                json!({
                    "k": s.k,
                    "value": s.value,
                    "convex_combination": s.convex_combination,
                    "running_max": s.running_max,
                    "holds": s.holds,
                })
            })
            .collect();
        records.push(json!({
            "record": "target",
            "index": i,
            "x": coords(&t.target),
            "t": t.t.values(),
            "value": t.value,
            "chain": chain,
            "chain_holds": t.chain_holds(),
        }));
    }
    let pass = cert.verified && chains_hold;
    records.push(json!({
        "record": "summary",
        "function": config.bound.function,
        "h": h,
        "targets": cert.targets.len(),
        "bound": cert.bound,
        "verified": cert.verified,
        "chains_hold": chains_hold,
        "pass": pass,
    }));
    Ok(pass)
}

fn lipschitz(config: &ExperimentConfig, records: &mut Vec<Value>) -> Result<bool, CliError> {
    let chart = config.chart()?;
    let lc = &config.lipschitz;
    let f = objective(&lc.function, &chart);
    let center = lc.center.as_deref().map_or_else(|| chart.center.clone(), Point::from_f64);
    let est = lemma::lipschitz_probe(&chart, &*f, &center, lc.radius, lc.n_pairs, seed(config))?;
    let pass = est.pairs_used > 0;
    records.push(json!({
        "record": "summary",
        "function": lc.function,
        "center": coords(&center),
        "radius": lc.radius,
        "estimate": est.estimate,
        "pairs_used": est.pairs_used,
        "skipped": est.skipped,
        "pass": pass,
    }));
    Ok(pass)
}

fn ratio(pair: [i64; 2], name: &str) -> Result<Rational64, CliError> {
    if pair[1] == 0 {
        return Err(CliError::Config(format!("{name} has a zero denominator")));
    }
    Ok(Rational64::new(pair[0], pair[1]))
}

fn star_point_record(p: &StarPoint<Rational64>) -> Value {
    json!({ "x": p.x().to_string(), "branch": p.branch() })
}

fn star(config: &ExperimentConfig, records: &mut Vec<Value>) -> Result<bool, CliError> {
    let sc = &config.star;
    let kind = sc.function()?;
    let tag = sc.metric()?;
    let all = sc.demo == StarDemo::All;
    let mut pass = true;
    if all || sc.demo == StarDemo::Witness {
        match discontinuity_witness::<Rational64>(kind, tag, 1..=sc.max_p) {
            WitnessOutcome::Witness(rows) => {
                for row in rows {
                    let expected = Rational64::new(1, row.p as i64);
                    pass &= row.gap.is_one() && row.distance_to_origin == expected;
                    records.push(json!({
                        "record": "witness",
                        "function": kind.to_string(),
                        "metric": tag.to_string(),
                        "p": row.p,
                        "branch": row.point.branch(),
                        "x": row.point.x().to_string(),
                        "distance": row.distance_to_origin.to_string(),
                        "f": StarFunction::F.value(&row.point).to_string(),
                        "g": StarFunction::G.value(&row.point).to_string(),
                        "gap": row.gap.to_string(),
                    }));
                }
            }
            WitnessOutcome::NoWitness(reason) => records.push(json!({
                "record": "no-witness",
                "function": kind.to_string(),
                "metric": tag.to_string(),
                "reason": match reason {
                    NoWitnessReason::Continuous => "continuous",
                    NoWitnessReason::NotConstructed => "not-constructed",
                },
            })),
        }
    }
    if all || sc.demo == StarDemo::Classify {
        let mut points = vec![StarPoint::origin()];
        for &[n, d, branch] in &sc.points {
            let x = ratio([n, d], "star.points")?;
            let branch = u64::try_from(branch).map_err(|_| CliError::Config("star.points branch must be positive".into()))?;
            points.push(StarPoint::new(x, branch).map_err(|e| CliError::Config(e.to_string()))?);
        }
        for p in &points {
            let mut rec = json!({ "record": "classify", "metric": tag.to_string(), "point": star_point_record(p) });
            match classify_geodesic_boundary(tag, p) {
                Classification::Interior { epsilon } => {
                    rec["class"] = json!("interior");
                    rec["epsilon"] = json!(epsilon.to_string());
                }
                Classification::Boundary(BoundaryWitness::TipToTip) => {
                    rec["class"] = json!("boundary");
                    let family: Vec<Value> = [1u64, 10, 100]
                        .iter()
                        .map(|&m| {
                            let g = tip_to_tip_geodesic::<Rational64>(tag, m);
                            let o = StarPoint::origin();
                            json!({
                                "m": m,
                                "branches": [m, m + 1],
                                "endpoint_distances": [
                                    star_dist(tag, &g.a, &o).to_string(),
                                    star_dist(tag, &g.b, &o).to_string(),
                                ],
                                "breakpoint": g.breakpoint.map(|s| s.to_string()),
                            })
                        })
                        .collect();
                    rec["family"] = json!({ "kind": "tip-to-tip", "samples": family });
                }
                Classification::Boundary(BoundaryWitness::Endpoint { branch }) => {
                    rec["class"] = json!("boundary");
                    rec["family"] = json!({ "kind": "endpoint", "branch": branch });
                }
            }
            records.push(rec);
        }
    }
    if all || sc.demo == StarDemo::Compactness {
        let branch = if sc.slope == 0 {
            BranchPattern::Constant(sc.offset)
        } else {
            BranchPattern::Linear { slope: sc.slope, offset: sc.offset }
        };
        let spec = SequenceSpec {
            branch,
            coordinate: CoordinatePattern {
                constant: ratio(sc.constant, "star.constant")?,
                harmonic: ratio(sc.harmonic, "star.harmonic")?,
            },
        };
        let outcome = compactness_witness(tag, &spec, sc.horizon).map_err(|e| CliError::Config(e.to_string()))?;
        let mut rec = json!({ "record": "compactness", "metric": tag.to_string(), "horizon": sc.horizon });
        match outcome {
            CompactnessOutcome::Convergent { subsequence, limit, tail_distance } => {
                rec["outcome"] = json!("convergent");
                rec["subsequence_len"] = json!(subsequence.len());
                rec["subsequence_head"] = json!(subsequence.iter().take(10).collect::<Vec<_>>());
                rec["limit"] = star_point_record(&limit);
                rec["tail_distance"] = json!(tail_distance.to_string());
            }
            CompactnessOutcome::NonCompact { separation, observed_min, sampled } => {
                rec["outcome"] = json!("non-compact");
                rec["separation"] = json!(separation.to_string());
                rec["observed_min"] = json!(observed_min.to_string());
                rec["sampled"] = json!(sampled);
                pass &= observed_min >= separation && separation > Rational64::zero();
            }
            CompactnessOutcome::Undecided { reason } => {
                rec["outcome"] = json!("undecided");
                rec["reason"] = json!(reason);
            }
        }
        records.push(rec);
    }
    records.push(json!({
        "record": "summary",
        "function": kind.to_string(),
        "metric": tag.to_string(),
        "demo": sc.demo,
        "pass": pass,
    }));
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(command: Command, config: &ExperimentConfig) -> Report {
        super::super::run(&command, config).unwrap()
    }

    fn euclid(d: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.metric.kind = MetricName::Euclidean;
        c.metric.dim = d;
        c
    }

    #[test]
    fn great_circle_endpoints() {
        let p = [0.1, -0.2];
        let q = [0.3, 0.25];
        assert!(great_circle(&p, &q, 0.0).iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-14));
        assert!(great_circle(&p, &q, 1.0).iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn affine_oracle_inverts_the_mean() {
        let v = [Point::from_f64(&[1.0, 0.0]), Point::from_f64(&[-0.5, 0.8]), Point::from_f64(&[-0.5, -0.8])];
        let t = affine_stepsizes(&v, &Point::from_f64(&[0.0, 0.0])).unwrap();
        assert!((t[0] - 0.5).abs() < 1e-12 && (t[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn geodesic_unit_segment() {
        let mut c = euclid(2);
        c.geodesic.p = Some(vec![0.0, 0.0]);
        c.geodesic.q = Some(vec![1.0, 0.0]);
        c.chart.radius = 2.0;
        let r = run(Command::Geodesic { p: None, q: None }, &c);
        let s = r.summary().unwrap();
        assert!((s["length"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.exit_code(), 0);
        assert!(r.files[0].1.starts_with("t,x_1,x_2\n"));
    }

    #[test]
    fn geodesic_repeated_point() {
        let mut c = euclid(2);
        c.geodesic.p = Some(vec![0.2, 0.1]);
        c.geodesic.q = Some(vec![0.2, 0.1]);
        let r = run(Command::Geodesic { p: None, q: None }, &c);
        assert_eq!(r.summary().unwrap()["length"].as_f64().unwrap(), 0.0);
        assert!(r.records.iter().filter(|v| v["record"] == "sample").all(|v| v["x"] == json!([0.2, 0.1])));
    }

    #[test]
    fn randomized_commands_need_a_seed() {
        let c = ExperimentConfig::default();
        assert!(matches!(super::super::run(&Command::Convexity, &c), Err(CliError::Config(_))));
    }

    #[test]
    fn bound_on_constant_function() {
        let mut c = ExperimentConfig::default();
        c.bound.function = FunctionSpec::Constant { c: 2.5 };
        c.lemma.angular = 4;
        c.lemma.radial = 2;
        let r = run(Command::Bound, &c);
        assert_eq!(r.summary().unwrap()["bound"].as_f64().unwrap(), 2.5);
        assert!(r.passed);
    }

    #[test]
    fn star_witness_table() {
        let mut c = ExperimentConfig::default();
        c.star.demo = StarDemo::Witness;
        let r = run(Command::Star { demo: None, function: None, star_metric: None, max_p: None }, &c);
        let rows: Vec<&Value> = r.records.iter().filter(|v| v["record"] == "witness").collect();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|v| v["gap"] == "1"));
        assert_eq!(rows[9]["distance"], "1/10");
    }

    #[test]
    fn star_classifier_records() {
        let mut c = ExperimentConfig::default();
        c.star.demo = StarDemo::Classify;
        c.star.metric = "d2".into();
        let r = run(Command::Star { demo: None, function: None, star_metric: None, max_p: None }, &c);
        let rows: Vec<&Value> = r.records.iter().filter(|v| v["record"] == "classify").collect();
        assert_eq!(rows[0]["class"], "interior");
        assert_eq!(rows[0]["epsilon"], "1");
        assert_eq!(rows[1]["epsilon"], "1/2");
    }
}
