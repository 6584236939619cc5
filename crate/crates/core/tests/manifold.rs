use geoconvex::manifold::{christoffel_with, PartialsMode};
use geoconvex::sampling::{sample_in_ball, stream_rng};
use geoconvex::{Chart32, Chart64, ChartSpec, MetricField, Point32, Point64, TangentVector};

fn pt(c: &[f64]) -> Point64 {
    Point64::from_f64(c)
}

/// `Γ^k_ij = δ_ik ∂_jφ + δ_jk ∂_iφ − δ_ij ∂_kφ` for `g = e^{2φ} I`, `φ = |x|²`.
fn conformal_gamma(x: &[f64], k: usize, i: usize, j: usize) -> f64 {
    let dphi = |m: usize| 2.0 * x[m];
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    delta(i, k) * dphi(j) + delta(j, k) * dphi(i) - delta(i, j) * dphi(k)
}

#[test]
fn christoffel_matches_closed_form_on_grid() {
    let metric = MetricField::<f64>::conformal_test(2);
    let mut worst_analytic: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    for a in 0..10 {
        for b in 0..10 {
            let x = [-0.45 + 0.1 * a as f64, -0.45 + 0.1 * b as f64];
            let p = pt(&x);
            let analytic = christoffel_with(&metric, &p, PartialsMode::default()).unwrap();
            let fd = christoffel_with(&metric, &p, PartialsMode::FiniteDifference { step: 1e-5 }).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let expected = conformal_gamma(&x, k, i, j);
                        worst_analytic = worst_analytic.max((analytic.get(k, i, j) - expected).abs());
                        worst_fd = worst_fd.max((fd.get(k, i, j) - expected).abs());
                    }
                }
            }
        }
    }
    assert!(worst_analytic < 1e-12, "{worst_analytic}");
    assert!(worst_fd < 1e-6, "{worst_fd}");
}

#[test]
fn exp_and_bvp_round_trip() {
    let chart = Chart64::centered(0.8, MetricField::conformal_test(2)).unwrap();
    let mut rng = stream_rng(5, 0);
    for _ in 0..10 {
        let p = sample_in_ball(&mut rng, &chart.center, 0.3);
        let v = sample_in_ball(&mut rng, &Point64::origin(2), 0.3);
        let forward = chart.exp_map(&TangentVector::new(p.clone(), v.coords.clone()).unwrap()).unwrap();
        let back = chart.geodesic_bvp(&p, forward.end()).unwrap();
        let recovered = back.initial_velocity().unwrap();
        let dev = recovered.iter().zip(&v.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "{dev}");
    }
}

#[test]
fn sphere_midpoint_of_quarter_circle() {
    // north pole and (1, 0, 0) in the stereographic chart from the south pole
    let chart = Chart64::centered(1.2, MetricField::sphere_chart(2)).unwrap();
    let path = chart.geodesic_bvp(&pt(&[0.0, 0.0]), &pt(&[1.0, 0.0])).unwrap();
    let mid = path.eval(0.5).unwrap();
    let r2 = mid.coords[0].powi(2) + mid.coords[1].powi(2);
    let embedded = [2.0 * mid.coords[0] / (1.0 + r2), 2.0 * mid.coords[1] / (1.0 + r2), (1.0 - r2) / (1.0 + r2)];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (a, b) in embedded.iter().zip([h, 0.0, h]) {
        assert!((a - b).abs() < 1e-6, "{embedded:?}");
    }
    // quarter great circle
    assert!((path.length().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
}

#[test]
fn hyperbolic_distance_from_origin() {
    let chart = Chart64::centered(0.9, MetricField::hyperbolic_ball(2)).unwrap();
    for r in [0.1, 0.4, 0.7] {
        let d = chart.distance(&Point64::origin(2), &pt(&[0.0, r])).unwrap();
        assert!((d - 2.0 * r.atanh()).abs() < 1e-7, "r = {r}: {d}");
    }
}

#[test]
fn geodesics_have_constant_speed() {
    let chart = Chart64::centered(0.8, MetricField::conformal_test(2)).unwrap();
    let path = chart.geodesic_bvp(&pt(&[-0.5, 0.1]), &pt(&[0.4, 0.5])).unwrap();
    let n = path.steps();
    let first = path.arc_length(0, n / 2).unwrap();
    let second = path.arc_length(n / 2, n).unwrap();
    assert!((first - second).abs() < 1e-8 * path.length().unwrap());
    assert!(path.affine_defect().unwrap() < 1e-8);
}

#[test]
fn single_precision_solver() {
    let chart: Chart32 = ChartSpec::centered(0.8, MetricField::conformal_test(2)).unwrap();
    let p = Point32::new(vec![0.1, -0.2]);
    let q = Point32::new(vec![-0.3, 0.35]);
    let path = chart.geodesic_bvp(&p, &q).unwrap();
    let double = Chart64::centered(0.8, MetricField::conformal_test(2))
        .unwrap()
        .geodesic_bvp(&pt(&[0.1, -0.2]), &pt(&[-0.3, 0.35]))
        .unwrap();
    let (a, b) = (path.eval(0.5).unwrap(), double.eval(0.5).unwrap());
    for (x, y) in a.coords.iter().zip(&b.coords) {
        assert!((*x as f64 - y).abs() < 1e-4);
    }
}

#[test]
fn totally_normal_chart_validation() {
    let chart = Chart64::centered(0.6, MetricField::conformal_test(2)).unwrap();
    let report = chart.validate(50, 9);
    assert_eq!(report.pairs, 50);
    assert!(report.is_totally_normal(), "{:?}", report.failures);
}

#[test]
fn scaled_geodesic_report() {
    let chart = Chart64::centered(0.8, MetricField::conformal_test(2)).unwrap();
    let report = chart.scaled_geodesic_check(&pt(&[0.6, 0.0]), &pt(&[0.0, 0.6]), 0.5).unwrap();
    assert!(report.max_deviation < 1e-8);
    assert!(chart.scaled_geodesic_check(&pt(&[0.6, 0.0]), &pt(&[0.0, 0.6]), 0.0).is_err());
}
