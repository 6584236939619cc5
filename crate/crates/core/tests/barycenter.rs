use geoconvex::barycenter::{iterated_barycenter, SimplexSpec, StepsizeVector};
use geoconvex::sampling::{sample_in_ball, stream_rng};
use geoconvex::{Chart64, MetricField, Point64};

fn zoo(d: usize) -> Vec<MetricField<f64>> {
    vec![
        MetricField::euclidean(d),
        MetricField::sphere_chart(d),
        MetricField::hyperbolic_ball(d),
        MetricField::conformal_test(d),
        MetricField::conformal_test(d).scaled(0.5).unwrap(),
    ]
}

#[test]
fn euclidean_collapse_to_the_mean() {
    let chart = Chart64::centered(1.0, MetricField::euclidean(3)).unwrap();
    let mut rng = stream_rng(3, 0);
    for k in 1..=6 {
        let points: Vec<Point64> = (0..k).map(|_| sample_in_ball(&mut rng, &chart.center, 0.9)).collect();
        let t = StepsizeVector::new((2..=k).map(|j| 1.0 / j as f64).collect()).unwrap();
        let b = iterated_barycenter(&chart, &points, &t).unwrap();
        for i in 0..3 {
            let mean = points.iter().map(|p| p.coords[i]).sum::<f64>() / k as f64;
            assert!((b.coords[i] - mean).abs() < 1e-12, "k = {k}");
        }
    }
}

#[test]
fn endpoint_consistency_across_metrics() {
    for metric in zoo(2) {
        let chart = Chart64::centered(0.7, metric).unwrap();
        let points = [Point64::from_f64(&[0.3, 0.1]), Point64::from_f64(&[-0.2, 0.4]), Point64::from_f64(&[0.0, -0.35])];
        let frozen = iterated_barycenter(&chart, &points, &StepsizeVector::from_f64(&[0.4, 0.0]).unwrap()).unwrap();
        let two = iterated_barycenter(&chart, &points[..2], &StepsizeVector::from_f64(&[0.4]).unwrap()).unwrap();
        assert_eq!(frozen, two, "{}", chart.metric.kind_tag());
        let last = iterated_barycenter(&chart, &points, &StepsizeVector::from_f64(&[0.4, 1.0]).unwrap()).unwrap();
        assert_eq!(last, points[2]);
    }
}

#[test]
fn euclidean_hull_stays_in_the_triangle() {
    let chart = Chart64::centered(1.0, MetricField::euclidean(2)).unwrap();
    let v = [Point64::from_f64(&[0.6, 0.1]), Point64::from_f64(&[-0.4, 0.5]), Point64::from_f64(&[-0.2, -0.6])];
    let simplex = SimplexSpec::new(v.to_vec(), chart).unwrap();
    let sample = simplex.hull_sample(1.0, 10).unwrap();
    assert!(sample.failures.is_empty());
    assert_eq!(sample.nodes.len(), 121);
    // half-space form: for each edge, the opposite vertex and every node lie on the same side
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let side = |x: &[f64]| {
            (v[b].coords[0] - v[a].coords[0]) * (x[1] - v[a].coords[1]) - (v[b].coords[1] - v[a].coords[1]) * (x[0] - v[a].coords[0])
        };
        let reference = side(&v[c].coords).signum();
        for node in &sample.nodes {
            assert!(side(&node.point.coords) * reference >= -1e-12);
        }
    }
}

#[test]
fn curved_hull_stays_in_the_chart() {
    let chart = Chart64::centered(0.6, MetricField::conformal_test(2)).unwrap();
    let simplex = SimplexSpec::regular(chart.clone(), 0.5).unwrap();
    let sample = simplex.hull_sample(1.0, 6).unwrap();
    assert!(sample.failures.is_empty());
    assert!(sample.nodes.iter().all(|n| chart.contains(&n.point)));
    let csv = sample.to_csv();
    assert!(csv.starts_with("t_2,t_3,x_1,x_2\n"));
    assert_eq!(csv.lines().count(), 50);
}

#[test]
fn centered_simplex_maps_mean_stepsizes_to_origin_when_flat() {
    for d in 1..=3 {
        let chart = Chart64::centered(0.9, MetricField::conformal_test(d)).unwrap();
        let simplex = SimplexSpec::regular(chart, 0.5).unwrap();
        let x = simplex.bary_map(&StepsizeVector::mean(d), 0.0).unwrap();
        assert!(x.norm() < 1e-12, "d = {d}: {x}");
    }
}
