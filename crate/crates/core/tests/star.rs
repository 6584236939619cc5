use geoconvex::star::{
    classify_geodesic_boundary, compactness_witness, discontinuity_witness, star_dist, star_geodesic, BranchPattern,
    Classification, CompactnessOutcome, CoordinatePattern, SequenceSpec, StarFunction, StarMetric, StarPoint,
    WitnessOutcome,
};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn star_point() -> impl Strategy<Value = StarPoint<Rational64>> {
    (1i64..=20, 0i64..=20, 1u64..=6).prop_map(|(d, n, b)| StarPoint::new(r(n.min(d), d), b).unwrap())
}

fn tag() -> impl Strategy<Value = StarMetric> {
    prop_oneof![Just(StarMetric::D1), Just(StarMetric::D2)]
}

fn unit() -> impl Strategy<Value = Rational64> {
    (1i64..=50, 0i64..=50).prop_map(|(d, n)| r(n.min(d), d))
}

proptest! {
    #[test]
    fn metric_axioms(a in star_point(), b in star_point(), c in star_point(), tag in tag()) {
        let ab = star_dist(tag, &a, &b);
        prop_assert_eq!(ab, star_dist(tag, &b, &a));
        prop_assert_eq!(ab.is_zero(), a == b);
        prop_assert!(!ab.is_negative());
        prop_assert!(star_dist(tag, &a, &c) <= ab + star_dist(tag, &b, &c));
    }

    #[test]
    fn geodesic_identity(a in star_point(), b in star_point(), s in unit(), t in unit(), tag in tag()) {
        let g = star_geodesic(tag, &a, &b);
        let (gs, gt) = (g.eval(&s).unwrap(), g.eval(&t).unwrap());
        prop_assert_eq!(star_dist(tag, &gs, &gt), (s - t).abs() * g.length);
        prop_assert_eq!(g.eval(&Rational64::zero()).unwrap(), a);
        prop_assert_eq!(g.eval(&Rational64::one()).unwrap(), b);
    }

    #[test]
    fn functions_are_piecewise_linear_and_convex(a in star_point(), b in star_point(), tag in tag(), s in unit(), t in unit(), u in unit()) {
        let g = star_geodesic(tag, &a, &b);
        let mut params = [s, t, u];
        params.sort();
        for kind in [StarFunction::F, StarFunction::G] {
            let value = |t: &Rational64| kind.value(&g.eval(t).unwrap());
            let (f0, f1) = (kind.value(&a), kind.value(&b));
            for p in &params {
                prop_assert!(value(p) <= (Rational64::one() - p) * f0 + p * f1);
            }
            // three parameters on one side of the breakpoint are collinear
            let side = |p: &Rational64| g.breakpoint.map_or(0, |bp| if *p < bp { -1 } else if *p > bp { 1 } else { 0 });
            let [p, q, w] = &params;
            if p < q && q < w && side(p) == side(q) && side(q) == side(w) && side(p) != 0 {
                prop_assert_eq!((value(q) - value(p)) * (w - p), (value(w) - value(p)) * (q - p));
            }
        }
    }

    #[test]
    fn interior_epsilon_is_attained_by_an_extension(x in unit(), branch in 1u64..=8, tag in tag()) {
        let p = StarPoint::new(x, branch).unwrap();
        if let Classification::Interior { epsilon } = classify_geodesic_boundary(tag, &p) {
            prop_assert!(epsilon > Rational64::zero());
            // the extension to the tip of its own branch ends at least epsilon away
            prop_assert!(star_dist(tag, &p, &StarPoint::tip(branch).unwrap()) >= epsilon);
        } else {
            prop_assert!(p.is_tip() || (p.is_origin() && tag == StarMetric::D1));
        }
    }
}

#[test]
fn origins_are_canonical() {
    for n in 1..10 {
        assert_eq!(StarPoint::new(Rational64::zero(), n).unwrap(), StarPoint::origin());
    }
}

#[test]
fn witnesses_shrink_with_constant_gap() {
    for (kind, tag) in [(StarFunction::F, StarMetric::D1), (StarFunction::G, StarMetric::D2)] {
        let WitnessOutcome::Witness(rows) = discontinuity_witness::<Rational64>(kind, tag, 1..=200) else {
            panic!("expected a witness");
        };
        assert!(rows.windows(2).all(|w| w[1].distance_to_origin < w[0].distance_to_origin));
        assert!(rows.iter().all(|row| row.gap.is_one()));
    }
}

#[test]
fn compactness_examples() {
    let tips = SequenceSpec {
        branch: BranchPattern::Linear { slope: 1, offset: 0 },
        coordinate: CoordinatePattern { constant: r(1, 1), harmonic: r(0, 1) },
    };
    match compactness_witness(StarMetric::D1, &tips, 30).unwrap() {
        CompactnessOutcome::Convergent { subsequence, limit, .. } => {
            assert_eq!(subsequence, (1..=30).collect::<Vec<_>>());
            assert!(limit.is_origin());
        }
        other => panic!("{other:?}"),
    }

    let approach = SequenceSpec {
        branch: BranchPattern::Constant(5),
        coordinate: CoordinatePattern { constant: r(1, 1), harmonic: r(-1, 1) },
    };
    match compactness_witness(StarMetric::D1, &approach, 30).unwrap() {
        CompactnessOutcome::Convergent { limit, tail_distance, .. } => {
            assert_eq!(limit, StarPoint::tip(5).unwrap());
            assert_eq!(tail_distance, r(1, 150));
        }
        other => panic!("{other:?}"),
    }

    let spread = SequenceSpec {
        branch: BranchPattern::Linear { slope: 1, offset: 0 },
        coordinate: CoordinatePattern { constant: r(1, 2), harmonic: r(0, 1) },
    };
    match compactness_witness(StarMetric::D2, &spread, 30).unwrap() {
        CompactnessOutcome::NonCompact { separation, observed_min, .. } => {
            assert_eq!(separation, r(1, 1));
            assert_eq!(observed_min, r(1, 1));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn float_and_big_rational_backends_agree() {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let a = StarPoint::new(0.25_f64, 2).unwrap();
    let b = StarPoint::new(0.75_f64, 3).unwrap();
    assert!((star_dist(StarMetric::D1, &a, &b) - (0.125 + 0.25)).abs() < 1e-15);
    let big = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let a = StarPoint::new(big(1, 4), 2).unwrap();
    let b = StarPoint::new(big(3, 4), 3).unwrap();
    assert_eq!(star_dist(StarMetric::D1, &a, &b), big(3, 8));
}
