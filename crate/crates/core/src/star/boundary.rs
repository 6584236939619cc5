use super::geodesic::star_geodesic;
use super::{StarGeodesic, StarMetric, StarPoint, StarScalar};

/// How a point fails to be a geodesic-interior point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryWitness {
    /// Geodesics joining the tips of branches `m` and `m + 1` pass through the
    /// origin, and their extensions end within `1/m` of it.
    TipToTip,
    /// The point is the tip of its branch; a geodesic ending there cannot be
    /// extended past it.
    Endpoint { branch: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification<S> {
    /// Every geodesic through the point extends to one whose endpoints are at
    /// distance at least `epsilon` from it.
    Interior { epsilon: S },
    Boundary(BoundaryWitness),
}

/// The geodesic between the tips of branches `m` and `m + 1`.
pub fn tip_to_tip_geodesic<S: StarScalar>(tag: StarMetric, m: u64) -> StarGeodesic<S> {
    let a = StarPoint::tip(m.max(1)).expect("tips lie on the star");
    let b = StarPoint::tip(m.max(1) + 1).expect("tips lie on the star");
    star_geodesic(tag, &a, &b)
}

/// Classifies `p` by the largest `ε` for which every geodesic through it
/// extends to endpoints at distance at least `ε`.
pub fn classify_geodesic_boundary<S: StarScalar>(tag: StarMetric, p: &StarPoint<S>) -> Classification<S> {
    if p.is_tip() {
        return Classification::Boundary(BoundaryWitness::Endpoint { branch: p.branch() });
    }
    let x = p.x().clone();
    match tag {
        StarMetric::D2 if p.is_origin() => Classification::Interior { epsilon: S::one() },
        StarMetric::D2 => Classification::Interior { epsilon: S::one() - x },
        StarMetric::D1 if p.is_origin() => Classification::Boundary(BoundaryWitness::TipToTip),
        StarMetric::D1 => {
            let n = S::from_u64(p.branch());
            let inward = x.clone() / n.clone();
            let outward = (S::one() - x) / n;
            let epsilon = if inward < outward { inward } else { outward };
            Classification::Interior { epsilon }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::star_dist;
    use num_rational::Rational64;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn origin_depends_on_metric() {
        let o = StarPoint::<Rational64>::origin();
        assert_eq!(classify_geodesic_boundary(StarMetric::D1, &o), Classification::Boundary(BoundaryWitness::TipToTip));
        assert_eq!(classify_geodesic_boundary(StarMetric::D2, &o), Classification::Interior { epsilon: r(1, 1) });
    }

    #[test]
    fn interior_points() {
        let p = StarPoint::new(r(1, 2), 3).unwrap();
        assert_eq!(classify_geodesic_boundary(StarMetric::D2, &p), Classification::Interior { epsilon: r(1, 2) });
        assert_eq!(classify_geodesic_boundary(StarMetric::D1, &p), Classification::Interior { epsilon: r(1, 6) });
        let q = StarPoint::new(r(1, 5), 2).unwrap();
        assert_eq!(classify_geodesic_boundary(StarMetric::D1, &q), Classification::Interior { epsilon: r(1, 10) });
    }

    #[test]
    fn tips_are_boundary() {
        let tip = StarPoint::<Rational64>::tip(4).unwrap();
        for tag in [StarMetric::D1, StarMetric::D2] {
            assert_eq!(
                classify_geodesic_boundary(tag, &tip),
                Classification::Boundary(BoundaryWitness::Endpoint { branch: 4 })
            );
        }
    }

    #[test]
    fn tip_to_tip_endpoints_shrink() {
        let o = StarPoint::origin();
        for m in [1u64, 10, 1000] {
            let g = tip_to_tip_geodesic::<Rational64>(StarMetric::D1, m);
            let s = g.breakpoint.unwrap();
            assert!(g.eval(&s).unwrap().is_origin());
            assert_eq!(star_dist(StarMetric::D1, &g.a, &o), r(1, m as i64));
            assert_eq!(star_dist(StarMetric::D1, &g.b, &o), r(1, m as i64 + 1));
        }
    }
}
