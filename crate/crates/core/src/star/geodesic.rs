use super::point::{dist_to_origin, star_dist};
use super::{StarError, StarMetric, StarPoint, StarScalar};

/// The geodesic from `a` to `b`; through the origin when the branches differ.
#[derive(Debug, Clone, PartialEq)]
pub struct StarGeodesic<S> {
    pub a: StarPoint<S>,
    pub b: StarPoint<S>,
    pub tag: StarMetric,
    pub length: S,
    /// Parameter `s* = d(a, 0) / d(a, b)` at which the path passes the origin.
    pub breakpoint: Option<S>,
}

pub fn star_geodesic<S: StarScalar>(tag: StarMetric, a: &StarPoint<S>, b: &StarPoint<S>) -> StarGeodesic<S> {
    let length = star_dist(tag, a, b);
    let breakpoint = if a.branch() == b.branch() {
        None
    } else {
        Some(dist_to_origin(tag, a) / length.clone())
    };
    StarGeodesic { a: a.clone(), b: b.clone(), tag, length, breakpoint }
}

impl<S: StarScalar> StarGeodesic<S> {
    /// Converts a distance from the origin along `branch` back to a coordinate.
    fn on_branch(&self, distance: S, branch: u64) -> Result<StarPoint<S>, StarError> {
        let x = match self.tag {
            StarMetric::D1 => distance * S::from_u64(branch),
            StarMetric::D2 => distance,
        };
        StarPoint::new(x, branch)
    }

    /// `γ(t)` for `t ∈ [0, 1]`.
    pub fn eval(&self, t: &S) -> Result<StarPoint<S>, StarError> {
        if !(*t >= S::zero() && *t <= S::one()) {
            return Err(StarError::InvalidParameter(t.to_string()));
        }
        match &self.breakpoint {
            None => {
                let x = (S::one() - t.clone()) * self.a.x().clone() + t.clone() * self.b.x().clone();
                StarPoint::new(x, self.a.branch())
            }
            Some(s) => {
                let from_a = dist_to_origin(self.tag, &self.a);
                let travelled = t.clone() * self.length.clone();
                if t <= s {
                    self.on_branch(from_a - travelled, self.a.branch())
                } else {
                    self.on_branch(travelled - from_a, self.b.branch())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn sp(x: Rational64, n: u64) -> StarPoint<Rational64> {
        StarPoint::new(x, n).unwrap()
    }

    #[test]
    fn same_branch_midpoint() {
        for tag in [StarMetric::D1, StarMetric::D2] {
            let g = star_geodesic(tag, &sp(r(1, 5), 3), &sp(r(4, 5), 3));
            assert_eq!(g.eval(&r(1, 2)).unwrap(), sp(r(1, 2), 3));
            assert_eq!(g.breakpoint, None);
        }
    }

    #[test]
    fn d2_crossing() {
        let g = star_geodesic(StarMetric::D2, &sp(r(1, 2), 1), &sp(r(1, 2), 2));
        assert_eq!(g.breakpoint, Some(r(1, 2)));
        assert_eq!(g.eval(&r(1, 4)).unwrap(), sp(r(1, 4), 1));
        assert_eq!(g.eval(&r(1, 2)).unwrap(), StarPoint::origin());
        assert_eq!(g.eval(&r(3, 4)).unwrap(), sp(r(1, 4), 2));
    }

    #[test]
    fn d1_crossing() {
        let g = star_geodesic(StarMetric::D1, &sp(r(1, 1), 1), &sp(r(1, 1), 2));
        assert_eq!(g.length, r(3, 2));
        assert_eq!(g.breakpoint, Some(r(2, 3)));
        assert_eq!(g.eval(&r(1, 3)).unwrap(), sp(r(1, 2), 1));
        assert_eq!(g.eval(&r(1, 1)).unwrap(), sp(r(1, 1), 2));
    }

    #[test]
    fn from_origin_to_other_branch() {
        let g = star_geodesic(StarMetric::D1, &StarPoint::origin(), &sp(r(1, 1), 4));
        assert_eq!(g.breakpoint, Some(r(0, 1)));
        assert_eq!(g.eval(&r(1, 2)).unwrap(), sp(r(1, 2), 4));
    }

    #[test]
    fn parameter_outside_unit_interval() {
        let g = star_geodesic(StarMetric::D2, &sp(r(1, 2), 1), &sp(r(1, 2), 2));
        assert!(g.eval(&r(5, 4)).is_err());
    }
}
