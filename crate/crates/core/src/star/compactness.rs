use super::point::star_dist;
use super::{StarError, StarMetric, StarPoint, StarScalar};

/// Branch index `n_p` of the `p`-th term (`p ≥ 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchPattern {
    Constant(u64),
    /// `n_p = cycle[(p − 1) mod len]`.
    Cycle(Vec<u64>),
    /// `n_p = slope · p + offset`, with `slope ≥ 1`.
    Linear { slope: u64, offset: u64 },
}

impl BranchPattern {
    pub fn branch(&self, p: u64) -> u64 {
        match self {
            Self::Constant(n) => *n,
            Self::Cycle(list) => list[((p - 1) % list.len() as u64) as usize],
            Self::Linear { slope, offset } => slope * p + offset,
        }
    }

    fn validate(&self) -> Result<(), StarError> {
        let ok = match self {
            Self::Constant(n) => *n >= 1,
            Self::Cycle(list) => !list.is_empty() && list.iter().all(|&n| n >= 1),
            Self::Linear { slope, .. } => *slope >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(StarError::InvalidSequence(format!("bad branch pattern {self:?}")))
        }
    }
}

/// Coordinate `x_p = constant + harmonic / p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinatePattern<S> {
    pub constant: S,
    pub harmonic: S,
}

impl<S: StarScalar> CoordinatePattern<S> {
    pub fn coordinate(&self, p: u64) -> S {
        self.constant.clone() + self.harmonic.clone() / S::from_u64(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec<S> {
    pub branch: BranchPattern,
    pub coordinate: CoordinatePattern<S>,
}

impl<S: StarScalar> SequenceSpec<S> {
    pub fn term(&self, p: u64) -> Result<StarPoint<S>, StarError> {
        StarPoint::new(self.coordinate.coordinate(p), self.branch.branch(p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompactnessOutcome<S> {
    /// Indices of a subsequence converging to `limit`, with the distance of
    /// its last listed term to the limit.
    Convergent { subsequence: Vec<u64>, limit: StarPoint<S>, tail_distance: S },
    /// Every two distinct terms with index `≥ 2` are at least `separation`
    /// apart, so no subsequence is Cauchy. `observed_min` is the smallest
    /// pairwise distance among the sampled terms.
    NonCompact { separation: S, observed_min: S, sampled: u64 },
    Undecided { reason: String },
}

/// Terms compared pairwise when reporting the observed separation.
const PAIRWISE_SAMPLE: u64 = 200;

/// Decides whether the sequence admits a convergent subsequence, checking the
/// first `horizon` terms lie on the star.
pub fn compactness_witness<S: StarScalar>(
    tag: StarMetric,
    spec: &SequenceSpec<S>,
    horizon: u64,
) -> Result<CompactnessOutcome<S>, StarError> {
    spec.branch.validate()?;
    if horizon < 2 {
        return Ok(CompactnessOutcome::Undecided { reason: "horizon shorter than two terms".into() });
    }
    for p in 1..=horizon {
        spec.term(p)?;
    }
    let alpha = spec.coordinate.constant.clone();
    let beta = spec.coordinate.harmonic.clone();

    let convergent = |limit: StarPoint<S>, indices: Vec<u64>| -> Result<CompactnessOutcome<S>, StarError> {
        let last = *indices.last().expect("non-empty subsequence");
        let tail_distance = star_dist(tag, &spec.term(last)?, &limit);
        Ok(CompactnessOutcome::Convergent { subsequence: indices, limit, tail_distance })
    };

    match (&spec.branch, tag) {
        (BranchPattern::Constant(n), _) => convergent(StarPoint::new(alpha.clone(), *n)?, (1..=horizon).collect()),
        (BranchPattern::Cycle(list), _) => {
            let n = list[0];
            let indices: Vec<u64> = (1..=horizon).filter(|&p| spec.branch.branch(p) == n).collect();
            if indices.len() < 2 {
                return Ok(CompactnessOutcome::Undecided {
                    reason: format!("fewer than two terms on branch {n} within the horizon"),
                });
            }
            convergent(StarPoint::new(alpha.clone(), n)?, indices)
        }
        // Distance to the origin is x_p / n_p <= 1 / n_p.
        (BranchPattern::Linear { .. }, StarMetric::D1) => convergent(StarPoint::origin(), (1..=horizon).collect()),
        (BranchPattern::Linear { .. }, StarMetric::D2) if alpha.is_zero() => {
            convergent(StarPoint::origin(), (1..=horizon).collect())
        }
        (BranchPattern::Linear { .. }, StarMetric::D2) => {
            // Distinct indices give distinct branches, so d2 = x_p + x_q.
            let two = S::one() + S::one();
            let second = alpha.clone() + beta / two.clone();
            let inf = if second < alpha { second } else { alpha };
            let separation = two * inf;
            let sampled = horizon.min(PAIRWISE_SAMPLE);
            let terms: Vec<StarPoint<S>> = (2..=sampled).map(|p| spec.term(p)).collect::<Result<_, _>>()?;
            let mut observed_min: Option<S> = None;
            for (i, a) in terms.iter().enumerate() {
                for b in &terms[i + 1..] {
                    let d = star_dist(tag, a, b);
                    if observed_min.as_ref().is_none_or(|m| d < *m) {
                        observed_min = Some(d);
                    }
                }
            }
            let Some(observed_min) = observed_min else {
                return Ok(CompactnessOutcome::Undecided { reason: "horizon too short to sample pairs".into() });
            };
            if separation > S::zero() {
                Ok(CompactnessOutcome::NonCompact { separation, observed_min, sampled: sampled - 1 })
            } else {
                Ok(CompactnessOutcome::Undecided { reason: "tail separation is not bounded below".into() })
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

    fn linear_half() -> SequenceSpec<Rational64> {
        SequenceSpec {
            branch: BranchPattern::Linear { slope: 1, offset: 0 },
            coordinate: CoordinatePattern { constant: r(1, 2), harmonic: r(0, 1) },
        }
    }

    #[test]
    fn spread_branches_are_separated_under_d2() {
        match compactness_witness(StarMetric::D2, &linear_half(), 50).unwrap() {
            CompactnessOutcome::NonCompact { separation, observed_min, .. } => {
                assert_eq!(separation, r(1, 1));
                assert_eq!(observed_min, r(1, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spread_branches_collapse_under_d1() {
        match compactness_witness(StarMetric::D1, &linear_half(), 50).unwrap() {
            CompactnessOutcome::Convergent { limit, tail_distance, subsequence } => {
                assert!(limit.is_origin());
                assert_eq!(subsequence.len(), 50);
                assert_eq!(tail_distance, r(1, 100));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cycle_picks_a_branch() {
        let spec = SequenceSpec {
            branch: BranchPattern::Cycle(vec![2, 5]),
            coordinate: CoordinatePattern { constant: r(1, 2), harmonic: r(1, 4) },
        };
        match compactness_witness(StarMetric::D2, &spec, 10).unwrap() {
            CompactnessOutcome::Convergent { subsequence, limit, tail_distance } => {
                assert_eq!(subsequence, vec![1, 3, 5, 7, 9]);
                assert_eq!(limit, StarPoint::new(r(1, 2), 2).unwrap());
                assert_eq!(tail_distance, r(1, 36));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vanishing_coordinate_converges_under_d2() {
        let spec = SequenceSpec {
            branch: BranchPattern::Linear { slope: 2, offset: 1 },
            coordinate: CoordinatePattern { constant: r(0, 1), harmonic: r(1, 1) },
        };
        assert!(matches!(
            compactness_witness(StarMetric::D2, &spec, 20).unwrap(),
            CompactnessOutcome::Convergent { .. }
        ));
    }

    #[test]
    fn terms_off_the_star_are_rejected() {
        let spec = SequenceSpec {
            branch: BranchPattern::Constant(1),
            coordinate: CoordinatePattern { constant: r(1, 1), harmonic: r(1, 1) },
        };
        assert!(compactness_witness(StarMetric::D1, &spec, 5).is_err());
        let empty = SequenceSpec {
            branch: BranchPattern::Cycle(vec![]),
            coordinate: CoordinatePattern { constant: r(1, 2), harmonic: r(0, 1) },
        };
        assert!(compactness_witness(StarMetric::D1, &empty, 5).is_err());
    }

    #[test]
    fn short_horizon_is_undecided() {
        assert!(matches!(
            compactness_witness(StarMetric::D2, &linear_half(), 1).unwrap(),
            CompactnessOutcome::Undecided { .. }
        ));
    }
}
