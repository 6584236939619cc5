use std::fmt;
use std::str::FromStr;

use super::point::star_dist;
use super::{StarMetric, StarPoint, StarScalar};

/// `f((x, n)) = x` and `g((x, n)) = n x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarFunction {
    F,
    G,
}

impl StarFunction {
    pub fn value<S: StarScalar>(self, p: &StarPoint<S>) -> S {
        match self {
            Self::F => p.x().clone(),
            Self::G => S::from_u64(p.branch()) * p.x().clone(),
        }
    }
}

impl fmt::Display for StarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::F => "f",
            Self::G => "g",
        })
    }
}

impl FromStr for StarFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f" => Ok(Self::F),
            "g" => Ok(Self::G),
            other => Err(format!("unknown star function `{other}` (expected f or g)")),
        }
    }
}

/// One term of a discontinuity witness sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRow<S> {
    pub p: u64,
    pub point: StarPoint<S>,
    pub distance_to_origin: S,
    /// `|value(point) − value(0)|`.
    pub gap: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoWitnessReason {
    /// `f` is continuous for `d2`.
    Continuous,
    /// No witness sequence is constructed for `g` under `d1`.
    NotConstructed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessOutcome<S> {
    Witness(Vec<WitnessRow<S>>),
    NoWitness(NoWitnessReason),
}

/// Sequences approaching the origin on which the function stays at distance 1
/// from its value at the origin: `(1, p)` for `(f, d1)` and `(1/p, p)` for `(g, d2)`.
pub fn discontinuity_witness<S: StarScalar>(
    kind: StarFunction,
    tag: StarMetric,
    indices: impl IntoIterator<Item = u64>,
) -> WitnessOutcome<S> {
    let term = |p: u64| -> StarPoint<S> {
        let x = match kind {
            StarFunction::F => S::one(),
            StarFunction::G => S::one() / S::from_u64(p),
        };
        StarPoint::new(x, p).expect("witness terms lie on the star")
    };
    match (kind, tag) {
        (StarFunction::F, StarMetric::D1) | (StarFunction::G, StarMetric::D2) => {
            let origin = StarPoint::origin();
            let at_origin = kind.value(&origin);
            let rows = indices
                .into_iter()
                .filter(|&p| p >= 1)
                .map(|p| {
                    let point = term(p);
                    let distance_to_origin = star_dist(tag, &point, &origin);
                    let gap = (kind.value(&point) - at_origin.clone()).abs();
                    WitnessRow { p, point, distance_to_origin, gap }
                })
                .collect();
            WitnessOutcome::Witness(rows)
        }
        (StarFunction::F, StarMetric::D2) => WitnessOutcome::NoWitness(NoWitnessReason::Continuous),
        (StarFunction::G, StarMetric::D1) => WitnessOutcome::NoWitness(NoWitnessReason::NotConstructed),
    }
}
