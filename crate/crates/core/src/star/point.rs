use std::fmt;
use std::str::FromStr;

use super::{StarError, StarScalar};

/// The two metrics on the star.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StarMetric {
    /// `|x − y| / m` on a common branch `m`, `x/m + y/n` across branches.
    D1,
    /// `|x − y|` on a common branch, `x + y` across branches.
    D2,
}

impl fmt::Display for StarMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::D1 => "d1",
            Self::D2 => "d2",
        })
    }
}

impl FromStr for StarMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "d1" | "dist1" => Ok(Self::D1),
            "d2" | "dist2" => Ok(Self::D2),
            other => Err(format!("unknown star metric `{other}` (expected d1 or d2)")),
        }
    }
}

/// `(x, n)` with `x ∈ [0, 1]`, `n ≥ 1`; every origin is stored as `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StarPoint<S> {
    x: S,
    branch: u64,
}

impl<S: StarScalar> StarPoint<S> {
    pub fn new(x: S, branch: u64) -> Result<Self, StarError> {
        if branch == 0 {
            return Err(StarError::InvalidPoint("branches are numbered from 1".into()));
        }
        if !(x >= S::zero() && x <= S::one()) {
            return Err(StarError::InvalidPoint(format!("coordinate {x} outside [0, 1]")));
        }
        let branch = if x.is_zero() { 1 } else { branch };
        Ok(Self { x, branch })
    }

    pub fn origin() -> Self {
        Self { x: S::zero(), branch: 1 }
    }

    /// The tip `(1, n)` of branch `n`.
    pub fn tip(branch: u64) -> Result<Self, StarError> {
        Self::new(S::one(), branch)
    }

    pub fn x(&self) -> &S {
        &self.x
    }

    pub fn branch(&self) -> u64 {
        self.branch
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_tip(&self) -> bool {
        self.x.is_one()
    }
}

impl<S: StarScalar> fmt::Display for StarPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.branch)
    }
}

/// Weight of branch `n` under `tag`: `1/n` for `d1`, `1` for `d2`.
pub(crate) fn branch_weight<S: StarScalar>(tag: StarMetric, branch: u64) -> S {
    match tag {
        StarMetric::D1 => S::one() / S::from_u64(branch),
        StarMetric::D2 => S::one(),
    }
}

pub(crate) fn dist_to_origin<S: StarScalar>(tag: StarMetric, p: &StarPoint<S>) -> S {
    p.x.clone() * branch_weight(tag, p.branch)
}

pub fn star_dist<S: StarScalar>(tag: StarMetric, a: &StarPoint<S>, b: &StarPoint<S>) -> S {
    if a.branch == b.branch {
        (a.x.clone() - b.x.clone()).abs() * branch_weight(tag, a.branch)
    } else {
        dist_to_origin(tag, a) + dist_to_origin(tag, b)
    }
}
