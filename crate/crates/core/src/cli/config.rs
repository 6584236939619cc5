//! TOML experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::barycenter::SimplexSpec;
use crate::lemma::{InversionSettings, PolarGrid};
use crate::manifold::{ChartSpec, MetricField, Point, SolverSettings};
use crate::star::{StarFunction, StarMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    Euclidean,
    SphereChart,
    HyperbolicBall,
    ConformalTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricSection {
    pub kind: MetricName,
    pub dim: usize,
    /// Exponent coefficients `a_i` of the conformal test metric.
    pub coefficients: Option<Vec<f64>>,
    /// Wraps the metric as `g_h` when set.
    pub scale: Option<f64>,
}

impl Default for MetricSection {
    fn default() -> Self {
        Self { kind: MetricName::ConformalTest, dim: 2, coefficients: None, scale: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChartSection {
    pub radius: f64,
    pub center: Option<Vec<f64>>,
}

impl Default for ChartSection {
    fn default() -> Self {
        Self { radius: 0.6, center: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub bvp_tolerance: f64,
    pub ode_steps: usize,
    pub fd_step: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::<f64>::default();
        Self { bvp_tolerance: s.bvp_tolerance, ode_steps: s.ode_steps, fd_step: s.fd_step }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimplexSection {
    /// Explicit vertices; a regular simplex of `circumradius` otherwise.
    pub points: Option<Vec<Vec<f64>>>,
    pub circumradius: f64,
}

impl Default for SimplexSection {
    fn default() -> Self {
        Self { points: None, circumradius: 0.5 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeodesicSection {
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BarycenterSection {
    pub t: Option<Vec<f64>>,
    pub h: f64,
}

impl Default for BarycenterSection {
    fn default() -> Self {
        Self { t: None, h: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HullSection {
    pub resolution: usize,
    pub h: f64,
}

impl Default for HullSection {
    fn default() -> Self {
        Self { resolution: 8, h: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JacobianSection {
    pub count: usize,
    pub dims: Vec<usize>,
    /// Vertices are drawn from the ball of this radius.
    pub radius: f64,
    pub tolerance: f64,
}

impl Default for JacobianSection {
    fn default() -> Self {
        Self { count: 20, dims: vec![1, 2, 3], radius: 0.5, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaSection {
    pub h: f64,
    /// Fixed sweep radius; bisection up to `eta_max` when absent.
    pub eta: Option<f64>,
    pub eta_max: f64,
    pub bisection_steps: usize,
    pub angular: usize,
    pub radial: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LemmaSection {
    fn default() -> Self {
        let inv = InversionSettings::<f64>::default();
        Self {
            h: 0.25,
            eta: None,
            eta_max: 0.4,
            bisection_steps: 8,
            angular: 16,
            radial: 8,
            tolerance: inv.tolerance,
            max_iterations: inv.max_iterations,
        }
    }
}

/// Objective functions selectable from the config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `|x|²` in chart coordinates.
    #[default]
    SqNorm,
    NegSqNorm,
    Linear { a: Vec<f64> },
    Constant { c: f64 },
    /// Squared geodesic distance to `anchor` (chart center by default).
    SqDist { anchor: Option<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundSection {
    pub function: FunctionSpec,
    pub h: Option<f64>,
    /// Targets fill `B(0, h·eta)`.
    pub eta: f64,
}

impl Default for BoundSection {
    fn default() -> Self {
        Self { function: FunctionSpec::SqNorm, h: None, eta: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvexitySection {
    pub function: FunctionSpec,
    pub n_pairs: usize,
    pub n_t: usize,
    pub tolerance: f64,
    /// The run passes when the verdict matches this expectation.
    pub expect_convex: bool,
}

impl Default for ConvexitySection {
    fn default() -> Self {
        Self {
            function: FunctionSpec::SqNorm,
            n_pairs: 500,
            n_t: 20,
            tolerance: crate::lemma::CONVEXITY_TOLERANCE,
            expect_convex: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LipschitzSection {
    pub function: FunctionSpec,
    pub center: Option<Vec<f64>>,
    pub radius: f64,
    pub n_pairs: usize,
}

impl Default for LipschitzSection {
    fn default() -> Self {
        Self { function: FunctionSpec::SqNorm, center: None, radius: 0.5, n_pairs: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StarDemo {
    Witness,
    Classify,
    Compactness,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StarSection {
    pub demo: StarDemo,
    /// `f` or `g`.
    pub function: String,
    /// `d1` or `d2`.
    pub metric: String,
    pub max_p: u64,
    /// Points `[numer, denom, branch]` to classify, in addition to the origin.
    pub points: Vec<[i64; 3]>,
    /// Compactness sequence: `x_p = constant + harmonic / p` on branch `slope·p + offset`
    /// (`slope = 0` keeps the branch fixed at `offset`).
    pub constant: [i64; 2],
    pub harmonic: [i64; 2],
    pub slope: u64,
    pub offset: u64,
    pub horizon: u64,
}

impl Default for StarSection {
    fn default() -> Self {
        Self {
            demo: StarDemo::All,
            function: "f".into(),
            metric: "d1".into(),
            max_p: 20,
            points: vec![[1, 2, 3]],
            constant: [1, 2],
            harmonic: [0, 1],
            slope: 1,
            offset: 0,
            horizon: 50,
        }
    }
}

impl StarSection {
    pub fn function(&self) -> Result<StarFunction, CliError> {
        self.function.parse().map_err(CliError::Config)
    }

    pub fn metric(&self) -> Result<StarMetric, CliError> {
        self.metric.parse().map_err(CliError::Config)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub metric: MetricSection,
    pub chart: ChartSection,
    pub solver: SolverSection,
    pub simplex: SimplexSection,
    pub geodesic: GeodesicSection,
    pub barycenter: BarycenterSection,
    pub hull: HullSection,
    pub jacobian: JacobianSection,
    pub lemma: LemmaSection,
    pub bound: BoundSection,
    pub convexity: ConvexitySection,
    pub lipschitz: LipschitzSection,
    pub star: StarSection,
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {value}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let d = self.metric.dim;
        if d == 0 {
            return Err(CliError::Config("metric.dim must be at least 1".into()));
        }
        positive("chart.radius", self.chart.radius)?;
        positive("solver.bvp_tolerance", self.solver.bvp_tolerance)?;
        positive("solver.fd_step", self.solver.fd_step)?;
        positive("lemma.tolerance", self.lemma.tolerance)?;
        positive("lemma.eta_max", self.lemma.eta_max)?;
        positive("jacobian.tolerance", self.jacobian.tolerance)?;
        positive("jacobian.radius", self.jacobian.radius)?;
        positive("convexity.tolerance", self.convexity.tolerance)?;
        positive("simplex.circumradius", self.simplex.circumradius)?;
        positive("lipschitz.radius", self.lipschitz.radius)?;
        positive("bound.eta", self.bound.eta)?;
        if let Some(eta) = self.lemma.eta {
            positive("lemma.eta", eta)?;
        }
        if self.solver.ode_steps == 0 {
            return Err(CliError::Config("solver.ode_steps must be positive".into()));
        }
        let check = |name: &str, v: &[f64]| -> Result<(), CliError> {
            if v.len() != d {
                return Err(CliError::Config(format!("{name} has {} coordinates, metric.dim is {d}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config(format!("{name} has non-finite coordinates")));
            }
            Ok(())
        };
        if let Some(c) = &self.metric.coefficients {
            check("metric.coefficients", c)?;
        }
        if let Some(c) = &self.chart.center {
            check("chart.center", c)?;
        }
        if let Some(points) = &self.simplex.points {
            for p in points {
                check("simplex.points", p)?;
            }
        }
        for (name, v) in [("geodesic.p", &self.geodesic.p), ("geodesic.q", &self.geodesic.q), ("lipschitz.center", &self.lipschitz.center)] {
            if let Some(v) = v {
                check(name, v)?;
            }
        }
        for f in [&self.bound.function, &self.convexity.function, &self.lipschitz.function] {
            match f {
                FunctionSpec::Linear { a } => check("function.a", a)?,
                FunctionSpec::SqDist { anchor: Some(a) } => check("function.anchor", a)?,
                _ => {}
            }
        }
        if let Some(h) = self.metric.scale {
            if !(h.abs() <= 1.0) {
                return Err(CliError::Config(format!("metric.scale must lie in [-1, 1], got {h}")));
            }
        }
        self.star.function()?;
        self.star.metric()?;
        Ok(())
    }

    pub fn metric_field(&self) -> Result<MetricField<f64>, CliError> {
        let d = self.metric.dim;
        let base = match self.metric.kind {
            MetricName::Euclidean => MetricField::euclidean(d),
            MetricName::SphereChart => MetricField::sphere_chart(d),
            MetricName::HyperbolicBall => MetricField::hyperbolic_ball(d),
            MetricName::ConformalTest => match &self.metric.coefficients {
                Some(c) => MetricField::conformal_with_coefficients(c.clone()),
                None => MetricField::conformal_test(d),
            },
        };
        match self.metric.scale {
            Some(h) => base.scaled(h).map_err(|e| CliError::Config(e.to_string())),
            None => Ok(base),
        }
    }

    pub fn chart(&self) -> Result<ChartSpec<f64>, CliError> {
        let settings = SolverSettings {
            bvp_tolerance: self.solver.bvp_tolerance,
            ode_steps: self.solver.ode_steps,
            fd_step: self.solver.fd_step,
            ..SolverSettings::default()
        };
        let center = match &self.chart.center {
            Some(c) => Point::from_f64(c),
            None => Point::origin(self.metric.dim),
        };
        ChartSpec::with_settings(center, self.chart.radius, self.metric_field()?, settings)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn simplex(&self) -> Result<SimplexSpec<f64>, CliError> {
        let chart = self.chart()?;
        let spec = match &self.simplex.points {
            Some(points) => SimplexSpec::new(points.iter().map(|p| Point::from_f64(p)).collect(), chart),
            None => SimplexSpec::regular(chart, self.simplex.circumradius),
        };
        spec.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn inversion_settings(&self) -> InversionSettings<f64> {
        InversionSettings {
            tolerance: self.lemma.tolerance,
            max_iterations: self.lemma.max_iterations,
            fd_step: self.solver.fd_step,
            ..InversionSettings::default()
        }
    }

    pub fn grid(&self) -> PolarGrid {
        PolarGrid::new(self.lemma.angular, self.lemma.radial)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_valid() {
        let c = ExperimentConfig::from_toml("").unwrap();
        c.validate().unwrap();
        assert_eq!(c.metric.kind, MetricName::ConformalTest);
        assert_eq!(c.solver.ode_steps, 100);
        assert_eq!(c.lemma.angular, 16);
    }

    #[test]
    fn sections_parse() {
        let c = ExperimentConfig::from_toml(
            r#"
seed = 7
[metric]
kind = "sphere-chart"
dim = 2
[chart]
radius = 0.7
[geodesic]
p = [0.1, 0.0]
q = [0.0, 0.3]
[convexity]
function = { kind = "linear", a = [1.0, 2.0] }
"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.metric_field().unwrap().kind_tag(), "sphere-chart");
        assert_eq!(c.convexity.function, FunctionSpec::Linear { a: vec![1.0, 2.0] });
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "[metric]\nkind = \"flat\"",
            "[solver]\nbvp_tolerance = 0.0",
            "[metric]\ndim = 2\n[geodesic]\np = [0.0]",
            "[chart]\nradius = -1.0",
            "[unknown]\nx = 1",
            "[star]\nmetric = \"d3\"",
        ] {
            let parsed = ExperimentConfig::from_toml(text).and_then(|c| c.validate());
            assert!(matches!(parsed, Err(CliError::Config(_))), "{text}");
        }
    }
}
