//! Experiment configuration: a single versioned TOML file drives every
//! subcommand. Validation collects every violated field before reporting.

use crate::error::{Error, Result};
use crate::geometry::{Alpha1Spec, HoleShape, SpdMatrix2};
use crate::perturbed::{AnnulusConfig, RadialBenchmark, RadialGaussian};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const SCHEMA_TAG: &str = "pointhole/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: String,
    pub operator: OperatorBlock,
    pub geometry: GeometryBlock,
    pub robin: RobinBlock,
    #[serde(default)]
    pub spectral: SpectralBlock,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub benchmark: BenchmarkBlock,
    #[serde(default)]
    pub fem: FemBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorBlock {
    pub c1: f64,
    /// row-major entries [a11, a12, a22]
    pub a: [f64; 3],
    #[serde(default)]
    pub a0: A0Spec,
    /// form-coercivity surrogate for the admissibility inequality;
    /// defaults to the smallest eigenvalue of A
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum A0Spec {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
}

impl A0Spec {
    pub fn eval(&self, _x: [f64; 2]) -> f64 {
        match self {
            A0Spec::Zero => 0.0,
            A0Spec::Constant { value } => *value,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryBlock {
    pub domain: DomainSpec,
    pub hole: HoleSpec,
    #[serde(default)]
    pub x0: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Plane,
    Disc { radius: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HoleSpec {
    Disc { radius: f64 },
    Ellipse { p: f64, q: f64 },
    /// closed polyline, counterclockwise
    Points { points: Vec<[f64; 2]> },
}

impl HoleSpec {
    pub fn build(&self) -> Result<HoleShape> {
        match self {
            HoleSpec::Disc { radius } => HoleShape::disc(*radius),
            HoleSpec::Ellipse { p, q } => HoleShape::ellipse(*p, *q),
            HoleSpec::Points { points } => HoleShape::from_points(points),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobinBlock {
    pub alpha1: Alpha1Spec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralBlock {
    /// resolvent spectral parameter (below the spectrum)
    pub lambda: f64,
    /// eigenvalue search window
    pub window: WindowSpec,
}

impl Default for SpectralBlock {
    fn default() -> Self {
        SpectralBlock { lambda: -4.0, window: WindowSpec { lo: -30.0, hi: 30.0 } }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindowSpec {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepBlock {
    /// eps = 10^{-eps_start_exp} .. 10^{-eps_end_exp}, one point per decade
    pub eps_start_exp: u32,
    pub eps_end_exp: u32,
    /// fixed eps for single-instance perturbed commands
    pub eps_single: f64,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock { eps_start_exp: 2, eps_end_exp: 12, eps_single: 1e-4 }
    }
}

impl SweepBlock {
    pub fn grid(&self) -> Vec<f64> {
        crate::harness::decade_grid(self.eps_start_exp, self.eps_end_exp)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BenchmarkBlock {
    pub v0: RadialGaussian,
}

impl Default for BenchmarkBlock {
    fn default() -> Self {
        BenchmarkBlock { v0: RadialGaussian { amp: 1.0, width: 1.0 } }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FemBlock {
    pub rings: usize,
    pub angular_cap: usize,
    /// angular resolution of annulus meshes for the FEM cross-checks
    pub n_theta: usize,
}

impl Default for FemBlock {
    fn default() -> Self {
        FemBlock { rings: 48, angular_cap: 512, n_theta: 128 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct OutputBlock {
    /// subdirectory for artifacts (joined under --out)
    #[serde(default)]
    pub prefix: String,
    #[serde(default)]
    pub plots: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| Error::Config(vec![format!("TOML parse error: {e}")]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization")
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.schema != SCHEMA_TAG {
            bad.push(format!(
                "schema: expected \"{SCHEMA_TAG}\", got \"{}\"",
                self.schema
            ));
        }
        if !(self.operator.c1 > 0.0) {
            bad.push(format!("operator.c1: must be > 0, got {}", self.operator.c1));
        }
        let [a11, a12, a22] = self.operator.a;
        if SpdMatrix2::new(a11, a12, a22).is_err() {
            bad.push(format!(
                "operator.a: [{a11}, {a12}, {a22}] is not symmetric positive definite"
            ));
        }
        match &self.geometry.domain {
            DomainSpec::Disc { radius } if !(radius > &0.0) => {
                bad.push(format!("geometry.domain.radius: must be > 0, got {radius}"));
            }
            _ => {}
        }
        match &self.geometry.hole {
            HoleSpec::Disc { radius } if !(radius > &0.0) => {
                bad.push(format!("geometry.hole.radius: must be > 0, got {radius}"));
            }
            HoleSpec::Ellipse { p, q } if !(p > &0.0 && q > &0.0) => {
                bad.push(format!("geometry.hole: ellipse semi-axes must be > 0, got ({p}, {q})"));
            }
            HoleSpec::Points { points } if points.len() < 8 => {
                bad.push(format!(
                    "geometry.hole.points: need at least 8 points, got {}",
                    points.len()
                ));
            }
            _ => {}
        }
        if self.sweep.eps_start_exp >= self.sweep.eps_end_exp {
            bad.push(format!(
                "sweep: eps_start_exp ({}) must be < eps_end_exp ({}); the grid would be empty or trivial",
                self.sweep.eps_start_exp, self.sweep.eps_end_exp
            ));
        }
        if !(self.sweep.eps_single > 0.0 && self.sweep.eps_single < 1.0) {
            bad.push(format!(
                "sweep.eps_single: must be in (0, 1), got {}",
                self.sweep.eps_single
            ));
        }
        if !(self.spectral.window.lo < self.spectral.window.hi) {
            bad.push(format!(
                "spectral.window: lo ({}) must be < hi ({})",
                self.spectral.window.lo, self.spectral.window.hi
            ));
        }
        if let Some(c2) = self.operator.c2 {
            if !(c2 > 0.0) {
                bad.push(format!("operator.c2: must be > 0 when given, got {c2}"));
            }
        }
        if !(self.benchmark.v0.width > 0.0) {
            bad.push(format!(
                "benchmark.v0.width: must be > 0, got {}",
                self.benchmark.v0.width
            ));
        }
        if self.fem.rings < 2 {
            bad.push(format!("fem.rings: must be >= 2, got {}", self.fem.rings));
        }
        if self.fem.n_theta < 64 {
            bad.push(format!("fem.n_theta: must be >= 64, got {}", self.fem.n_theta));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    pub fn matrix(&self) -> SpdMatrix2 {
        let [a11, a12, a22] = self.operator.a;
        SpdMatrix2::new(a11, a12, a22).expect("validated")
    }

    pub fn shape(&self) -> Result<Arc<HoleShape>> {
        Ok(Arc::new(self.geometry.hole.build()?))
    }

    /// Constant alpha1 value when the profile is constant (benchmark paths).
    pub fn alpha1_constant(&self) -> Result<f64> {
        match &self.robin.alpha1 {
            Alpha1Spec::Constant { value } => Ok(*value),
            other => Err(Error::domain(format!(
                "this command needs a constant alpha1 profile, got {other:?}"
            ))),
        }
    }

    pub fn radial_benchmark(&self) -> Result<RadialBenchmark> {
        let b = match &self.geometry.hole {
            HoleSpec::Disc { radius } => *radius,
            other => {
                return Err(Error::domain(format!(
                    "the radial benchmark needs a disc hole, got {other:?}"
                )))
            }
        };
        Ok(RadialBenchmark {
            b,
            alpha1: self.alpha1_constant()?,
            lambda: self.spectral.lambda,
            v0: self.benchmark.v0,
        })
    }

    pub fn annulus_config(&self) -> Result<AnnulusConfig> {
        let b = match &self.geometry.hole {
            HoleSpec::Disc { radius } => *radius,
            other => {
                return Err(Error::domain(format!(
                    "the annulus path needs a disc hole, got {other:?}"
                )))
            }
        };
        let r_outer = match &self.geometry.domain {
            DomainSpec::Disc { radius } => *radius,
            DomainSpec::Plane => {
                return Err(Error::domain(
                    "the annulus path needs a disc domain".to_string(),
                ))
            }
        };
        Ok(AnnulusConfig { b, r_outer, alpha1: self.alpha1_constant()? })
    }
}

/// The default benchmark configuration (plane, disc hole b = 0.5, alpha1 = 1,
/// lambda = -4).
pub fn default_benchmark_config() -> ExperimentConfig {
    ExperimentConfig {
        schema: SCHEMA_TAG.to_string(),
        operator: OperatorBlock { c1: 1.0, a: [1.0, 0.0, 1.0], a0: A0Spec::Zero, c2: None },
        geometry: GeometryBlock {
            domain: DomainSpec::Plane,
            hole: HoleSpec::Disc { radius: 0.5 },
            x0: [0.0, 0.0],
        },
        robin: RobinBlock { alpha1: Alpha1Spec::Constant { value: 1.0 } },
        spectral: SpectralBlock::default(),
        sweep: SweepBlock::default(),
        benchmark: BenchmarkBlock::default(),
        fem: FemBlock::default(),
        output: OutputBlock::default(),
    }
}
