use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::Preset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBc {
    /// Pin the outer node to the self-similar hyperbolic solution.
    DirichletExactHyperbolic,
    /// Evolve the outer node with the curvatures of its inner neighbour.
    ExtrapolateZeroCurvatureGradient,
}

impl OuterBc {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dirichlet_exact_hyperbolic" => Ok(OuterBc::DirichletExactHyperbolic),
            "extrapolate_zero_curvature_gradient" => Ok(OuterBc::ExtrapolateZeroCurvatureGradient),
            other => Err(Error::config(
                "outer_bc",
                format!("unknown boundary condition `{other}`"),
            )),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OuterBc::DirichletExactHyperbolic => "dirichlet_exact_hyperbolic",
            OuterBc::ExtrapolateZeroCurvatureGradient => "extrapolate_zero_curvature_gradient",
        }
    }
}

impl fmt::Display for OuterBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_CFL: f64 = 0.2;
pub const MAX_CFL: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "M")]
    pub intervals: usize,
    pub stretch: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub outer_bc: OuterBc,
    pub preset: Preset,
    pub modified: bool,
    pub record_every: usize,
    pub out_dir: PathBuf,
}

impl FlowConfig {
    pub fn new(preset: Preset) -> Self {
        FlowConfig {
            n: 2,
            length: 6.0,
            intervals: 512,
            stretch: 0.0,
            cfl: DEFAULT_CFL,
            t_end: 1.0,
            outer_bc: OuterBc::DirichletExactHyperbolic,
            preset,
            modified: false,
            record_every: 100,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(
                "n",
                format!("sphere dimension must be >= 2, got {}", self.n),
            ));
        }
        if !(self.cfl > 0.0 && self.cfl <= MAX_CFL) {
            return Err(Error::config(
                "cfl",
                format!("must satisfy 0 < cfl <= {MAX_CFL}, got {}", self.cfl),
            ));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::config(
                "t_end",
                format!("must be finite and positive, got {}", self.t_end),
            ));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::config(
                "L",
                format!("must be finite and positive, got {}", self.length),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every", "must be at least 1"));
        }
        if !(self.stretch >= 0.0) || !self.stretch.is_finite() {
            return Err(Error::config(
                "stretch",
                format!("must be finite and >= 0, got {}", self.stretch),
            ));
        }
        self.preset.validate()
    }
}
