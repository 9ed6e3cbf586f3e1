use crate::error::{Error, Result};

use super::grid::Grid;
use super::radial::{x_derivatives, Parity};

/// The metric `φ² dx² + ψ² ĝ` sampled on a grid, with `ĝ` the round `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    phi: Vec<f64>,
    psi: Vec<f64>,
    n: usize,
}

impl Profile {
    /// Validates `ψ(0) = 0`, `ψ > 0` away from the origin, `φ > 0` everywhere and `n ≥ 2`.
    pub fn new(grid: Grid, phi: Vec<f64>, psi: Vec<f64>, n: usize) -> Result<Self> {
        let profile = Profile { grid, phi, psi, n };
        profile.validate()?;
        Ok(profile)
    }

    /// Skips validation, for exercising the degenerate-metric paths.
    #[cfg(test)]
    pub(crate) fn new_unchecked(grid: Grid, phi: Vec<f64>, psi: Vec<f64>, n: usize) -> Self {
        Profile { grid, phi, psi, n }
    }

    /// Samples `φ(x)` and `ψ(x)` on the grid; `ψ(0)` is pinned to zero.
    pub fn from_fn(grid: Grid, n: usize, phi: impl Fn(f64) -> f64, psi: impl Fn(f64) -> f64) -> Result<Self> {
        let phis = grid.nodes().iter().map(|&x| phi(x)).collect();
        let mut psis: Vec<f64> = grid.nodes().iter().map(|&x| psi(x)).collect();
        psis[0] = 0.0;
        Profile::new(grid, phis, psis, n)
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.grid.len();
        if self.n < 2 {
            return Err(Error::config(
                "n",
                format!("sphere dimension must be >= 2, got {}", self.n),
            ));
        }
        for v in [&self.phi, &self.psi] {
            if v.len() != len {
                return Err(Error::Shape {
                    expected: len,
                    got: v.len(),
                });
            }
        }
        if self.psi[0] != 0.0 {
            return Err(Error::DegenerateMetric {
                node: 0,
                message: format!("psi(0) must be exactly 0, got {}", self.psi[0]),
            });
        }
        for i in 0..len {
            if !self.phi[i].is_finite() || self.phi[i] <= 0.0 {
                return Err(Error::DegenerateMetric {
                    node: i,
                    message: format!("phi must be positive, got {}", self.phi[i]),
                });
            }
            if i > 0 && (!self.psi[i].is_finite() || self.psi[i] <= 0.0) {
                return Err(Error::DegenerateMetric {
                    node: i,
                    message: format!("psi must be positive for x > 0, got {}", self.psi[i]),
                });
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub(crate) fn fields_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.phi, &mut self.psi)
    }

    /// Metric scaled by `λ²`: both `φ` and `ψ` pick up a factor `λ`.
    pub fn scaled(&self, lambda_sq: f64) -> Profile {
        let l = lambda_sq.sqrt();
        Profile {
            grid: self.grid.clone(),
            phi: self.phi.iter().map(|p| p * l).collect(),
            psi: self.psi.iter().map(|p| p * l).collect(),
            n: self.n,
        }
    }

    /// Discrete `ψ_s(0)`, which smoothness pins to 1.
    pub fn origin_slope(&self) -> f64 {
        x_derivatives(&self.grid, &self.psi, Parity::Odd).origin_value / self.phi[0]
    }
}
