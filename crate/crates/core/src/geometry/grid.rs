use std::sync::Arc;

use crate::error::{Error, Result};

/// Default bound on `max(dx) / min(dx)`.
pub const DEFAULT_MAX_SPACING_RATIO: f64 = 10.0;
pub const MIN_INTERVALS: usize = 8;

/// A finite-difference stencil over the contiguous node range `start..start + len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Stencil {
    pub start: usize,
    pub len: usize,
    pub w: [f64; 4],
}

impl Stencil {
    fn new(grid: &[f64], at: usize, start: usize, len: usize, order: usize) -> Self {
        let weights = fornberg(grid[at], &grid[start..start + len], order);
        let mut w = [0.0; 4];
        for (j, row) in weights.iter().enumerate() {
            w[j] = row[order];
        }
        Stencil { start, len, w }
    }

    #[inline]
    pub fn apply(&self, f: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.len {
            acc += self.w[j] * f[self.start + j];
        }
        acc
    }
}

/// Finite-difference weights for derivatives `0..=m` at `z` on arbitrary nodes
/// (Fornberg's recursion). Returns `c[j][k]`: weight of node `j` for order `k`.
pub fn fornberg(z: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Debug)]
struct GridInner {
    nodes: Vec<f64>,
    d1: Vec<Stencil>,
    d2: Vec<Stencil>,
}

/// Spatial nodes `0 = x_0 < x_1 < ... < x_M = L` with precomputed
/// second-order stencils. Cloning is cheap; clones share the node storage.
#[derive(Debug, Clone)]
pub struct Grid(Arc<GridInner>);

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.nodes == other.0.nodes
    }
}

impl Grid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        Self::with_spacing_bound(nodes, DEFAULT_MAX_SPACING_RATIO)
    }

    pub fn with_spacing_bound(nodes: Vec<f64>, max_ratio: f64) -> Result<Self> {
        if nodes.len() < MIN_INTERVALS + 1 {
            return Err(Error::config(
                "M",
                format!(
                    "need at least {} intervals, got {}",
                    MIN_INTERVALS,
                    nodes.len().saturating_sub(1)
                ),
            ));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("nodes", "non-finite node coordinate"));
        }
        if nodes[0] != 0.0 {
            return Err(Error::config(
                "nodes",
                format!("first node must be 0, got {}", nodes[0]),
            ));
        }
        let mut hmin = f64::INFINITY;
        let mut hmax: f64 = 0.0;
        for (i, w) in nodes.windows(2).enumerate() {
            let h = w[1] - w[0];
            if h <= 0.0 {
                return Err(Error::config(
                    "nodes",
                    format!("nodes must be strictly increasing (at index {})", i + 1),
                ));
            }
            hmin = hmin.min(h);
            hmax = hmax.max(h);
        }
        if hmax / hmin > max_ratio {
            return Err(Error::config(
                "stretch",
                format!("spacing ratio {:.3} exceeds bound {}", hmax / hmin, max_ratio),
            ));
        }

        let m = nodes.len() - 1;
        let mut d1 = Vec::with_capacity(m + 1);
        let mut d2 = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let (s1, s2) = if i == 0 {
                (Stencil::new(&nodes, 0, 0, 3, 1), Stencil::new(&nodes, 0, 0, 4, 2))
            } else if i == m {
                (
                    Stencil::new(&nodes, m, m - 2, 3, 1),
                    Stencil::new(&nodes, m, m - 3, 4, 2),
                )
            } else {
                (
                    Stencil::new(&nodes, i, i - 1, 3, 1),
                    Stencil::new(&nodes, i, i - 1, 3, 2),
                )
            };
            d1.push(s1);
            d2.push(s2);
        }
        Ok(Grid(Arc::new(GridInner { nodes, d1, d2 })))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.0.nodes
    }

    pub fn len(&self) -> usize {
        self.0.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nodes.is_empty()
    }

    /// Number of intervals.
    pub fn m(&self) -> usize {
        self.0.nodes.len() - 1
    }

    pub fn length(&self) -> f64 {
        self.0.nodes[self.m()]
    }

    pub fn spacing_ratio(&self) -> f64 {
        let (lo, hi) = self
            .0
            .nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), h| (lo.min(h), hi.max(h)));
        hi / lo
    }

    pub(crate) fn d1_stencil(&self, i: usize) -> &Stencil {
        &self.0.d1[i]
    }

    pub(crate) fn d2_stencil(&self, i: usize) -> &Stencil {
        &self.0.d2[i]
    }

    /// Plain second-order `d/dx`: central inside, one-sided at both ends.
    pub fn dx(&self, f: &[f64]) -> Vec<f64> {
        self.0.d1.iter().map(|s| s.apply(f)).collect()
    }

    /// Plain second-order `d²/dx²`: compact central inside, four-point one-sided at the ends.
    pub fn dxx(&self, f: &[f64]) -> Vec<f64> {
        self.0.d2.iter().map(|s| s.apply(f)).collect()
    }

    /// First-order forward differences (backward at the last node). Only used as
    /// a deliberately degraded scheme for negative-control refinement studies.
    pub fn dx_first_order(&self, f: &[f64]) -> Vec<f64> {
        let x = self.nodes();
        let m = self.m();
        (0..=m)
            .map(|i| {
                if i < m {
                    (f[i + 1] - f[i]) / (x[i + 1] - x[i])
                } else {
                    (f[m] - f[m - 1]) / (x[m] - x[m - 1])
                }
            })
            .collect()
    }
}

/// Builds `M + 1` nodes on `[0, L]`. `stretch = 0` is uniform; `stretch > 0`
/// clusters nodes geometrically toward the origin, `x_i = L (e^{σ i/M} - 1)/(e^σ - 1)`.
pub fn build_grid(length: f64, intervals: usize, stretch: f64) -> Result<Grid> {
    if !length.is_finite() || length <= 0.0 {
        return Err(Error::config("L", format!("must be finite and positive, got {length}")));
    }
    if intervals < MIN_INTERVALS {
        return Err(Error::config(
            "M",
            format!("must be at least {MIN_INTERVALS}, got {intervals}"),
        ));
    }
    if !stretch.is_finite() || stretch < 0.0 {
        return Err(Error::config(
            "stretch",
            format!("must be finite and >= 0, got {stretch}"),
        ));
    }
    let m = intervals as f64;
    let mut nodes: Vec<f64> = if stretch == 0.0 {
        (0..=intervals).map(|i| length * i as f64 / m).collect()
    } else {
        let denom = stretch.exp_m1();
        (0..=intervals)
            .map(|i| length * (stretch * i as f64 / m).exp_m1() / denom)
            .collect()
    };
    nodes[intervals] = length;
    Grid::from_nodes(nodes)
}
