//! Parity-aware differentiation for fields on a rotationally symmetric grid.
//!
//! Smooth radial fields extend across the origin either as even functions
//! (`φ`, `ψ_s`, curvatures) or odd ones (`ψ`, `ψ_ss`). Even fields use the
//! mirrored ghost value `f(-x_1) = f(x_1)`. Odd fields are written as
//! `f = x·u` with `u` even and differentiated through the product rule, so that
//! truncation errors vanish at the same rate as `f` itself near `x = 0`. Plain
//! central stencils on `f` leave an `O(Δx²)` error in `f_x` at the first node,
//! which `(1 - ψ_s²)/ψ²` turns into an `O(1)` curvature error.

use super::grid::Grid;
use super::profile::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// First and second `x`-derivatives of a field of known parity.
#[derive(Debug, Clone)]
pub struct XDerivatives {
    pub dx: Vec<f64>,
    pub dxx: Vec<f64>,
    /// Odd fields: `lim_{x→0} f/x`. Even fields: `f(0)`.
    pub origin_value: f64,
    /// Odd fields: `lim_{x→0} f_xx/x`. Even fields: `f_xx(0)`.
    pub origin_curvature: f64,
}

fn even_origin_dxx(x: &[f64], f: &[f64]) -> f64 {
    2.0 * (f[1] - f[0]) / (x[1] * x[1])
}

fn even_derivatives(grid: &Grid, f: &[f64]) -> XDerivatives {
    let x = grid.nodes();
    let mut dx = Vec::with_capacity(f.len());
    let mut dxx = Vec::with_capacity(f.len());
    dx.push(0.0);
    let f0xx = even_origin_dxx(x, f);
    dxx.push(f0xx);
    for i in 1..f.len() {
        dx.push(grid.d1_stencil(i).apply(f));
        dxx.push(grid.d2_stencil(i).apply(f));
    }
    XDerivatives {
        dx,
        dxx,
        origin_value: f[0],
        origin_curvature: f0xx,
    }
}

/// `u = f/x` for an odd field, with `u(0)` from the even quadratic through nodes 1 and 2.
pub(crate) fn odd_quotient(x: &[f64], f: &[f64]) -> Vec<f64> {
    let mut u = Vec::with_capacity(f.len());
    u.push(0.0);
    for i in 1..f.len() {
        u.push(f[i] / x[i]);
    }
    let (x1s, x2s) = (x[1] * x[1], x[2] * x[2]);
    u[0] = (x2s * u[1] - x1s * u[2]) / (x2s - x1s);
    u
}

fn odd_derivatives(grid: &Grid, f: &[f64], slope: Option<f64>) -> XDerivatives {
    let x = grid.nodes();
    let mut u = odd_quotient(x, f);
    if let Some(slope) = slope {
        u[0] = slope;
    }
    let du = even_derivatives(grid, &u);
    let mut dx = Vec::with_capacity(f.len());
    let mut dxx = Vec::with_capacity(f.len());
    for i in 0..f.len() {
        dx.push(u[i] + x[i] * du.dx[i]);
        dxx.push(2.0 * du.dx[i] + x[i] * du.dxx[i]);
    }
    XDerivatives {
        dx,
        dxx,
        origin_value: u[0],
        // f_xx/x = 2 u_x/x + u_xx → 3 u_xx(0)
        origin_curvature: 3.0 * du.origin_curvature,
    }
}

pub fn x_derivatives(grid: &Grid, f: &[f64], parity: Parity) -> XDerivatives {
    match parity {
        Parity::Even => even_derivatives(grid, f),
        Parity::Odd => odd_derivatives(grid, f, None),
    }
}

/// Derivatives of an odd field whose slope `f_x(0)` is known rather than
/// extrapolated from the first nodes.
pub fn odd_x_derivatives_with_slope(grid: &Grid, f: &[f64], slope: f64) -> XDerivatives {
    odd_derivatives(grid, f, Some(slope))
}

/// Arclength derivatives `f_s = f_x/φ` and `f_ss = f_xx/φ² - f_x φ_x/φ³`.
#[derive(Debug, Clone)]
pub struct SDerivatives {
    pub ds: Vec<f64>,
    pub dss: Vec<f64>,
    /// Odd fields: `lim f_ss/f` at the origin (finite for smooth data).
    /// Even fields: `f_ss(0)`.
    pub origin_ratio: f64,
}

/// Parity-aware `∂_s` and `∂_s²` of `f` on the profile's metric.
pub fn s_derivatives(profile: &Profile, f: &[f64], parity: Parity) -> SDerivatives {
    s_derivatives_from(profile, x_derivatives(profile.grid(), f, parity), parity)
}

/// Like [`s_derivatives`] for an odd field with `f_s(0) = 1` imposed, as
/// smoothness of the metric requires of `ψ`.
pub fn s_derivatives_unit_slope(profile: &Profile, f: &[f64]) -> SDerivatives {
    let fd = odd_x_derivatives_with_slope(profile.grid(), f, profile.phi()[0]);
    s_derivatives_from(profile, fd, Parity::Odd)
}

fn s_derivatives_from(profile: &Profile, fd: XDerivatives, parity: Parity) -> SDerivatives {
    let grid = profile.grid();
    let phi = profile.phi();
    let f_len = fd.dx.len();
    let pd = x_derivatives(grid, phi, Parity::Even);
    let mut ds = Vec::with_capacity(f_len);
    let mut dss = Vec::with_capacity(f_len);
    for i in 0..f_len {
        let p = phi[i];
        ds.push(fd.dx[i] / p);
        dss.push(fd.dxx[i] / (p * p) - fd.dx[i] * pd.dx[i] / (p * p * p));
    }
    let p0 = phi[0];
    let origin_ratio = match parity {
        Parity::Odd => {
            (fd.origin_curvature / (p0 * p0) - fd.origin_value * pd.origin_curvature / (p0 * p0 * p0)) / fd.origin_value
        }
        Parity::Even => dss[0],
    };
    SDerivatives { ds, dss, origin_ratio }
}

/// Parity-aware first arclength derivative only.
pub fn ds_parity(profile: &Profile, f: &[f64], parity: Parity) -> Vec<f64> {
    let fd = x_derivatives(profile.grid(), f, parity);
    fd.dx.iter().zip(profile.phi()).map(|(d, p)| d / p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::build_grid;

    fn max_err(a: &[f64], b: impl Fn(usize) -> f64, from: usize) -> f64 {
        (from..a.len()).map(|i| (a[i] - b(i)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn odd_derivatives_second_order_uniformly_to_origin() {
        let mut errs = Vec::new();
        for m in [64usize, 128, 256] {
            let g = build_grid(3.0, m, 0.0).unwrap();
            let x = g.nodes().to_vec();
            let f: Vec<f64> = x.iter().map(|x| x.sinh()).collect();
            let d = x_derivatives(&g, &f, Parity::Odd);
            // error in f_x relative to f near the origin must stay O(h²)
            let e1 = (1..=4)
                .map(|i| ((d.dx[i] - x[i].cosh()) / f[i] * x[i]).abs())
                .fold(0.0, f64::max);
            errs.push(e1.max(max_err(&d.dxx, |i| x[i].sinh(), 0) / 10.0));
            assert!((d.origin_value - 1.0).abs() < 1e-6);
            assert!((d.origin_curvature - 1.0).abs() < 1e-2, "{}", d.origin_curvature);
        }
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
    }

    #[test]
    fn even_field_ghost_symmetry() {
        let g = build_grid(2.0, 32, 0.0).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|x| x.cosh()).collect();
        let d = x_derivatives(&g, &f, Parity::Even);
        assert_eq!(d.dx[0], 0.0);
        assert!((d.dxx[0] - 1.0).abs() < 1e-3);
    }
}
