use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::profile::Profile;
use super::radial::{s_derivatives, s_derivatives_unit_slope, Parity};

/// Second-order `(1/φ) ∂_x` of an arbitrary field, one-sided at both ends.
pub fn d_ds(field: &[f64], profile: &Profile) -> Result<Vec<f64>> {
    if field.len() != profile.len() {
        return Err(Error::Shape {
            expected: profile.len(),
            got: field.len(),
        });
    }
    let d = profile.grid().dx(field);
    Ok(d.iter().zip(profile.phi()).map(|(d, p)| d / p).collect())
}

/// Cumulative trapezoid `s(x_i) = ∫_0^{x_i} φ dx`.
pub fn arclength(profile: &Profile) -> Vec<f64> {
    let x = profile.grid().nodes();
    let phi = profile.phi();
    let mut s = Vec::with_capacity(x.len());
    s.push(0.0);
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (phi[i] + phi[i - 1]) * (x[i] - x[i - 1]);
        s.push(acc);
    }
    s
}

/// Volume of the unit `S^n` in its round metric.
pub fn unit_sphere_volume(n: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^n| = 2π/(n-1) |S^{n-2}|
    let mut v = if n.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut k = if n.is_multiple_of(2) { 0 } else { 1 };
    while k < n {
        k += 2;
        v *= 2.0 * PI / (k as f64 - 1.0);
    }
    v
}

/// `s`-derivatives of `ψ` plus the regularised limit `lim_{x→0} ψ_ss/ψ = ψ_sss(0)/ψ_s(0)`.
#[derive(Debug, Clone)]
pub struct PsiDerivatives {
    pub psi_s: Vec<f64>,
    pub psi_ss: Vec<f64>,
    pub origin_ratio: f64,
}

pub fn psi_derivatives(profile: &Profile) -> PsiDerivatives {
    let d = s_derivatives(profile, profile.psi(), Parity::Odd);
    PsiDerivatives {
        psi_s: d.ds,
        psi_ss: d.dss,
        origin_ratio: d.origin_ratio,
    }
}

/// [`psi_derivatives`] with the tip condition `ψ_s(0) = 1` built into the
/// stencils instead of extrapolated from the data.
pub fn psi_derivatives_regular(profile: &Profile) -> PsiDerivatives {
    let d = s_derivatives_unit_slope(profile, profile.psi());
    PsiDerivatives {
        psi_s: d.ds,
        psi_ss: d.dss,
        origin_ratio: d.origin_ratio,
    }
}

/// Pointwise geometry of a warped-product profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub n: usize,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub psi_s: Vec<f64>,
    pub psi_ss: Vec<f64>,
    /// Sectional curvature of planes containing the radial direction.
    pub k0: Vec<f64>,
    /// Sectional curvature of planes tangent to the spheres.
    pub k1: Vec<f64>,
    pub r: Vec<f64>,
    /// Mean curvature of the sphere through each node; `+∞` at the origin.
    pub h: Vec<f64>,
    pub v: Vec<f64>,
    /// Ricci coefficient of `ds²`.
    pub rc_radial: Vec<f64>,
    /// Ricci coefficient of `ψ² ĝ`.
    pub rc_sphere: Vec<f64>,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub(crate) fn check_psi_positive(profile: &Profile) -> Result<()> {
    for (i, &p) in profile.psi().iter().enumerate().skip(1) {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::DegenerateMetric {
                node: i,
                message: format!("psi = {p} at an interior node"),
            });
        }
    }
    Ok(())
}

pub fn curvature(profile: &Profile) -> Result<CurvatureField> {
    check_psi_positive(profile)?;
    let n = profile.n();
    let nf = n as f64;
    let psi = profile.psi();
    let d = psi_derivatives(profile);
    let len = profile.len();

    let mut k0 = Vec::with_capacity(len);
    let mut k1 = Vec::with_capacity(len);
    // smoothness forces K0(0) = K1(0) = -ψ_sss(0)
    k0.push(-d.origin_ratio);
    k1.push(-d.origin_ratio);
    for i in 1..len {
        k0.push(-d.psi_ss[i] / psi[i]);
        k1.push((1.0 - d.psi_s[i] * d.psi_s[i]) / (psi[i] * psi[i]));
    }
    let rc_radial: Vec<f64> = k0.iter().map(|k| nf * k).collect();
    let rc_sphere: Vec<f64> = k0.iter().zip(&k1).map(|(a, b)| a + (nf - 1.0) * b).collect();
    let r = rc_radial.iter().zip(&rc_sphere).map(|(a, b)| a + nf * b).collect();

    Ok(CurvatureField {
        n,
        x: profile.grid().nodes().to_vec(),
        s: arclength(profile),
        h: mean_curvature_from(n, psi, &d.psi_s),
        v: sphere_volume(profile),
        psi_s: d.psi_s,
        psi_ss: d.psi_ss,
        k0,
        k1,
        r,
        rc_radial,
        rc_sphere,
    })
}

fn mean_curvature_from(n: usize, psi: &[f64], psi_s: &[f64]) -> Vec<f64> {
    let mut h = Vec::with_capacity(psi.len());
    h.push(f64::INFINITY);
    for i in 1..psi.len() {
        h.push(n as f64 * psi_s[i] / psi[i]);
    }
    h
}

/// `H = n ψ_s/ψ`; the origin entry is a `+∞` sentinel.
pub fn mean_curvature(profile: &Profile) -> Vec<f64> {
    let d = psi_derivatives(profile);
    mean_curvature_from(profile.n(), profile.psi(), &d.psi_s)
}

/// `V = ψ^n |S^n|`.
pub fn sphere_volume(profile: &Profile) -> Vec<f64> {
    let n = profile.n();
    let vn = unit_sphere_volume(n);
    profile.psi().iter().map(|p| vn * p.powi(n as i32)).collect()
}

/// Ricci coefficients of `dx²` and `ĝ` evaluated directly in the `x` coordinate:
///
/// `Rc = -n (ψ_xx - ψ_x φ_x/φ)/ψ dx² + [(n-1) - (φ ψ ψ_xx - ψ ψ_x φ_x + (n-1) φ ψ_x²)/φ³] ĝ`.
///
/// Uses plain central stencils, independent of the parity-aware `s` route in
/// [`curvature`]. The origin entry of the `dx²` coefficient is a limit and is
/// taken from the regularised curvature.
pub fn ricci_xform(profile: &Profile) -> Result<(Vec<f64>, Vec<f64>)> {
    check_psi_positive(profile)?;
    let grid = profile.grid();
    let nf = profile.n() as f64;
    let psi = profile.psi();
    let phi = profile.phi();
    let psi_x = grid.dx(psi);
    let psi_xx = grid.dxx(psi);
    let phi_x = grid.dx(phi);

    let len = profile.len();
    let mut radial = Vec::with_capacity(len);
    let mut sphere = Vec::with_capacity(len);
    let origin = psi_derivatives(profile).origin_ratio;
    radial.push(-nf * origin * phi[0] * phi[0]);
    sphere.push(0.0);
    for i in 1..len {
        let (p, f, px, pxx, fx) = (psi[i], phi[i], psi_x[i], psi_xx[i], phi_x[i]);
        radial.push(-nf * (pxx - px * fx / f) / p);
        sphere.push((nf - 1.0) - (f * p * pxx - p * px * fx + (nf - 1.0) * f * px * px) / (f * f * f));
    }
    Ok((radial, sphere))
}

/// Brown–York mass `m = (H₀(s) - H) V` of the geodesic spheres, with
/// `H₀(s) = n coth(s)` the reference mean curvature in hyperbolic space at the
/// same arclength radius. Only defined for `n = 2`.
pub fn brown_york_mass(profile: &Profile) -> Result<Vec<f64>> {
    if profile.n() != 2 {
        return Err(Error::UnsupportedDimension(profile.n()));
    }
    let field = curvature(profile)?;
    Ok(brown_york_from_field(&field))
}

pub(crate) fn reference_mean_curvature(n: usize, s: f64) -> f64 {
    n as f64 / s.tanh()
}

pub(crate) fn brown_york_from_field(field: &CurvatureField) -> Vec<f64> {
    let mut m = Vec::with_capacity(field.len());
    // (H₀ - H) ~ O(s), V ~ O(s²)
    m.push(0.0);
    for i in 1..field.len() {
        m.push((reference_mean_curvature(field.n, field.s[i]) - field.h[i]) * field.v[i]);
    }
    m
}
