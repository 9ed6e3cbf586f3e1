use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::CurvatureField;

/// Outcome of one check. `Boundary` marks a margin within roundoff of zero,
/// as happens for open conditions evaluated on the flat metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Boundary,
    Fail,
}

impl Verdict {
    /// Signed margin against a tolerance band around zero.
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        if !margin.is_finite() {
            Verdict::Fail
        } else if margin.abs() <= tol {
            Verdict::Boundary
        } else if margin > 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn ok(self) -> bool {
        self != Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub verdict: Verdict,
    /// Signed distance to violation; positive passes.
    pub margin: f64,
    pub worst_node: Option<usize>,
    /// Whether the record counts towards a run's overall verdict.
    pub gating: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, verdict: Verdict, margin: f64, worst_node: Option<usize>) -> Self {
        CheckRecord {
            name: name.into(),
            pass: verdict.ok(),
            verdict,
            margin,
            worst_node,
            gating: true,
            note: None,
        }
    }

    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Boundary band as a multiple of machine epsilon.
pub const BOUNDARY_EPS_FACTOR: f64 = 10.0;

fn interior(field: &CurvatureField) -> std::ops::Range<usize> {
    1..field.len() - 1
}

/// `(min value, node)` of `f` over interior nodes.
fn min_over(field: &CurvatureField, f: impl Fn(usize) -> f64) -> (f64, usize) {
    interior(field).fold((f64::INFINITY, 0), |acc, i| {
        let v = f(i);
        if v < acc.0 || v.is_nan() {
            (v, i)
        } else {
            acc
        }
    })
}

/// Smallest local spacing in arclength, which sets how much roundoff the
/// difference stencils amplify.
fn min_ds(field: &CurvatureField) -> f64 {
    field.s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// `ψ_s > 1` at interior nodes; margin `min ψ_s - 1`.
pub fn check_psi_monotone(field: &CurvatureField) -> CheckRecord {
    let (v, node) = min_over(field, |i| field.psi_s[i]);
    let scale = field.s.iter().cloned().fold(0.0, f64::max) / min_ds(field);
    let tol = BOUNDARY_EPS_FACTOR * f64::EPSILON * scale;
    CheckRecord::new("psi_monotone", Verdict::from_margin(v - 1.0, tol), v - 1.0, Some(node))
}

/// `ψ_ss > 0` at interior nodes; margin `min ψ_ss`.
pub fn check_psi_convex(field: &CurvatureField) -> CheckRecord {
    let (v, node) = min_over(field, |i| field.psi_ss[i]);
    // ψ_ss carries roundoff of order ε ψ/Δs²
    let scale = field.s.iter().cloned().fold(0.0, f64::max) / min_ds(field).powi(2);
    let tol = BOUNDARY_EPS_FACTOR * f64::EPSILON * scale;
    CheckRecord::new("psi_convex", Verdict::from_margin(v, tol), v, Some(node))
}

/// `K₀ < 0` and `K₁ < 0` at interior nodes; margin `-max(K₀, K₁)`.
pub fn check_negative_curvature(field: &CurvatureField) -> CheckRecord {
    let (v, node) = min_over(field, |i| -field.k0[i].max(field.k1[i]));
    let scale = field.s.iter().cloned().fold(0.0, f64::max) / min_ds(field).powi(3);
    let tol = BOUNDARY_EPS_FACTOR * f64::EPSILON * scale;
    CheckRecord::new("negative_curvature", Verdict::from_margin(v, tol), v, Some(node))
}

/// Which dimension enters the comparison ODE `Ṙ ≥ (2/d) R²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionConstant {
    /// `d = n`, the sphere dimension.
    SphereN,
    /// `d = n + 1`, the manifold dimension.
    CorrectedNPlus1,
}

impl DimensionConstant {
    pub fn d(self, n: usize) -> f64 {
        match self {
            DimensionConstant::SphereN => n as f64,
            DimensionConstant::CorrectedNPlus1 => n as f64 + 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DimensionConstant::SphereN => "sphere_n",
            DimensionConstant::CorrectedNPlus1 => "corrected_n_plus_1",
        }
    }
}

/// Relative slack allowed below the scalar bound for discretisation error.
pub const SCALAR_BOUND_SLACK: f64 = 1e-3;

/// Lower bound `-1/(2t/d - 1/R0)` from the comparison ODE `Ṙ = (2/d) R²`.
pub fn scalar_lower_bound(t: f64, r0_inf: f64, d: f64) -> f64 {
    -1.0 / (2.0 * t / d - 1.0 / r0_inf)
}

/// `min R(t) >= -1/(2t/d - 1/R0_inf)` over nodes `0..M`. The margin is
/// `min R - bound`; violations within [`SCALAR_BOUND_SLACK`]`·|bound|` count
/// as boundary cases, since the self-similar family meets the bound with equality.
pub fn check_scalar_bound(
    field: &CurvatureField,
    t: f64,
    r0_inf: f64,
    constant: DimensionConstant,
) -> Result<CheckRecord> {
    if !(r0_inf < 0.0) {
        return Err(Error::Contract(format!(
            "scalar bound needs negative initial infimum, got R0_inf = {r0_inf}"
        )));
    }
    let bound = scalar_lower_bound(t, r0_inf, constant.d(field.n));
    let (rmin, node) = (0..field.len() - 1).fold((f64::INFINITY, 0), |acc, i| {
        if field.r[i] < acc.0 {
            (field.r[i], i)
        } else {
            acc
        }
    });
    let margin = rmin - bound;
    let verdict = Verdict::from_margin(margin, SCALAR_BOUND_SLACK * bound.abs());
    Ok(CheckRecord::new(
        format!("scalar_bound_{}", constant.label()),
        verdict,
        margin,
        Some(node),
    )
    .with_note(format!(
        "bound {bound:.6e}, relative margin {:.3e}",
        margin / bound.abs()
    )))
}

/// Infimum of `R` over nodes `0..M`.
pub fn scalar_infimum(field: &CurvatureField) -> f64 {
    field.r[..field.len() - 1].iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `a = ψ²(K₁ - K₀)` per node.
pub fn pinching_quantity(field: &CurvatureField, psi: &[f64]) -> Vec<f64> {
    (0..field.len())
        .map(|i| psi[i] * psi[i] * (field.k1[i] - field.k0[i]))
        .collect()
}

/// `(sup |a|, node)` over interior nodes. The outer node is left out: its
/// one-sided stencil error is amplified by `ψ²`.
pub fn pinching_sup(field: &CurvatureField, psi: &[f64]) -> (f64, usize) {
    let a = pinching_quantity(field, psi);
    interior(field).fold(
        (0.0f64, 0),
        |acc, i| if !(a[i].abs() <= acc.0) { (a[i].abs(), i) } else { acc },
    )
}

/// Records `sup |a|`; fails only if `a` is not finite.
pub fn check_pinching(field: &CurvatureField, psi: &[f64]) -> CheckRecord {
    let (sup, node) = pinching_sup(field, psi);
    let verdict = if sup.is_finite() { Verdict::Pass } else { Verdict::Fail };
    CheckRecord::new("pinching", verdict, sup, Some(node)).with_note("margin holds sup|a|; observation only")
}
