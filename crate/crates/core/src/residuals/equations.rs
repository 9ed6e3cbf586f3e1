use std::fmt;

use serde::Serialize;

use crate::geometry::unit_sphere_volume;

use super::fields::{Fields, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `[∂_t, ∂_s] f = n K₀ f_s` applied to `ψ`.
    Commutator,
    /// `∂_t s = n ∫₀^s ψ_ss/ψ`.
    Arclength,
    /// Evolution of the sphere volume `V = |S^n| ψ^n`.
    Volume,
    /// `(∂_t - Δ) ψ = K₁ ψ - n/ψ`.
    PsiHeat,
    /// Evolution of `ψ_s`.
    PsiS,
    /// Evolution of `w = ψ_ss`.
    W,
    /// Evolution of `K = -K₀`.
    K,
    /// Evolution of the mean curvature `H`.
    H,
    /// Evolution of the pinching quantity `a = ψ²(K₁ - K₀)`.
    Pinching,
    /// Evolution of `u = ψ^k`, on the region `ψ < 1`.
    PowerOfPsi,
    /// `(K₀)_s = -ψ_sss/ψ - K₀ ψ_s/ψ`.
    K0s,
    /// `(K₁)_s` in terms of `K₁ - K₀`.
    K1s,
}

impl Equation {
    pub const ALL: [Equation; 12] = [
        Equation::Commutator,
        Equation::Arclength,
        Equation::Volume,
        Equation::PsiHeat,
        Equation::PsiS,
        Equation::W,
        Equation::K,
        Equation::H,
        Equation::Pinching,
        Equation::PowerOfPsi,
        Equation::K0s,
        Equation::K1s,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Equation::Commutator => "commutator",
            Equation::Arclength => "arclength",
            Equation::Volume => "volume",
            Equation::PsiHeat => "psi_heat",
            Equation::PsiS => "psi_s",
            Equation::W => "w",
            Equation::K => "K",
            Equation::H => "H",
            Equation::Pinching => "pinching",
            Equation::PowerOfPsi => "power_of_psi",
            Equation::K0s => "K0_s",
            Equation::K1s => "K1_s",
        }
    }

    /// Purely spatial identities need no time differencing.
    pub fn is_spatial(self) -> bool {
        matches!(self, Equation::K0s | Equation::K1s)
    }
}

/// Which statement of an equation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// The identity exactly as first written down, before re-derivation.
    Printed,
    /// The printed Laplacian restatement.
    PrintedLaplacian,
    /// The printed special case for `n = 2`.
    PrintedN2,
    /// Re-derived from the base flow system.
    Derived,
    /// A deliberately first-order discretisation of a correct identity.
    FirstOrderControl,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Printed => "printed",
            Form::PrintedLaplacian => "printed_laplacian",
            Form::PrintedN2 => "printed_n2",
            Form::Derived => "derived",
            Form::FirstOrderControl => "first_order_control",
        }
    }
}

/// One evaluable identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSpec {
    pub equation: Equation,
    pub form: Form,
    /// Verdict of the symbolic substitution oracle: whether this statement is
    /// an identity of the flow, so that its residual should vanish under refinement.
    pub oracle_holds: bool,
    /// Nodes excluded at each end of the grid.
    pub mask_width: usize,
    /// Nodes with `x` below this are excluded as well.
    pub origin_band: f64,
}

/// Composed `d/ds` stencils reach four deep for the fourth-derivative
/// identities, so four boundary nodes carry one-sided stencil error.
pub const DEFAULT_MASK_WIDTH: usize = 4;
/// Coefficients such as `1/ψ²` turn an `O(Δx²)` error at node `i` into
/// `O(1/i²)`; excluding a fixed interval restores second-order decay.
pub const DEFAULT_ORIGIN_BAND: f64 = 0.5;
/// Power `k` in `u = ψ^k`.
pub const DEFAULT_POWER: i32 = 2;

impl ResidualSpec {
    pub fn new(equation: Equation, form: Form, oracle_holds: bool) -> Self {
        // the ψ^k identity has no singular coefficients and lives on ψ < 1
        let origin_band = if equation == Equation::PowerOfPsi {
            0.0
        } else {
            DEFAULT_ORIGIN_BAND
        };
        ResidualSpec {
            equation,
            form,
            oracle_holds,
            mask_width: DEFAULT_MASK_WIDTH,
            origin_band,
        }
    }

    /// Per-node factor applied to every term before measuring. The pinching
    /// quantity is a cancellation of two terms of size `ψ²|K|`, so its
    /// identity is measured in curvature units, divided by `ψ²`.
    pub fn weight(&self, f: &Fields, i: usize) -> f64 {
        match self.equation {
            Equation::Pinching => 1.0 / (f.psi[i] * f.psi[i]),
            _ => 1.0,
        }
    }

    pub fn key(&self) -> String {
        format!("{}[{}]", self.equation.name(), self.form.name())
    }

    /// Nodes the residual is measured on.
    pub fn mask(&self, f: &Fields) -> Vec<usize> {
        let m = f.len() - 1;
        (self.mask_width..=m.saturating_sub(self.mask_width))
            .filter(|&i| f.profile.grid().nodes()[i] >= self.origin_band)
            .filter(|&i| self.equation != Equation::PowerOfPsi || f.psi[i] < 1.0)
            .collect()
    }
}

impl fmt::Display for ResidualSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Every evaluated statement for sphere dimension `n`, with the oracle verdicts.
pub fn catalog(n: usize) -> Vec<ResidualSpec> {
    use Equation::*;
    use Form::*;
    let mut specs = vec![
        ResidualSpec::new(Commutator, Printed, true),
        ResidualSpec::new(Arclength, Derived, true),
        ResidualSpec::new(Volume, Printed, false),
        ResidualSpec::new(Volume, Derived, true),
        ResidualSpec::new(PsiHeat, Printed, true),
        ResidualSpec::new(PsiS, Printed, true),
        ResidualSpec::new(PsiS, PrintedLaplacian, true),
        ResidualSpec::new(W, Printed, false),
        ResidualSpec::new(W, Derived, true),
        ResidualSpec::new(K, Printed, false),
        ResidualSpec::new(K, PrintedLaplacian, false),
        ResidualSpec::new(K, Derived, true),
        ResidualSpec::new(H, Printed, false),
        ResidualSpec::new(H, Derived, true),
        ResidualSpec::new(Pinching, Printed, true),
        ResidualSpec::new(Pinching, PrintedLaplacian, true),
        ResidualSpec::new(PowerOfPsi, Printed, false),
        ResidualSpec::new(PowerOfPsi, Derived, true),
        ResidualSpec::new(K0s, Printed, true),
        ResidualSpec::new(K1s, Printed, false),
        ResidualSpec::new(K1s, Derived, true),
    ];
    if n == 2 {
        specs.insert(4, ResidualSpec::new(Volume, PrintedN2, false));
    }
    specs
}

/// The heat identity for `ψ` with first-order one-sided stencils: a correct
/// statement discretised badly, whose refinement order should come out near one.
pub fn negative_control() -> ResidualSpec {
    ResidualSpec::new(Equation::PsiHeat, Form::FirstOrderControl, true)
}

/// Summands of `LHS - RHS` at every node.
pub type Terms = Vec<Vec<f64>>;

fn pointwise(len: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..len).map(f).collect()
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Terms of spatial identities, evaluated at a single state.
pub fn spatial_terms(spec: &ResidualSpec, c: &Fields) -> Terms {
    let len = c.len();
    match (spec.equation, spec.form) {
        (Equation::K0s, _) => vec![
            c.k0_s.clone(),
            pointwise(len, |i| ratio(c.psi_sss[i], c.psi[i])),
            pointwise(len, |i| c.k0[i] * ratio(c.psi_s[i], c.psi[i])),
        ],
        (Equation::K1s, form) => {
            let factor = if form == Form::Derived { 2.0 } else { 1.0 };
            vec![
                c.k1_s.clone(),
                pointwise(len, |i| factor * ratio(c.psi_s[i], c.psi[i]) * (c.k1[i] - c.k0[i])),
            ]
        }
        _ => unreachable!("{spec} is not a spatial identity"),
    }
}

/// Terms of time-dependent identities at the middle state of a window.
pub fn window_terms(spec: &ResidualSpec, w: &Window, power: i32) -> Terms {
    let c = &w.cur;
    let len = c.len();
    let n = c.n as f64;
    let vn = unit_sphere_volume(c.n);
    let q = |i: usize| ratio(c.psi_s[i], c.psi[i]);
    let neg = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| -x).collect() };
    match (spec.equation, spec.form) {
        (Equation::Commutator, _) => {
            let psi_t = w.dt(|f| &f.psi, |f| &f.psi_s);
            vec![
                w.dt(|f| &f.psi_s, |f| &f.psi_ss),
                neg(&c.ds(&psi_t)),
                pointwise(len, |i| -n * c.k0[i] * c.psi_s[i]),
            ]
        }
        (Equation::Arclength, _) => vec![w.dt_arclength(), neg(&c.arclength_rate)],
        (Equation::Volume, form) => {
            let zeroth = match form {
                Form::Printed => pointwise(len, |i| (n - 1.0) * vn.powf(2.0 / n) * c.v[i].powf((n - 2.0) / n)),
                Form::PrintedN2 => vec![vn; len],
                _ => pointwise(len, |i| n * (n - 1.0) * vn * c.psi[i].powi(c.n as i32 - 2)),
            };
            vec![w.dt(|f| &f.v, |f| &f.v_s), neg(&c.v_ss), zeroth]
        }
        (Equation::PsiHeat, form) => {
            let (ps, pss) = if form == Form::FirstOrderControl {
                (&c.psi_s_first_order, &c.psi_ss_first_order)
            } else {
                (&c.psi_s, &c.psi_ss)
            };
            vec![
                w.dt(|f| &f.psi, |f| &f.psi_s),
                neg(pss),
                pointwise(len, |i| -n * ratio(ps[i], c.psi[i]) * ps[i]),
                pointwise(len, |i| -c.k1[i] * c.psi[i]),
                pointwise(len, |i| ratio(n, c.psi[i])),
            ]
        }
        (Equation::PsiS, form) => {
            let mut t = vec![w.dt(|f| &f.psi_s, |f| &f.psi_ss), neg(&c.psi_sss)];
            if form == Form::PrintedLaplacian {
                t.push(pointwise(len, |i| -c.h[i] * c.psi_ss[i]));
                t.push(pointwise(len, |i| -(2.0 * c.k0[i] + (n - 1.0) * c.k1[i]) * c.psi_s[i]));
            } else {
                t.push(pointwise(len, |i| -(n - 2.0) * c.psi_ss[i] * q(i)));
                t.push(pointwise(len, |i| -(n - 1.0) * c.k1[i] * c.psi_s[i]));
            }
            t
        }
        (Equation::W, form) => {
            let sign = if form == Form::Derived { -1.0 } else { 1.0 };
            vec![
                w.dt(|f| &f.psi_ss, |f| &f.psi_sss),
                neg(&c.psi_ssss),
                pointwise(len, |i| -(n - 2.0) * q(i) * c.psi_sss[i]),
                pointwise(len, |i| {
                    let b = 2.0 * c.k0[i] - (4.0 * n - 5.0) * q(i) * q(i) + ratio(n - 1.0, c.psi[i] * c.psi[i]);
                    sign * b * c.psi_ss[i]
                }),
                pointwise(len, |i| 2.0 * (n - 1.0) * c.k1[i] * c.psi_s[i] * q(i)),
            ]
        }
        (Equation::K, form) => {
            let k = &c.kk;
            let mut t = vec![w.dt(|f| &f.kk, |f| &f.kk_s), neg(&c.kk_ss)];
            let tail = pointwise(len, |i| 2.0 * (n - 1.0) * c.k1[i] * q(i) * q(i));
            match form {
                Form::Printed => {
                    t.push(pointwise(len, |i| -n * c.h[i] * c.kk_s[i]));
                    t.push(pointwise(len, |i| 2.0 * k[i] * k[i]));
                    t.push(pointwise(len, |i| 4.0 * (n - 1.0) * c.k1[i] * k[i]));
                }
                Form::PrintedLaplacian => {
                    t.push(pointwise(len, |i| -c.h[i] * c.kk_s[i]));
                    t.push(pointwise(len, |i| 4.0 * k[i] * k[i]));
                    t.push(pointwise(len, |i| 2.0 * (n - 1.0) * c.k1[i] * k[i]));
                }
                _ => {
                    t.push(pointwise(len, |i| -c.h[i] * c.kk_s[i]));
                    t.push(pointwise(len, |i| 2.0 * k[i] * k[i]));
                    t.push(pointwise(len, |i| -2.0 * (n - 1.0) * c.k1[i] * k[i]));
                    t.push(pointwise(len, |i| 2.0 * (n - 1.0) * k[i] * q(i) * q(i)));
                }
            }
            t.push(tail);
            t
        }
        (Equation::H, form) => {
            let h = &c.h;
            let mut t = vec![w.dt(|f| &f.h, |f| &f.h_s), neg(&c.h_ss)];
            if form == Form::Printed {
                t.push(pointwise(len, |i| -((2.0 * n - 1.0) / n) * h[i] * c.h_s[i]));
                t.push(pointwise(len, |i| h[i].powi(3) / (n * n)));
                t.push(pointwise(len, |i| {
                    -2.0 * (n - 1.0) * vn.powf(2.0 / n) * ratio(1.0, c.v[i].powf(2.0 / n)) * h[i]
                }));
            } else {
                t.push(pointwise(len, |i| -h[i] * c.h_s[i]));
                t.push(pointwise(len, |i| h[i].powi(3) / n));
                t.push(pointwise(len, |i| -2.0 * (n - 1.0) * ratio(h[i], c.psi[i] * c.psi[i])));
            }
            t
        }
        (Equation::Pinching, form) => {
            let mut t = vec![
                w.dt(|f| &f.a, |f| &f.a_s),
                neg(&c.a_ss),
                pointwise(len, |i| 4.0 * (n - 1.0) * q(i) * q(i) * c.a[i]),
            ];
            if form == Form::PrintedLaplacian {
                t.push(pointwise(len, |i| -c.h[i] * c.a_s[i]));
                t.push(pointwise(len, |i| 4.0 * q(i) * c.a_s[i]));
            } else {
                t.push(pointwise(len, |i| -(n - 4.0) * q(i) * c.a_s[i]));
            }
            t
        }
        (Equation::PowerOfPsi, form) => {
            let k = power as f64;
            let zeroth = if form == Form::Printed {
                pointwise(len, |i| k * ((n - 1.0) * c.k0[i] + n) * c.u[i])
            } else {
                pointwise(len, |i| k * (n - 1.0) * c.k1[i] * c.u[i])
            };
            vec![
                w.dt(|f| &f.u, |f| &f.u_s),
                neg(&c.u_ss),
                zeroth,
                pointwise(len, |i| ((k - 1.0) / k) * ratio(c.u_s[i] * c.u_s[i], c.u[i])),
            ]
        }
        (Equation::K0s, _) | (Equation::K1s, _) => spatial_terms(spec, c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::FlowState;
    use crate::geometry::{build_grid, Profile};

    fn hyperbolic(m: usize) -> Fields {
        let p = Profile::from_fn(build_grid(6.0, m, 0.0).unwrap(), 2, |_| 1.0, f64::sinh).unwrap();
        Fields::new(&FlowState::new(0.0, p).unwrap(), DEFAULT_POWER).unwrap()
    }

    fn max_sum(spec: &ResidualSpec, f: &Fields) -> f64 {
        let terms = spatial_terms(spec, f);
        spec.mask(f)
            .into_iter()
            .map(|i| terms.iter().map(|t| t[i]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn catalog_keys_are_unique() {
        for n in 2..5 {
            let c = catalog(n);
            assert_eq!(c.len(), if n == 2 { 22 } else { 21 });
            let mut keys: Vec<String> = c.iter().map(ResidualSpec::key).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), c.len());
        }
        assert!(!catalog(2).contains(&negative_control()));
    }

    #[test]
    fn mask_skips_ends_and_origin_band() {
        let f = hyperbolic(120);
        let spec = ResidualSpec::new(Equation::K, Form::Derived, true);
        let mask = spec.mask(&f);
        let x = f.profile.grid().nodes();
        assert!(mask.iter().all(|&i| x[i] >= DEFAULT_ORIGIN_BAND));
        assert_eq!(*mask.last().unwrap(), 120 - DEFAULT_MASK_WIDTH);
        let pow = ResidualSpec::new(Equation::PowerOfPsi, Form::Derived, true);
        assert!(pow.mask(&f).iter().all(|&i| f.psi[i] < 1.0 && i >= DEFAULT_MASK_WIDTH));
    }

    #[test]
    fn spatial_identities_shrink_with_refinement() {
        let spec = ResidualSpec::new(Equation::K0s, Form::Printed, true);
        let coarse = max_sum(&spec, &hyperbolic(128));
        let fine = max_sum(&spec, &hyperbolic(256));
        assert!(coarse < 1e-4 && fine < 1e-4, "{coarse} {fine}");
        let k = ResidualSpec::new(Equation::K1s, Form::Derived, true);
        assert!(max_sum(&k, &hyperbolic(256)) < max_sum(&k, &hyperbolic(64)));
    }
}
