use crate::error::{Error, Result};
use crate::geometry::{arclength, check_psi_positive, psi_derivatives_regular, Profile, PsiDerivatives};

/// A metric at one instant of the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub profile: Profile,
}

impl FlowState {
    pub fn new(t: f64, profile: Profile) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Contract(format!("flow time must be finite and >= 0, got {t}")));
        }
        profile.validate()?;
        Ok(FlowState { t, profile })
    }
}

/// Time derivatives `(∂_t ψ, ∂_t φ)` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    /// Largest `|K₀| = |ψ_ss/ψ|` seen while evaluating, with its node.
    pub max_abs_k0: (f64, usize),
}

pub(crate) fn ricci_rates(profile: &Profile) -> Result<Rates> {
    check_psi_positive(profile)?;
    let nf = profile.n() as f64;
    let psi = profile.psi();
    let phi = profile.phi();
    let d = psi_derivatives_regular(profile);
    let len = profile.len();
    let mut psi_t = Vec::with_capacity(len);
    let mut phi_t = Vec::with_capacity(len);
    // ψ stays pinned at the origin; φ_t(0) = n φ ψ_sss(0) by parity
    psi_t.push(0.0);
    phi_t.push(nf * phi[0] * d.origin_ratio);
    let mut worst = (d.origin_ratio.abs(), 0);
    for i in 1..len {
        let ratio = d.psi_ss[i] / psi[i];
        let k1_psi = (1.0 - d.psi_s[i] * d.psi_s[i]) / psi[i];
        psi_t.push(d.psi_ss[i] - (nf - 1.0) * k1_psi);
        phi_t.push(nf * phi[i] * ratio);
        if !(ratio.abs() <= worst.0) {
            worst = (ratio.abs(), i);
        }
    }
    Ok(Rates {
        psi: psi_t,
        phi: phi_t,
        max_abs_k0: worst,
    })
}

/// Right-hand side of the warped Ricci flow in `(x, t)` coordinates:
/// `∂_t ψ = ψ_ss - (n-1)(1 - ψ_s²)/ψ`, `∂_t φ = n φ ψ_ss/ψ`.
/// Returns `(∂_t ψ, ∂_t φ)`.
pub fn rhs_xt(state: &FlowState) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = ricci_rates(&state.profile)?;
    Ok((r.psi, r.phi))
}

/// Right-hand side of `∂_t g = -2 Rc - 2n g`: the Ricci rates minus `n ψ` and `n φ`.
pub fn modified_rhs(state: &FlowState) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut psi_t, mut phi_t) = rhs_xt(state)?;
    subtract_normalization(&state.profile, &mut psi_t, &mut phi_t);
    Ok((psi_t, phi_t))
}

pub(crate) fn subtract_normalization(profile: &Profile, psi_t: &mut [f64], phi_t: &mut [f64]) {
    let nf = profile.n() as f64;
    for (r, p) in psi_t.iter_mut().zip(profile.psi()) {
        *r -= nf * p;
    }
    for (r, p) in phi_t.iter_mut().zip(profile.phi()) {
        *r -= nf * p;
    }
}

/// Rates in the gauge where `s(x, t)/S(t)` is constant in time, with `S` the
/// arclength out to `x = L`.
///
/// In the bare `(x, t)` system points move in arclength as
/// `∂_t s = A(s) = n ∫₀^s ψ_ss/ψ`. Re-anchoring them to fixed relative
/// arclength adds the transport `ψ_s G` with `G = s A(S)/S - A(s)` to the
/// `ψ` equation and turns the `φ` equation into the uniform rescaling
/// `φ_t = φ A(S)/S`. The result is a single parabolic equation for `ψ`:
/// no gauge modes are left for a collocated discretisation to amplify.
/// `G` vanishes on the self-similar family.
pub(crate) fn gauged_rates(profile: &Profile) -> Result<GaugedRates> {
    let raw = ricci_rates(profile)?;
    let d = psi_derivatives_regular(profile);
    let gauge = velocity_from(profile, &d);
    let mut psi_t = raw.psi.clone();
    for i in 1..psi_t.len() {
        psi_t[i] += d.psi_s[i] * gauge.g[i];
    }
    let phi_t = profile.phi().iter().map(|p| p * gauge.growth).collect();
    Ok(GaugedRates {
        rates: Rates {
            psi: psi_t,
            phi: phi_t,
            max_abs_k0: raw.max_abs_k0,
        },
        raw_psi: raw.psi,
    })
}

/// Transport between the bare `(x, t)` system and the stepping gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeVelocity {
    /// `G = s A(S)/S - A(s)` per node: the arclength velocity of a fixed-`x`
    /// point relative to a point of the bare system.
    pub g: Vec<f64>,
    /// `A(S)/S`, the common relative growth rate of arclength.
    pub growth: f64,
}

fn velocity_from(profile: &Profile, d: &PsiDerivatives) -> GaugeVelocity {
    let psi = profile.psi();
    let nf = profile.n() as f64;
    let s = arclength(profile);
    let len = psi.len();
    let mut a = vec![0.0; len];
    let mut prev = d.origin_ratio;
    for i in 1..len {
        let cur = d.psi_ss[i] / psi[i];
        a[i] = a[i - 1] + 0.5 * nf * (prev + cur) * (s[i] - s[i - 1]);
        prev = cur;
    }
    let growth = a[len - 1] / s[len - 1];
    let g = (0..len).map(|i| s[i] * growth - a[i]).collect();
    GaugeVelocity { g, growth }
}

/// Gauge velocity of a state. For a scalar field `f`, the bare-system time
/// derivative is `∂_t f - G f_s`; for `φ` it is `∂_t φ - φ G_s`.
pub fn gauge_velocity(profile: &Profile) -> Result<GaugeVelocity> {
    check_psi_positive(profile)?;
    Ok(velocity_from(profile, &psi_derivatives_regular(profile)))
}

/// Gauged rates together with the bare `ψ` rates they were built from.
#[derive(Debug, Clone)]
pub(crate) struct GaugedRates {
    pub rates: Rates,
    /// `∂_t ψ` of the bare system, needed by boundary closures.
    pub raw_psi: Vec<f64>,
}

/// `(∂_t ψ, ∂_t φ)` in the fixed-relative-arclength gauge used for time stepping.
pub fn gauged_rhs(state: &FlowState) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = gauged_rates(&state.profile)?;
    Ok((g.rates.psi, g.rates.phi))
}
