//! Correspondence between the modified flow `∂_t g = -2Rc - 2n g` and Ricci flow.
//!
//! If `g(t)` solves the modified flow then `ḡ(τ) = c(τ) g(t(τ))` solves Ricci
//! flow exactly when `c·t' = 1` and `c' = 2n·c·t'`, i.e. `c = 1 + 2nτ` and
//! `t = log(1 + 2nτ)/(2n)`. Both that pair and the `(1 + nτ, log(1 + nτ)/n)`
//! candidate are exposed so the chain-rule check can be run on either.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Profile;

use super::integrate::Trajectory;
use super::rhs::FlowState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReparamPair {
    /// `(1 + nτ, log(1 + nτ)/n)`.
    Printed,
    /// `(1 + 2nτ, log(1 + 2nτ)/(2n))`.
    Derived,
}

impl ReparamPair {
    pub const ALL: [ReparamPair; 2] = [ReparamPair::Printed, ReparamPair::Derived];

    fn rate(self, n: usize) -> f64 {
        match self {
            ReparamPair::Printed => n as f64,
            ReparamPair::Derived => 2.0 * n as f64,
        }
    }

    pub fn scale(self, n: usize, tau: f64) -> f64 {
        1.0 + self.rate(n) * tau
    }

    pub fn time(self, n: usize, tau: f64) -> f64 {
        let k = self.rate(n);
        (k * tau).ln_1p() / k
    }

    /// Inverse of [`ReparamPair::time`].
    pub fn tau(self, n: usize, t: f64) -> f64 {
        let k = self.rate(n);
        (k * t).exp_m1() / k
    }

    pub fn formula(self) -> &'static str {
        match self {
            ReparamPair::Printed => "c = 1 + n tau, t = ln(1 + n tau)/n",
            ReparamPair::Derived => "c = 1 + 2n tau, t = ln(1 + 2n tau)/(2n)",
        }
    }
}

/// Largest violation of `c·t' = 1` and `c' = 2n·c·t'` over `taus`, with
/// derivatives of the candidate pair taken by second-order differences.
pub fn chain_rule_residual(pair: ReparamPair, n: usize, taus: &[f64]) -> f64 {
    let two_n = 2.0 * n as f64;
    taus.iter()
        .map(|&tau| {
            let h = 1e-5 * (1.0 + tau);
            let d = |f: &dyn Fn(f64) -> f64| {
                if tau >= h {
                    (f(tau + h) - f(tau - h)) / (2.0 * h)
                } else {
                    (-3.0 * f(tau) + 4.0 * f(tau + h) - f(tau + 2.0 * h)) / (2.0 * h)
                }
            };
            let dc = d(&|x| pair.scale(n, x));
            let dt = d(&|x| pair.time(n, x));
            let c = pair.scale(n, tau);
            (c * dt - 1.0).abs().max((dc - two_n * c * dt).abs())
        })
        .fold(0.0, f64::max)
}

/// Cubic Lagrange interpolation of the recorded states at time `t`, using the
/// four recorded states nearest to it.
pub fn interpolate_profile(traj: &Trajectory, t: f64) -> Result<Profile> {
    let states = &traj.states;
    if states.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "cubic interpolation needs 4 recorded states, have {}",
            states.len()
        )));
    }
    let t0 = states[0].t;
    let t1 = states[states.len() - 1].t;
    let tol = 1e-12 * (1.0 + t1.abs());
    if t < t0 - tol || t > t1 + tol {
        return Err(Error::Contract(format!("t = {t} outside recorded range [{t0}, {t1}]")));
    }
    let k = states.partition_point(|s| s.t < t);
    let start = k.saturating_sub(2).min(states.len() - 4);
    let window = &states[start..start + 4];
    let mut weights = [0.0; 4];
    for (j, wj) in weights.iter_mut().enumerate() {
        let mut w = 1.0;
        for (m, sm) in window.iter().enumerate() {
            if m != j {
                w *= (t - sm.t) / (window[j].t - sm.t);
            }
        }
        *wj = w;
    }
    let base = &window[0].profile;
    let len = base.len();
    let mut phi = vec![0.0; len];
    let mut psi = vec![0.0; len];
    for (w, s) in weights.iter().zip(window) {
        for i in 0..len {
            phi[i] += w * s.profile.phi()[i];
            psi[i] += w * s.profile.psi()[i];
        }
    }
    psi[0] = 0.0;
    Profile::new(base.grid().clone(), phi, psi, base.n())
}

/// Maps a modified-flow trajectory to the Ricci flow `ḡ(τ) = c(τ) g(t(τ))`
/// using the derived pair. Recorded state `k` lands at `τ_k = τ(t_k)`.
pub fn reparameterize_modified(traj: &Trajectory) -> Result<Trajectory> {
    if !traj.config.modified {
        return Err(Error::Contract(
            "reparameterization expects a modified-flow trajectory".into(),
        ));
    }
    let n = traj.config.n;
    let pair = ReparamPair::Derived;
    let states = traj
        .states
        .iter()
        .map(|s| {
            let tau = pair.tau(n, s.t);
            FlowState {
                t: tau,
                profile: s.profile.scaled(pair.scale(n, tau)),
            }
        })
        .collect();
    let mut config = traj.config.clone();
    config.modified = false;
    config.t_end = pair.tau(n, traj.config.t_end);
    Ok(Trajectory {
        states,
        config,
        boundary_mismatch: traj.boundary_mismatch,
        steps: traj.steps,
    })
}

/// The reparameterised modified flow at Ricci-flow time `tau`.
pub fn modified_at_tau(modified: &Trajectory, tau: f64) -> Result<Profile> {
    let n = modified.config.n;
    let pair = ReparamPair::Derived;
    let p = interpolate_profile(modified, pair.time(n, tau))?;
    Ok(p.scaled(pair.scale(n, tau)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub tau: f64,
    pub t_modified: f64,
    /// `max_i |ψ̄_i - ψ_i| / |ψ_i|` over `x > 0`.
    pub sup_rel_diff_psi: f64,
    pub sup_rel_diff_phi: f64,
}

/// Compares the reparameterised modified trajectory with a plain Ricci-flow
/// trajectory at each recorded `τ` of the latter inside the mapped range.
pub fn compare_with_plain(modified: &Trajectory, plain: &Trajectory) -> Result<Vec<ComparisonRow>> {
    if !modified.config.modified || plain.config.modified {
        return Err(Error::Contract("expected (modified, plain) trajectories".into()));
    }
    let n = modified.config.n;
    let pair = ReparamPair::Derived;
    let t_max = modified.last().t;
    let mut rows = Vec::new();
    for s in &plain.states {
        let t_mod = pair.time(n, s.t);
        if t_mod > t_max * (1.0 + 1e-12) {
            continue;
        }
        let p = modified_at_tau(modified, s.t)?;
        let rel = |a: &[f64], b: &[f64]| (1..a.len()).map(|i| ((a[i] - b[i]) / b[i]).abs()).fold(0.0, f64::max);
        rows.push(ComparisonRow {
            tau: s.t,
            t_modified: t_mod,
            sup_rel_diff_psi: rel(p.psi(), s.profile.psi()),
            sup_rel_diff_phi: rel(p.phi(), s.profile.phi()),
        });
    }
    Ok(rows)
}
