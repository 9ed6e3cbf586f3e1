use crate::error::{Error, Result};
use crate::flow::{gauge_velocity, GaugeVelocity, Trajectory};
use crate::geometry::{class_membership, curvature, ClassBounds, CurvatureField, PhiNormalization};
use crate::par::{self, Execution};

use super::check::{pinching_sup, CheckRecord, Verdict};

/// Default tolerance on the relative deviation of the factorization identity.
pub const FACTORIZATION_TOL: f64 = 1e-2;
/// Relative growth of `D` allowed between consecutive recorded states.
pub const DECAY_STEP_TOL: f64 = 1e-3;
/// Slack on the rate bound `t·sup|R| ≤ (n+1)/2`.
pub const DECAY_RATE_TOL: f64 = 0.1;
/// `D` below this is treated as zero when testing monotonicity.
const DECAY_FLOOR: f64 = 1e-12;

/// Geometry of one recorded state, shared by every check.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub field: CurvatureField,
    pub gauge: GaugeVelocity,
}

pub fn snapshots(traj: &Trajectory, exec: Execution) -> Result<Vec<Snapshot>> {
    par::map(exec, &traj.states, |st| {
        Ok(Snapshot {
            t: st.t,
            psi: st.profile.psi().to_vec(),
            phi: st.profile.phi().to_vec(),
            field: curvature(&st.profile)?,
            gauge: gauge_velocity(&st.profile)?,
        })
    })
    .into_iter()
    .collect()
}

/// Nodes with `L/2 <= x < L`.
pub fn tail_nodes(field: &CurvatureField) -> Vec<usize> {
    let l = field.x[field.len() - 1];
    (0..field.len() - 1).filter(|&i| field.x[i] >= 0.5 * l).collect()
}

/// `d ln ψ/dt` and `d ln φ/dt` at fixed grid node. The grid moves with the
/// stepping gauge, so the transport terms `G ψ_s/ψ` and `G_s` join the
/// curvature exponents; both vanish on the self-similar family.
fn log_rates(snap: &Snapshot, i: usize, modified: bool) -> (f64, f64) {
    let f = &snap.field;
    let nf = f.n as f64;
    let norm = if modified { nf } else { 0.0 };
    let psi = -(f.k0[i] + (nf - 1.0) * f.k1[i]) + snap.gauge.g[i] * f.psi_s[i] / snap.psi[i] - norm;
    // -n K₀ + G_s collapses to the arclength growth rate
    let phi = snap.gauge.growth - norm;
    (psi, phi)
}

/// Compares `ψ(x,t)` with `ψ(x,0)·exp(∫₀ᵗ -(K₀+(n-1)K₁))` and `φ(x,t)` with
/// `φ(x,0)·exp(∫₀ᵗ -n K₀)` on the tail, integrating over recorded states by
/// trapezoid.
pub fn check_asymptotic_factorization(snaps: &[Snapshot], modified: bool, tol: f64) -> Result<CheckRecord> {
    if snaps.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "factorization needs at least 3 recorded states, got {}",
            snaps.len()
        )));
    }
    let tail = tail_nodes(&snaps[0].field);
    let mut worst = (0.0f64, tail[0], 0usize);
    for &i in &tail {
        let (mut ip, mut ih) = (0.0, 0.0);
        let mut prev = log_rates(&snaps[0], i, modified);
        for k in 1..snaps.len() {
            let cur = log_rates(&snaps[k], i, modified);
            let dt = snaps[k].t - snaps[k - 1].t;
            ip += 0.5 * dt * (prev.0 + cur.0);
            ih += 0.5 * dt * (prev.1 + cur.1);
            prev = cur;
            let dev_psi = (snaps[k].psi[i] / (snaps[0].psi[i] * ip.exp()) - 1.0).abs();
            let dev_phi = (snaps[k].phi[i] / (snaps[0].phi[i] * ih.exp()) - 1.0).abs();
            let dev = dev_psi.max(dev_phi);
            if !(dev <= worst.0) {
                worst = (dev, i, k);
            }
        }
    }
    let margin = tol - worst.0;
    Ok(CheckRecord::new(
        "asymptotic_factorization",
        Verdict::from_margin(margin, 0.0),
        margin,
        Some(worst.1),
    )
    .with_note(format!("max relative deviation {:.3e} at state {}", worst.0, worst.2)))
}

/// Class membership with fixed bounds at every recorded state.
pub fn check_class_persistence(
    traj: &Trajectory,
    bounds: ClassBounds,
    normalization: PhiNormalization,
) -> Result<CheckRecord> {
    let tail_start = 0.5 * traj.config.length;
    let mut worst = (f64::INFINITY, 0usize, None);
    for (k, st) in traj.states.iter().enumerate() {
        let m = class_membership(&st.profile, tail_start, bounds, normalization)?;
        let margin = (m.c1 - bounds.c1).min(bounds.c2 - m.c2);
        if margin < worst.0 {
            worst = (margin, k, Some(m.tail_nodes[0]));
        }
    }
    Ok(CheckRecord::new(
        format!("class_persistence_{}", normalization.label()),
        Verdict::from_margin(worst.0, 0.0),
        worst.0,
        worst.2,
    )
    .with_note(format!("tightest at state {}", worst.1)))
}

/// `D(t) = sup (|K₀| + |K₁|)` over interior nodes.
pub fn decay_diagnostic(field: &CurvatureField) -> f64 {
    (1..field.len() - 1).fold(0.0, |a, i| a.max(field.k0[i].abs() + field.k1[i].abs()))
}

/// `sup |R|` over nodes `0..M`.
pub fn sup_abs_scalar(field: &CurvatureField) -> f64 {
    field.r[..field.len() - 1].iter().fold(0.0, |a, r| a.max(r.abs()))
}

/// Over the final half of the run: `D` nonincreasing up to [`DECAY_STEP_TOL`]
/// per recorded step, and `t·sup|R| ≤ (n+1)/2·(1 + DECAY_RATE_TOL)`. The rate
/// is inferred from the scalar bound with `d = n+1`.
pub fn check_flat_convergence(snaps: &[Snapshot]) -> Result<CheckRecord> {
    let t_end = snaps.last().map_or(0.0, |s| s.t);
    if t_end < 1.0 {
        return Err(Error::InsufficientData(format!(
            "flat convergence needs a run to t >= 1, got t_end = {t_end}"
        )));
    }
    let n = snaps[0].field.n as f64;
    let late: Vec<&Snapshot> = snaps.iter().filter(|s| s.t >= 0.5 * t_end).collect();
    let d: Vec<f64> = late.iter().map(|s| decay_diagnostic(&s.field)).collect();
    let mut mono = (f64::INFINITY, 0usize);
    for k in 1..d.len() {
        let m = d[k - 1] * (1.0 + DECAY_STEP_TOL) + DECAY_FLOOR - d[k];
        if m < mono.0 {
            mono = (m, k);
        }
    }
    let cap = 0.5 * (n + 1.0) * (1.0 + DECAY_RATE_TOL);
    let rate = late.iter().map(|s| s.t * sup_abs_scalar(&s.field)).fold(0.0, f64::max);
    let margin = mono.0.min(cap - rate);
    Ok(CheckRecord::new("flat_convergence", Verdict::from_margin(margin, 0.0), margin, None).with_note(format!(
        "max t*sup|R| = {rate:.6e} against {cap:.6e} (rate inferred from the scalar bound); D monotonicity margin {:.3e}",
        mono.0
    )))
}

/// Whether `sup|a|` ever exceeds its initial value. Observation only.
pub fn check_pinching_non_expansion(snaps: &[Snapshot]) -> CheckRecord {
    let sup: Vec<f64> = snaps.iter().map(|s| pinching_sup(&s.field, &s.psi).0).collect();
    let a0 = sup[0];
    let excess = sup.iter().fold(f64::NEG_INFINITY, |a, v| a.max(v - a0));
    let monotone = sup.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
    let finite = sup.iter().all(|v| v.is_finite());
    let verdict = if finite { Verdict::Pass } else { Verdict::Fail };
    CheckRecord::new("pinching_non_expansion", verdict, -excess, None)
        .informational()
        .with_note(format!(
            "sup|a(0)| = {a0:.6e}, sup|a(t_end)| = {:.6e}, monotone decay {}",
            sup[sup.len() - 1],
            if monotone { "observed" } else { "not observed" }
        ))
}
