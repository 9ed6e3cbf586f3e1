use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::geometry::{ClassBounds, PhiNormalization};
use crate::par::{self, Execution};

use super::check::{
    check_negative_curvature, check_pinching, check_psi_convex, check_psi_monotone, check_scalar_bound, scalar_infimum,
    CheckRecord, DimensionConstant, Verdict,
};
use super::mass::{track_mass, MassProbe, DEFAULT_PROBES};
use super::trajectory::{
    check_asymptotic_factorization, check_class_persistence, check_flat_convergence, check_pinching_non_expansion,
    decay_diagnostic, snapshots, Snapshot, FACTORIZATION_TOL,
};

/// `R0_inf` above this counts as zero and the scalar bound is not applied.
const SCALAR_BOUND_MIN_R0: f64 = -1e-8;

#[derive(Debug, Clone)]
pub struct DiagnosticsOptions {
    /// Which dimension constant gates the scalar bound; both are recorded.
    pub dimension_constant: DimensionConstant,
    pub factorization_tol: f64,
    pub class_bounds: ClassBounds,
    /// Arclength probe radii for the mass series; ignored unless `n = 2`.
    pub probes: Vec<f64>,
    pub exec: Execution,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        DiagnosticsOptions {
            dimension_constant: DimensionConstant::CorrectedNPlus1,
            factorization_tol: FACTORIZATION_TOL,
            class_bounds: ClassBounds::default(),
            probes: DEFAULT_PROBES.to_vec(),
            exec: Execution::default(),
        }
    }
}

/// Numeric summary of one state, one row of `series.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub sup_abs_k0: f64,
    pub sup_abs_k1: f64,
    pub inf_r: f64,
    pub sup_r: f64,
    pub min_psi_s: f64,
    pub min_psi_ss: f64,
    pub decay: f64,
    pub masses: Vec<f64>,
}

impl SeriesRow {
    pub fn header(probes: &[f64]) -> Vec<String> {
        let mut h: Vec<String> = [
            "t",
            "sup_abs_K0",
            "sup_abs_K1",
            "inf_R",
            "sup_R",
            "min_psi_s",
            "min_psi_ss",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend(probes.iter().map(|r| format!("m_r={r}")));
        h.push("D".into());
        h
    }

    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.t,
            self.sup_abs_k0,
            self.sup_abs_k1,
            self.inf_r,
            self.sup_r,
            self.min_psi_s,
            self.min_psi_ss,
        ];
        v.extend(&self.masses);
        v.push(self.decay);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub t: f64,
    pub checks: Vec<CheckRecord>,
    pub series_row: SeriesRow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// One report per recorded state; trajectory-level checks are attached to the last.
    pub reports: Vec<DiagnosticsReport>,
    pub mass: Option<MassProbe>,
}

impl Diagnostics {
    /// Gating records that failed, with the time they were evaluated at.
    pub fn failures(&self) -> Vec<(f64, &CheckRecord)> {
        self.reports
            .iter()
            .flat_map(|r| r.checks.iter().map(move |c| (r.t, c)))
            .filter(|(_, c)| c.gating && !c.pass)
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// All records with a given name, in time order.
    pub fn records(&self, name: &str) -> Vec<(f64, &CheckRecord)> {
        self.reports
            .iter()
            .flat_map(|r| r.checks.iter().map(move |c| (r.t, c)))
            .filter(|(_, c)| c.name == name)
            .collect()
    }
}

fn interior_extremes(v: &[f64]) -> (f64, f64) {
    v[1..v.len() - 1]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(*x), hi.max(*x))
        })
}

fn series_row(snap: &Snapshot, masses: Vec<f64>) -> SeriesRow {
    let f = &snap.field;
    let sup_abs = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let (inf_r, sup_r) = f.r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(*x), hi.max(*x))
    });
    SeriesRow {
        t: snap.t,
        sup_abs_k0: sup_abs(&f.k0),
        sup_abs_k1: sup_abs(&f.k1),
        inf_r,
        sup_r,
        min_psi_s: interior_extremes(&f.psi_s).0,
        min_psi_ss: interior_extremes(&f.psi_ss).0,
        decay: decay_diagnostic(f),
        masses,
    }
}

fn state_checks(snap: &Snapshot, r0_inf: f64, gate: DimensionConstant) -> Result<Vec<CheckRecord>> {
    let f = &snap.field;
    let mut checks = vec![check_psi_monotone(f), check_psi_convex(f), check_negative_curvature(f)];
    if r0_inf < SCALAR_BOUND_MIN_R0 {
        for constant in [DimensionConstant::CorrectedNPlus1, DimensionConstant::SphereN] {
            let rec = check_scalar_bound(f, snap.t, r0_inf, constant)?;
            checks.push(if constant == gate { rec } else { rec.informational() });
        }
    }
    checks.push(check_pinching(f, &snap.psi));
    // the invariants are claims about t > 0; initial data is only recorded
    if snap.t == 0.0 {
        checks.iter_mut().for_each(|c| c.gating = false);
    }
    Ok(checks)
}

fn skipped(name: &str, err: Error) -> CheckRecord {
    CheckRecord::new(name, Verdict::Boundary, 0.0, None)
        .informational()
        .with_note(format!("skipped: {err}"))
}

/// Runs every per-state and per-trajectory monitor over a recorded trajectory.
pub fn diagnose(traj: &Trajectory, opts: &DiagnosticsOptions) -> Result<Diagnostics> {
    let snaps = snapshots(traj, opts.exec)?;
    let n = traj.config.n;
    let mass = if n == 2 && !opts.probes.is_empty() {
        Some(track_mass(&snaps, &opts.probes)?)
    } else {
        None
    };
    let r0_inf = scalar_infimum(&snaps[0].field);
    let per_state: Vec<Result<Vec<CheckRecord>>> =
        par::map(opts.exec, &snaps, |s| state_checks(s, r0_inf, opts.dimension_constant));

    let mut reports = Vec::with_capacity(snaps.len());
    for (k, (snap, checks)) in snaps.iter().zip(per_state).enumerate() {
        let masses = mass.as_ref().map_or_else(Vec::new, |m| m.masses[k].clone());
        reports.push(DiagnosticsReport {
            t: snap.t,
            checks: checks?,
            series_row: series_row(snap, masses),
        });
    }

    let mut tail = Vec::new();
    tail.push(
        match check_asymptotic_factorization(&snaps, traj.config.modified, opts.factorization_tol) {
            Err(e @ Error::InsufficientData(_)) => skipped("asymptotic_factorization", e),
            other => other?,
        },
    );
    for norm in [PhiNormalization::Unit, PhiNormalization::OverX] {
        tail.push(check_class_persistence(traj, opts.class_bounds, norm)?.informational());
    }
    if !traj.config.modified {
        tail.push(match check_flat_convergence(&snaps) {
            Err(e @ Error::InsufficientData(_)) => skipped("flat_convergence", e),
            other => other?,
        });
    }
    tail.push(check_pinching_non_expansion(&snaps));
    if let Some(m) = &mass {
        let mono = m.monotonicity();
        let desc: Vec<String> = m
            .radii
            .iter()
            .zip(mono)
            .map(|(r, (dec, inc))| {
                let word = match (dec, inc) {
                    (true, true) => "constant",
                    (true, false) => "nonincreasing",
                    (false, true) => "nondecreasing",
                    (false, false) => "not monotone",
                };
                format!("r={r}: {word}")
            })
            .collect();
        tail.push(
            CheckRecord::new("mass_monotonicity", Verdict::Pass, 0.0, None)
                .informational()
                .with_note(desc.join("; ")),
        );
    }
    reports.last_mut().expect("trajectory is nonempty").checks.extend(tail);
    Ok(Diagnostics { reports, mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::evolve;
    use crate::io::parse_config;

    fn run(text: &str) -> Trajectory {
        evolve(&parse_config(text).unwrap()).unwrap()
    }

    #[test]
    fn short_hyperbolic_run_passes() {
        let traj = run("preset=hyperbolic\nM=128\nt_end=0.2\nrecord_every=50");
        let d = diagnose(&traj, &DiagnosticsOptions::default()).unwrap();
        assert!(d.passed(), "{:?}", d.failures());
        assert_eq!(d.reports.len(), traj.states.len());
        // trajectory checks sit on the last report only
        assert_eq!(d.records("asymptotic_factorization").len(), 1);
        let flat = d.records("flat_convergence");
        assert!(!flat[0].1.gating, "skipped below t = 1");
        let mass = d.mass.unwrap();
        assert_eq!(mass.times.len(), traj.states.len());
    }

    #[test]
    fn series_header_matches_values() {
        let traj = run("preset=flat\nM=64\nt_end=0.01\nrecord_every=10\nouter_bc=extrapolate_zero_curvature_gradient");
        let opts = DiagnosticsOptions::default();
        let d = diagnose(&traj, &opts).unwrap();
        let header = SeriesRow::header(&opts.probes);
        assert_eq!(header.len(), d.reports[0].series_row.values().len());
        assert_eq!(header[0], "t");
    }

    #[test]
    fn mass_needs_two_spheres() {
        let traj = run("preset=hyperbolic\nn=3\nM=64\nt_end=0.01\nrecord_every=10");
        let d = diagnose(&traj, &DiagnosticsOptions::default()).unwrap();
        assert!(d.mass.is_none());
    }
}
