//! Invariant monitors for recorded flows: per-state sign conditions, the
//! scalar lower bound, trajectory-level asymptotics and quasi-local mass.

mod check;
mod mass;
mod report;
mod trajectory;

pub use check::{
    check_negative_curvature, check_pinching, check_psi_convex, check_psi_monotone, check_scalar_bound,
    pinching_quantity, pinching_sup, scalar_infimum, scalar_lower_bound, CheckRecord, DimensionConstant, Verdict,
    BOUNDARY_EPS_FACTOR, SCALAR_BOUND_SLACK,
};
pub use mass::{interpolate_cubic, mass_at, track_mass, MassProbe, DEFAULT_PROBES};
pub use report::{diagnose, Diagnostics, DiagnosticsOptions, DiagnosticsReport, SeriesRow};
pub use trajectory::{
    check_asymptotic_factorization, check_class_persistence, check_flat_convergence, check_pinching_non_expansion,
    decay_diagnostic, snapshots, sup_abs_scalar, tail_nodes, Snapshot, DECAY_RATE_TOL, DECAY_STEP_TOL,
    FACTORIZATION_TOL,
};
