//! Time evolution of warped-product metrics under Ricci flow and its
//! normalised variant.

mod config;
mod exact;
mod integrate;
mod reparam;
mod rhs;

pub use config::{FlowConfig, OuterBc, DEFAULT_CFL, MAX_CFL};
pub use exact::ExactFamily;
pub use integrate::{
    apply_origin_bc, apply_outer_bc, evolve, evolve_with, stable_dt, step, EvolveFailure, EvolveOptions, FlowProblem,
    Integrator, OriginGhost, Trajectory, BLOW_UP_CURVATURE,
};
pub use reparam::{
    chain_rule_residual, compare_with_plain, interpolate_profile, modified_at_tau, reparameterize_modified,
    ComparisonRow, ReparamPair,
};
pub use rhs::{gauge_velocity, gauged_rhs, modified_rhs, rhs_xt, FlowState, GaugeVelocity, Rates};
