//! Numerical certification of the evolution equations satisfied along the
//! flow: each identity is evaluated as `LHS - RHS` on recorded states, with
//! time derivatives from centred differences, and driven to zero under grid
//! refinement.

mod equations;
mod fields;
mod study;

pub use equations::{
    catalog, negative_control, spatial_terms, window_terms, Equation, Form, ResidualSpec, Terms, DEFAULT_MASK_WIDTH,
    DEFAULT_ORIGIN_BAND, DEFAULT_POWER,
};
pub use fields::{Fields, Window};
pub use study::{
    convergence_order, evaluate_trajectory, order_study, order_study_with, refinement_configs, residuals_at,
    sample_indices, study_from_reports, OrderRow, OrderStudy, OrderVerdict, ResidualOptions, ResidualReport,
    DISCREPANCY_ORDER, PASS_ORDER, ROUNDOFF_RESIDUAL,
};
