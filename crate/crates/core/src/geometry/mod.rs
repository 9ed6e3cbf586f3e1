//! Grids, finite differences and the pointwise geometry of warped products
//! `g = φ(x)² dx² + ψ(x)² ĝ` on `ℝ₊ × S^n`.

mod class;
mod curvature;
mod grid;
mod profile;
pub mod radial;

pub use class::{class_membership, ClassBounds, ClassMembership, PhiNormalization};
pub(crate) use curvature::check_psi_positive;
pub use curvature::{
    arclength, brown_york_mass, curvature, d_ds, mean_curvature, psi_derivatives, psi_derivatives_regular, ricci_xform,
    sphere_volume, unit_sphere_volume, CurvatureField, PsiDerivatives,
};
pub use grid::{build_grid, fornberg, Grid, DEFAULT_MAX_SPACING_RATIO};
pub use profile::Profile;
