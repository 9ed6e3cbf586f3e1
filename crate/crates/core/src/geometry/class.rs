use serde::Serialize;

use crate::error::{Error, Result};

use super::profile::Profile;

/// How the radial factor is normalised when testing membership in the
/// hyperbolic class: literally `φ(x)/x`, or `φ(x)` itself, which is what the
/// model metric `dx² + sinh²(x) ĝ` satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiNormalization {
    OverX,
    Unit,
}

impl PhiNormalization {
    pub fn label(self) -> &'static str {
        match self {
            PhiNormalization::OverX => "phi_over_x",
            PhiNormalization::Unit => "phi_unit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassBounds {
    pub c1: f64,
    pub c2: f64,
}

impl Default for ClassBounds {
    fn default() -> Self {
        ClassBounds { c1: 0.5, c2: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMembership {
    pub tail_nodes: Vec<usize>,
    pub ratio_phi: Vec<f64>,
    pub ratio_psi: Vec<f64>,
    /// Smallest ratio seen on the tail.
    pub c1: f64,
    /// Largest ratio seen on the tail.
    pub c2: f64,
    pub within_class: bool,
    pub normalization: PhiNormalization,
}

pub fn class_membership(
    profile: &Profile,
    tail_start: f64,
    bounds: ClassBounds,
    normalization: PhiNormalization,
) -> Result<ClassMembership> {
    if !(bounds.c1 > 0.0 && bounds.c1 <= bounds.c2) {
        return Err(Error::config(
            "c_bounds",
            format!("need 0 < C1 <= C2, got ({}, {})", bounds.c1, bounds.c2),
        ));
    }
    let x = profile.grid().nodes();
    if !(tail_start < profile.grid().length()) || tail_start <= 0.0 {
        return Err(Error::config(
            "tail_start",
            format!("must lie in (0, L), got {tail_start}"),
        ));
    }
    let tail_nodes: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= tail_start).collect();
    if tail_nodes.is_empty() {
        return Err(Error::config("tail_start", "empty tail region"));
    }
    let phi = profile.phi();
    let psi = profile.psi();
    let ratio_phi: Vec<f64> = tail_nodes
        .iter()
        .map(|&i| match normalization {
            PhiNormalization::OverX => phi[i] / x[i],
            PhiNormalization::Unit => phi[i],
        })
        .collect();
    let ratio_psi: Vec<f64> = tail_nodes.iter().map(|&i| psi[i] / x[i].sinh()).collect();
    let all = ratio_phi.iter().chain(&ratio_psi);
    let c1 = all.clone().cloned().fold(f64::INFINITY, f64::min);
    let c2 = all.cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ClassMembership {
        tail_nodes,
        ratio_phi,
        ratio_psi,
        c1,
        c2,
        within_class: c1 >= bounds.c1 && c2 <= bounds.c2,
        normalization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::build_grid;

    fn prof(phi: fn(f64) -> f64, psi: fn(f64) -> f64) -> Profile {
        Profile::from_fn(build_grid(6.0, 120, 0.0).unwrap(), 2, phi, psi).unwrap()
    }

    #[test]
    fn model_metric_fails_literal_phi_over_x() {
        let p = prof(|_| 1.0, |x| x.sinh());
        let m = class_membership(&p, 3.0, ClassBounds::default(), PhiNormalization::OverX).unwrap();
        assert!(!m.within_class);
        assert!((m.c1 - 1.0 / 6.0).abs() < 1e-12);
        let u = class_membership(&p, 3.0, ClassBounds::default(), PhiNormalization::Unit).unwrap();
        assert!(u.within_class);
    }

    #[test]
    fn phi_equal_x_is_in_class() {
        let p = Profile::from_fn(build_grid(6.0, 120, 0.0).unwrap(), 2, |x| x.max(1e-3), |x| x.sinh()).unwrap();
        let m = class_membership(&p, 3.0, ClassBounds::default(), PhiNormalization::OverX).unwrap();
        assert!(m.within_class);
        assert!((m.c1 - 1.0).abs() < 1e-12 && (m.c2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_growth_leaves_class() {
        let p = prof(|_| 1.0, |x| (2.0 * x).exp_m1());
        let m = class_membership(&p, 3.0, ClassBounds { c1: 0.5, c2: 100.0 }, PhiNormalization::Unit).unwrap();
        assert!(!m.within_class);
    }

    #[test]
    fn bad_tail_or_bounds() {
        let p = prof(|_| 1.0, |x| x.sinh());
        assert!(class_membership(&p, 7.0, ClassBounds::default(), PhiNormalization::Unit).is_err());
        assert!(class_membership(&p, 3.0, ClassBounds { c1: 2.0, c2: 1.0 }, PhiNormalization::Unit).is_err());
    }
}
