use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::CurvatureField;

use super::trajectory::Snapshot;

/// Probe radii in arclength, default for tracking the quasi-local mass.
pub const DEFAULT_PROBES: [f64; 3] = [1.0, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassProbe {
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
    /// `masses[k][j]`: mass at time `times[k]` and radius `radii[j]`.
    pub masses: Vec<Vec<f64>>,
    /// Sphere volume at each probe, same layout.
    pub volumes: Vec<Vec<f64>>,
}

impl MassProbe {
    pub fn new(radii: Vec<f64>) -> Self {
        MassProbe {
            radii,
            times: Vec::new(),
            masses: Vec::new(),
            volumes: Vec::new(),
        }
    }

    /// Whether each probe's mass is monotone in time, as `(nonincreasing, nondecreasing)`.
    pub fn monotonicity(&self) -> Vec<(bool, bool)> {
        (0..self.radii.len())
            .map(|j| {
                let col: Vec<f64> = self.masses.iter().map(|row| row[j]).collect();
                (
                    col.windows(2).all(|w| w[1] <= w[0]),
                    col.windows(2).all(|w| w[1] >= w[0]),
                )
            })
            .collect()
    }
}

/// Cubic Lagrange interpolation of `f` against the increasing abscissae `s`.
pub fn interpolate_cubic(s: &[f64], f: &[f64], r: f64) -> f64 {
    let hi = s.partition_point(|&v| v < r).clamp(2, s.len() - 2);
    let lo = hi - 2;
    let pts = lo..lo + 4;
    let mut acc = 0.0;
    for j in pts.clone() {
        let mut w = 1.0;
        for k in pts.clone() {
            if k != j {
                w *= (r - s[k]) / (s[j] - s[k]);
            }
        }
        acc += w * f[j];
    }
    acc
}

/// `(m, V)` at arclength radius `r`, with `m = (n coth r - H) V`.
pub fn mass_at(field: &CurvatureField, r: f64) -> (f64, f64) {
    let h = interpolate_cubic(&field.s[1..], &field.h[1..], r);
    let v = interpolate_cubic(&field.s, &field.v, r);
    (((field.n as f64) / r.tanh() - h) * v, v)
}

/// Brown–York mass at each probe radius for every snapshot.
pub fn track_mass(snaps: &[Snapshot], radii: &[f64]) -> Result<MassProbe> {
    let n = snaps.first().map_or(2, |s| s.field.n);
    if n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut probe = MassProbe::new(radii.to_vec());
    for snap in snaps {
        let f = &snap.field;
        let s_max = f.s[f.len() - 1];
        let mut row = Vec::with_capacity(radii.len());
        let mut vols = Vec::with_capacity(radii.len());
        for &r in radii {
            if !(r > 0.0 && r < s_max) {
                return Err(Error::config(
                    "probes",
                    format!("probe radius {r} outside (0, {s_max:.6}) at t = {}", snap.t),
                ));
            }
            let (m, v) = mass_at(f, r);
            row.push(m);
            vols.push(v);
        }
        probe.times.push(snap.t);
        probe.masses.push(row);
        probe.volumes.push(vols);
    }
    Ok(probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact_on_cubics() {
        let s: Vec<f64> = (0..20).map(|i| (i as f64 * 0.3).powf(1.2)).collect();
        let f: Vec<f64> = s.iter().map(|x| 1.0 - 2.0 * x + x * x * x).collect();
        for r in [0.05, 1.3, 2.71, s[19] - 1e-3] {
            let want = 1.0 - 2.0 * r + r * r * r;
            assert!((interpolate_cubic(&s, &f, r) - want).abs() < 1e-11);
        }
    }
}
