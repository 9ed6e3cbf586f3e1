use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{evolve, FlowConfig, Trajectory};
use crate::par::{self, Execution};

use super::equations::{catalog, spatial_terms, window_terms, Form, ResidualSpec, Terms, DEFAULT_POWER};
use super::fields::{Fields, Window};

/// Residuals at or below this (normalised) count as roundoff.
pub const ROUNDOFF_RESIDUAL: f64 = 1e-9;
/// Minimum observed order for a refinement study to pass.
pub const PASS_ORDER: f64 = 1.8;
/// Below this order the residual is not vanishing under refinement.
pub const DISCREPANCY_ORDER: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub equation: String,
    pub form: Form,
    pub t: f64,
    /// Intervals of the grid the trajectory ran on.
    pub m: usize,
    /// Sup over masked nodes of the relative residual `|Σ tⱼ| / max(1, Σ |tⱼ|)`
    /// over the summands `tⱼ` of `LHS - RHS`.
    pub max_residual: f64,
    pub rms_residual: f64,
    /// Sup of the weighted residual before normalisation.
    pub max_abs_residual: f64,
    pub worst_node: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ResidualOptions {
    /// Number of evenly spaced times at which residuals are sampled.
    pub samples: usize,
    pub power: i32,
    pub exec: Execution,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        ResidualOptions {
            samples: 8,
            power: DEFAULT_POWER,
            exec: Execution::default(),
        }
    }
}

fn measure(spec: &ResidualSpec, fields: &Fields, terms: &Terms) -> ResidualReport {
    let mask = spec.mask(fields);
    let mut max = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0;
    let mut worst = mask.first().copied().unwrap_or(0);
    for &i in &mask {
        let w = spec.weight(fields, i);
        let raw: f64 = terms.iter().map(|t| w * t[i]).sum();
        let scale = terms.iter().map(|t| (w * t[i]).abs()).sum::<f64>().max(1.0);
        let r = (raw / scale).abs();
        if !(r <= max) {
            max = r;
            worst = i;
        }
        max_abs = max_abs.max(raw.abs());
        sum_sq += r * r;
    }
    ResidualReport {
        equation: spec.key(),
        form: spec.form,
        t: fields.t,
        m: fields.len() - 1,
        max_residual: max,
        rms_residual: (sum_sq / mask.len().max(1) as f64).sqrt(),
        max_abs_residual: max_abs,
        worst_node: worst,
    }
}

fn require_plain(traj: &Trajectory) -> Result<()> {
    if traj.config.modified {
        return Err(Error::Contract(
            "residual identities are stated for the unnormalised flow".into(),
        ));
    }
    if traj.states.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "residuals need at least 3 recorded states, got {}",
            traj.states.len()
        )));
    }
    Ok(())
}

/// Every spec evaluated at recorded state `idx`, using its two neighbours for
/// time differences.
pub fn residuals_at(traj: &Trajectory, idx: usize, specs: &[ResidualSpec], power: i32) -> Result<Vec<ResidualReport>> {
    require_plain(traj)?;
    if idx == 0 || idx + 1 >= traj.states.len() {
        return Err(Error::InsufficientData(format!(
            "state {idx} has no neighbour on both sides among {} states",
            traj.states.len()
        )));
    }
    let window = Window {
        prev: Fields::new(&traj.states[idx - 1], power)?,
        cur: Fields::new(&traj.states[idx], power)?,
        next: Fields::new(&traj.states[idx + 1], power)?,
    };
    Ok(specs
        .iter()
        .map(|spec| {
            let terms = if spec.equation.is_spatial() {
                spatial_terms(spec, &window.cur)
            } else {
                window_terms(spec, &window, power)
            };
            measure(spec, &window.cur, &terms)
        })
        .collect())
}

/// Recorded indices nearest to `samples` evenly spaced interior times.
pub fn sample_indices(traj: &Trajectory, samples: usize) -> Vec<usize> {
    let times = traj.times();
    let last = times.len() - 1;
    let t_end = times[last];
    let mut idx: Vec<usize> = (1..=samples)
        .map(|j| {
            let target = t_end * j as f64 / (samples + 1) as f64;
            let k = times.partition_point(|&t| t < target).min(last);
            let k = if k > 0 && target - times[k - 1] < times[k] - target {
                k - 1
            } else {
                k
            };
            k.clamp(1, last - 1)
        })
        .collect();
    idx.dedup();
    idx
}

/// Residuals of every spec at the sampled times, in time order.
pub fn evaluate_trajectory(
    traj: &Trajectory,
    specs: &[ResidualSpec],
    opts: &ResidualOptions,
) -> Result<Vec<ResidualReport>> {
    require_plain(traj)?;
    let idx = sample_indices(traj, opts.samples);
    let per: Vec<Result<Vec<ResidualReport>>> =
        par::map(opts.exec, &idx, |&k| residuals_at(traj, k, specs, opts.power));
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderVerdict {
    Pass,
    Inconclusive,
    Discrepancy,
}

impl OrderVerdict {
    pub fn name(self) -> &'static str {
        match self {
            OrderVerdict::Pass => "pass",
            OrderVerdict::Inconclusive => "inconclusive",
            OrderVerdict::Discrepancy => "discrepancy",
        }
    }
}

/// Outcome of a three-grid refinement study for one spec.
#[derive(Debug, Clone, Serialize)]
pub struct OrderRow {
    pub spec: ResidualSpec,
    pub equation: String,
    /// Intervals of the three grids, coarse to fine.
    pub grids: [usize; 3],
    /// Largest sampled residual on each grid.
    pub max_residual: [f64; 3],
    /// Mean over sample times of `log₂(r(M)/r(2M))` for the coarse and fine pair.
    pub order_coarse: f64,
    pub order_fine: f64,
    /// `min(order_coarse, order_fine)`; NaN when every residual is roundoff.
    pub observed_order: f64,
    pub verdict: OrderVerdict,
}

impl OrderRow {
    /// Whether the numerical verdict agrees with the symbolic oracle.
    pub fn agrees_with_oracle(&self) -> bool {
        (self.verdict == OrderVerdict::Pass) == self.spec.oracle_holds
    }
}

/// Observed orders from residuals sampled at matching times on grids `M`,
/// `2M`, `4M`. Non-monotone decay yields an inconclusive verdict.
pub fn convergence_order(spec: ResidualSpec, grids: [usize; 3], residuals: [&[f64]; 3]) -> Result<OrderRow> {
    let len = residuals[0].len();
    if len == 0 || residuals.iter().any(|r| r.len() != len) {
        return Err(Error::Shape {
            expected: len,
            got: residuals.iter().map(|r| r.len()).find(|&l| l != len).unwrap_or(0),
        });
    }
    let max = |r: &[f64]| r.iter().cloned().fold(0.0, f64::max);
    let max_residual = [max(residuals[0]), max(residuals[1]), max(residuals[2])];
    let mean_log = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x / y).log2()).sum::<f64>() / len as f64;
    let order_coarse = mean_log(residuals[0], residuals[1]);
    let order_fine = mean_log(residuals[1], residuals[2]);
    let (observed_order, verdict) = if max_residual.iter().all(|&r| r <= ROUNDOFF_RESIDUAL) {
        (f64::NAN, OrderVerdict::Pass)
    } else {
        let order = order_coarse.min(order_fine);
        let monotone = (0..len).all(|j| residuals[0][j] > residuals[1][j] && residuals[1][j] > residuals[2][j]);
        let verdict = if order_fine < DISCREPANCY_ORDER {
            OrderVerdict::Discrepancy
        } else if monotone && order >= PASS_ORDER {
            OrderVerdict::Pass
        } else {
            OrderVerdict::Inconclusive
        };
        (order, verdict)
    };
    Ok(OrderRow {
        spec,
        equation: spec.key(),
        grids,
        max_residual,
        order_coarse,
        order_fine,
        observed_order,
        verdict,
    })
}

/// The three configurations of a refinement study: `M/4`, `M/2`, `M`, all
/// recording every step so that time differences see the step size.
pub fn refinement_configs(base: &FlowConfig) -> Result<[FlowConfig; 3]> {
    if !base.intervals.is_multiple_of(4) {
        return Err(Error::config(
            "M",
            format!("refinement study needs M divisible by 4, got {}", base.intervals),
        ));
    }
    let mk = |m: usize| FlowConfig {
        intervals: m,
        record_every: 1,
        ..base.clone()
    };
    Ok([mk(base.intervals / 4), mk(base.intervals / 2), mk(base.intervals)])
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderStudy {
    pub grids: [usize; 3],
    /// Sampled residuals on all three grids, coarse grid first.
    pub reports: Vec<ResidualReport>,
    pub orders: Vec<OrderRow>,
}

impl OrderStudy {
    pub fn row(&self, key: &str) -> Option<&OrderRow> {
        self.orders.iter().find(|r| r.equation == key)
    }

    /// Reports on the finest grid.
    pub fn finest(&self) -> impl Iterator<Item = &ResidualReport> {
        let m = self.grids[2];
        self.reports.iter().filter(move |r| r.m == m)
    }
}

/// Runs the three trajectories of a refinement study and compares residuals
/// sampled at the same fractions of `t_end`.
pub fn order_study(base: &FlowConfig, opts: &ResidualOptions) -> Result<OrderStudy> {
    order_study_with(base, &catalog(base.n), opts)
}

/// [`order_study`] over an explicit list of specs.
pub fn order_study_with(base: &FlowConfig, specs: &[ResidualSpec], opts: &ResidualOptions) -> Result<OrderStudy> {
    let configs = refinement_configs(base)?;
    let mut per_grid = Vec::with_capacity(3);
    for cfg in &configs {
        let traj = evolve(cfg).map_err(|f| f.error)?;
        per_grid.push(evaluate_trajectory(&traj, specs, opts)?);
    }
    let grids = [configs[0].intervals, configs[1].intervals, configs[2].intervals];
    study_from_reports(specs, grids, per_grid)
}

/// Assembles an [`OrderStudy`] from per-grid reports produced by
/// [`evaluate_trajectory`] with the same specs and sample count.
pub fn study_from_reports(
    specs: &[ResidualSpec],
    grids: [usize; 3],
    per_grid: Vec<Vec<ResidualReport>>,
) -> Result<OrderStudy> {
    let series = |g: usize, key: &str| -> Vec<f64> {
        per_grid[g]
            .iter()
            .filter(|r| r.equation == key)
            .map(|r| r.max_residual)
            .collect()
    };
    let orders = specs
        .iter()
        .map(|spec| {
            let key = spec.key();
            let (a, b, c) = (series(0, &key), series(1, &key), series(2, &key));
            convergence_order(*spec, grids, [&a, &b, &c])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderStudy {
        grids,
        reports: per_grid.into_iter().flatten().collect(),
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_config;

    fn spec() -> ResidualSpec {
        ResidualSpec::new(
            crate::residuals::Equation::PsiHeat,
            crate::residuals::Form::Printed,
            true,
        )
    }

    fn order_of(rate: f64) -> OrderRow {
        let r0 = [1e-2, 2e-2, 3e-2];
        let r1: Vec<f64> = r0.iter().map(|r| r / rate).collect();
        let r2: Vec<f64> = r1.iter().map(|r| r / rate).collect();
        convergence_order(spec(), [64, 128, 256], [&r0, &r1, &r2]).unwrap()
    }

    #[test]
    fn verdicts_follow_the_observed_order() {
        let second = order_of(4.0);
        assert!((second.observed_order - 2.0).abs() < 1e-12);
        assert_eq!(second.verdict, OrderVerdict::Pass);
        assert_eq!(order_of(2.0).verdict, OrderVerdict::Inconclusive);
        assert_eq!(order_of(1.0).verdict, OrderVerdict::Discrepancy);
        let tiny = [1e-12; 3];
        let row = convergence_order(spec(), [64, 128, 256], [&tiny, &tiny, &tiny]).unwrap();
        assert_eq!(row.verdict, OrderVerdict::Pass);
        assert!(row.observed_order.is_nan());
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let a = [1.0, 2.0];
        let b = [1.0];
        assert!(matches!(
            convergence_order(spec(), [1, 2, 4], [&a, &a, &b]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn refinement_needs_multiple_of_four() {
        let mut c = parse_config("preset=hyperbolic\nM=130").unwrap();
        assert!(refinement_configs(&c).unwrap_err().is_config());
        c.intervals = 128;
        let cfgs = refinement_configs(&c).unwrap();
        assert_eq!(cfgs.each_ref().map(|c| c.intervals), [32, 64, 128]);
        assert!(cfgs.iter().all(|c| c.record_every == 1));
    }

    #[test]
    fn samples_are_interior_and_ordered() {
        let c = parse_config("preset=hyperbolic\nM=64\nt_end=0.05\nrecord_every=1").unwrap();
        let traj = evolve(&c).unwrap();
        let idx = sample_indices(&traj, 8);
        assert_eq!(idx.len(), 8);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(idx[0] >= 1 && *idx.last().unwrap() < traj.states.len() - 1);
        assert!(matches!(
            residuals_at(&traj, 0, &catalog(2), DEFAULT_POWER),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn modified_runs_are_refused() {
        let c = parse_config("preset=hyperbolic\nM=64\nt_end=0.01\nrecord_every=1\nmodified=true").unwrap();
        let traj = evolve(&c).unwrap();
        assert!(matches!(
            evaluate_trajectory(&traj, &catalog(2), &ResidualOptions::default()),
            Err(Error::Contract(_))
        ));
    }
}
