use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Profile;
use crate::io::initial_profile;

use super::config::{FlowConfig, OuterBc};
use super::exact::ExactFamily;
use super::rhs::{gauged_rates, subtract_normalization, FlowState, Rates};

/// Curvature magnitude treated as numerical blow-up.
pub const BLOW_UP_CURVATURE: f64 = 1e6;

/// Mirror values just left of the origin, at `x = -x_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginGhost {
    pub x: f64,
    pub psi: f64,
    pub phi: f64,
}

/// Pins `ψ(0) = 0` and returns the odd/even ghost values across the origin.
pub fn apply_origin_bc(profile: &Profile) -> (Profile, OriginGhost) {
    let mut out = profile.clone();
    let x1 = profile.grid().nodes()[1];
    {
        let (_, psi) = out.fields_mut();
        psi[0] = 0.0;
    }
    let ghost = OriginGhost {
        x: -x1,
        psi: -out.psi()[1],
        phi: out.phi()[1],
    };
    (out, ghost)
}

/// Everything besides the state that the time stepper needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowProblem {
    pub outer_bc: OuterBc,
    pub modified: bool,
    /// Self-similar family used by the Dirichlet boundary.
    pub exact: ExactFamily,
}

impl FlowProblem {
    /// Boundary family fixed by `λ = φ(L, 0)`.
    pub fn new(initial: &Profile, outer_bc: OuterBc, modified: bool) -> Self {
        let lambda = initial.phi()[initial.len() - 1];
        FlowProblem {
            outer_bc,
            modified,
            exact: ExactFamily::new(initial.n(), lambda * lambda, modified),
        }
    }

    pub fn from_config(config: &FlowConfig, initial: &Profile) -> Self {
        FlowProblem::new(initial, config.outer_bc, config.modified)
    }

    /// Whether a Dirichlet boundary disagrees with the initial data at `x = L`.
    pub fn boundary_mismatch(&self, initial: &Profile) -> bool {
        if self.outer_bc != OuterBc::DirichletExactHyperbolic {
            return false;
        }
        let m = initial.len() - 1;
        let l = initial.grid().length();
        let expect = self.exact.psi(l, 0.0);
        (initial.psi()[m] - expect).abs() > 1e-9 * expect.abs()
    }

    fn rates(&self, state: &FlowState) -> Result<Rates> {
        let p = &state.profile;
        let m = p.len() - 1;
        let g = gauged_rates(p)?;
        let mut r = g.rates;
        match self.outer_bc {
            OuterBc::ExtrapolateZeroCurvatureGradient => {
                // ∂_t log ψ = -(K₀ + (n-1)K₁) copied from the inner neighbour;
                // the gauge transport vanishes at x = L
                let psi = p.psi();
                r.psi[m] = g.raw_psi[m - 1] / psi[m - 1] * psi[m];
            }
            OuterBc::DirichletExactHyperbolic => {
                // pinned on every stage; the rate only feeds the stage update
                let l = p.grid().length();
                let h = 1e-6 * (1.0 + state.t);
                let t0 = (state.t - h).max(0.0);
                let t1 = state.t + h;
                r.psi[m] = (self.exact.psi(l, t1) - self.exact.psi(l, t0)) / (t1 - t0);
            }
        }
        if self.modified {
            subtract_normalization(p, &mut r.psi, &mut r.phi);
        }
        Ok(r)
    }

    /// Imposes `ψ(0) = 0` and, when selected, the Dirichlet value at `x = L`.
    fn pin(&self, profile: &mut Profile, t: f64) {
        let m = profile.len() - 1;
        let l = profile.grid().length();
        let exact = self.exact;
        let bc = self.outer_bc;
        let (_, psi) = profile.fields_mut();
        psi[0] = 0.0;
        if bc == OuterBc::DirichletExactHyperbolic {
            psi[m] = exact.psi(l, t);
        }
    }
}

/// Applies the outer boundary condition at time `state.t`. The Dirichlet
/// option overwrites the node at `x = L` with the exact family; the
/// extrapolating option acts through the boundary rates and leaves values as they are.
pub fn apply_outer_bc(state: &FlowState, config: &FlowConfig, initial: &Profile) -> Profile {
    let problem = FlowProblem::from_config(config, initial);
    let mut p = state.profile.clone();
    problem.pin(&mut p, state.t);
    p
}

/// `dt = cfl · min_i (φ Δx)²` over cells, with the smaller `φ` of each cell.
pub fn stable_dt(state: &FlowState, cfl: f64) -> Result<f64> {
    let x = state.profile.grid().nodes();
    let phi = state.profile.phi();
    let mut scale = f64::INFINITY;
    for i in 0..x.len() - 1 {
        let h = phi[i].min(phi[i + 1]) * (x[i + 1] - x[i]);
        scale = scale.min(h * h);
    }
    let dt = cfl * scale;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::DegenerateMetric {
            node: 0,
            message: format!("non-positive stable time step {dt}"),
        });
    }
    Ok(dt)
}

fn axpy(base: &Profile, dt: f64, k: &Rates) -> Profile {
    let mut p = base.clone();
    let (phi, psi) = p.fields_mut();
    for i in 0..psi.len() {
        psi[i] += dt * k.psi[i];
        phi[i] += dt * k.phi[i];
    }
    p
}

fn check_blow_up(profile: &Profile, t: f64) -> Result<()> {
    for (i, (&p, &f)) in profile.psi().iter().zip(profile.phi()).enumerate() {
        if !p.is_finite() || !f.is_finite() {
            return Err(Error::BlowUp {
                node: i,
                t,
                reason: "non-finite metric value".into(),
            });
        }
        if i > 0 && p <= 0.0 {
            return Err(Error::BlowUp {
                node: i,
                t,
                reason: format!("psi = {p} <= 0"),
            });
        }
        if f <= 0.0 {
            return Err(Error::BlowUp {
                node: i,
                t,
                reason: format!("phi = {f} <= 0"),
            });
        }
    }
    Ok(())
}

fn blow_up_from(err: Error, t: f64) -> Error {
    match err {
        Error::DegenerateMetric { node, message } => Error::BlowUp {
            node,
            t,
            reason: message,
        },
        other => other,
    }
}

/// One classical RK4 step with the boundary conditions imposed on every stage.
pub fn step(state: &FlowState, dt: f64, problem: &FlowProblem) -> Result<FlowState> {
    let t = state.t;
    let eval = |p: &Profile, tt: f64| -> Result<Rates> {
        let s = FlowState {
            t: tt,
            profile: p.clone(),
        };
        let r = problem.rates(&s).map_err(|e| blow_up_from(e, tt))?;
        if r.max_abs_k0.0 > BLOW_UP_CURVATURE || !r.max_abs_k0.0.is_finite() {
            return Err(Error::BlowUp {
                node: r.max_abs_k0.1,
                t: tt,
                reason: format!("|K0| = {:e} exceeds {:e}", r.max_abs_k0.0, BLOW_UP_CURVATURE),
            });
        }
        Ok(r)
    };
    let base = &state.profile;
    let k1 = eval(base, t)?;
    let mut y2 = axpy(base, 0.5 * dt, &k1);
    problem.pin(&mut y2, t + 0.5 * dt);
    let k2 = eval(&y2, t + 0.5 * dt)?;
    let mut y3 = axpy(base, 0.5 * dt, &k2);
    problem.pin(&mut y3, t + 0.5 * dt);
    let k3 = eval(&y3, t + 0.5 * dt)?;
    let mut y4 = axpy(base, dt, &k3);
    problem.pin(&mut y4, t + dt);
    let k4 = eval(&y4, t + dt)?;

    let mut next = base.clone();
    {
        let (phi, psi) = next.fields_mut();
        let w = dt / 6.0;
        for i in 0..psi.len() {
            psi[i] += w * (k1.psi[i] + 2.0 * k2.psi[i] + 2.0 * k3.psi[i] + k4.psi[i]);
            phi[i] += w * (k1.phi[i] + 2.0 * k2.phi[i] + 2.0 * k3.phi[i] + k4.phi[i]);
        }
    }
    problem.pin(&mut next, t + dt);
    check_blow_up(&next, t + dt)?;
    Ok(FlowState {
        t: t + dt,
        profile: next,
    })
}

/// A recorded run: states in increasing time on a single grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
    pub config: FlowConfig,
    pub boundary_mismatch: bool,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &FlowState {
        self.states.last().expect("trajectory holds at least its initial state")
    }
}

/// A blow-up or other failure mid-run, with everything recorded up to it.
#[derive(Debug)]
pub struct EvolveFailure {
    pub error: Error,
    pub partial: Option<Trajectory>,
}

impl fmt::Display for EvolveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for EvolveFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<Error> for EvolveFailure {
    fn from(error: Error) -> Self {
        EvolveFailure { error, partial: None }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvolveOptions {
    /// Fixed step size, bypassing the stability bound.
    pub force_dt: Option<f64>,
}

/// Steps a flow forward one adaptive step at a time.
pub struct Integrator {
    pub problem: FlowProblem,
    pub state: FlowState,
    pub cfl: f64,
    pub t_end: f64,
    pub steps: usize,
    pub options: EvolveOptions,
}

impl Integrator {
    pub fn new(config: &FlowConfig, initial: Profile, options: EvolveOptions) -> Result<Self> {
        config.validate()?;
        let problem = FlowProblem::from_config(config, &initial);
        let state = FlowState::new(0.0, initial)?;
        Ok(Integrator {
            problem,
            state,
            cfl: config.cfl,
            t_end: config.t_end,
            steps: 0,
            options,
        })
    }

    pub fn done(&self) -> bool {
        self.state.t >= self.t_end
    }

    /// Advances by `min(stable_dt, t_end - t)`; the final step lands exactly on `t_end`.
    pub fn advance(&mut self) -> Result<()> {
        let mut dt = match self.options.force_dt {
            Some(dt) => dt,
            None => stable_dt(&self.state, self.cfl)?,
        };
        let remaining = self.t_end - self.state.t;
        let last = dt >= remaining * (1.0 - 1e-12);
        if last {
            dt = remaining;
        }
        let mut next = step(&self.state, dt, &self.problem)?;
        if last {
            next.t = self.t_end;
        }
        self.state = next;
        self.steps += 1;
        Ok(())
    }
}

/// Integrates `config` from its preset to `t_end`, recording every
/// `record_every` steps plus the initial and final states. `observer` sees
/// every state, recorded or not.
pub fn evolve_with(
    config: &FlowConfig,
    initial: Profile,
    options: EvolveOptions,
    mut observer: impl FnMut(&FlowState),
) -> Result<Trajectory, EvolveFailure> {
    let mut integ = Integrator::new(config, initial, options)?;
    let boundary_mismatch = integ.problem.boundary_mismatch(&integ.state.profile);
    observer(&integ.state);
    let mut states = vec![integ.state.clone()];
    while !integ.done() {
        if let Err(error) = integ.advance() {
            return Err(EvolveFailure {
                error,
                partial: Some(Trajectory {
                    states,
                    config: config.clone(),
                    boundary_mismatch,
                    steps: integ.steps,
                }),
            });
        }
        observer(&integ.state);
        if integ.steps % config.record_every == 0 || integ.done() {
            states.push(integ.state.clone());
        }
    }
    Ok(Trajectory {
        states,
        config: config.clone(),
        boundary_mismatch,
        steps: integ.steps,
    })
}

pub fn evolve(config: &FlowConfig) -> Result<Trajectory, EvolveFailure> {
    let initial = initial_profile(config)?;
    evolve_with(config, initial, EvolveOptions::default(), |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_config;

    #[test]
    fn hyperbolic_run_tracks_exact_family() {
        let cfg = parse_config("preset=hyperbolic\nM=128\nt_end=0.25\nrecord_every=1000").unwrap();
        let traj = evolve(&cfg).unwrap();
        let last = traj.last();
        assert_eq!(last.t, 0.25);
        let exact = ExactFamily::new(2, 1.0, false);
        let x = last.profile.grid().nodes();
        for i in 1..x.len() {
            if x[i] <= 5.0 {
                let e = exact.psi(x[i], 0.25);
                assert!(((last.profile.psi()[i] - e) / e).abs() < 1e-3, "node {i}");
            }
        }
        assert!(!traj.boundary_mismatch);
    }

    #[test]
    fn records_initial_final_and_every_kth() {
        let cfg = parse_config("preset=hyperbolic\nM=64\nt_end=0.02\nrecord_every=5").unwrap();
        let mut seen = 0;
        let traj = evolve_with(&cfg, initial_profile(&cfg).unwrap(), EvolveOptions::default(), |_| {
            seen += 1
        })
        .unwrap();
        assert_eq!(seen, traj.steps + 1);
        assert_eq!(traj.states.len(), 1 + traj.steps.div_ceil(5));
        assert!(traj.times().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn oversized_step_blows_up_with_partial_trajectory() {
        let cfg = parse_config("preset=hyperbolic\nM=128\nt_end=1").unwrap();
        let err = evolve_with(
            &cfg,
            initial_profile(&cfg).unwrap(),
            EvolveOptions { force_dt: Some(0.01) },
            |_| {},
        )
        .unwrap_err();
        assert!(err.error.is_blow_up(), "{}", err.error);
        assert_eq!(err.partial.unwrap().states[0].t, 0.0);
    }
}
