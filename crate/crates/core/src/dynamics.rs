//! Time evolution of the barotropic system in the shock frame, with the
//! dynamic shift co-integrated as an ODE.
//!
//! In the frame xi = x - sigma t the equations read
//!
//!   v_t = (sigma v + u)_xi,
//!   u_t = (sigma u - p(v))_xi + (mu u_xi / v)_xi,
//!
//! so the unshifted profile is a steady state. The spatial scheme is
//! conservative: first-order upwind for the sigma-advection (sigma > 0
//! fixes the direction), second-order central for the pressure and the
//! diffusion flux. Time stepping is a two-stage explicit midpoint update
//! for the hyperbolic terms followed by a backward treatment of the
//! diffusion linearized at the current v (one tridiagonal solve per step).
//!
//! The discrete right-hand side evaluated at the sampled profile is
//! subtracted from every stage. This makes the sampled profile a
//! machine-precision fixed point of the discrete flow (the subtracted
//! residual is the scheme's own truncation error at the profile and
//! vanishes under refinement), and it is what lets the zero-perturbation
//! run sit exactly still. For the v-equation the subtraction is
//! analytically zero: sigma v~ + u~ is constant across the wave.

use crate::error::{Error, Result};
use crate::functionals;
use crate::hugoniot::{self, Constants};
use crate::model::ModelParams;
use crate::profile::{self, ProfileSamples, ShockProfile};
use crate::quad::{compensated_sum, gradient, trapezoid};
use serde::{Deserialize, Serialize};

/// Uniform grid in the frame coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
    /// Node coordinates, n_cells + 1 of them.
    #[serde(skip)]
    pub x: Vec<f64>,
}

impl SimGrid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(Error::Config(format!("x_max {x_max} must exceed x_min {x_min}")));
        }
        if n_cells < 16 {
            return Err(Error::Config(format!("n_cells must be >= 16, got {n_cells}")));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let x = (0..=n_cells).map(|i| x_min + i as f64 * dx).collect();
        Ok(Self { x_min, x_max, n_cells, dx, x })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }
}

/// Initial perturbation shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationShape {
    /// exp(-(x-c)^2 / (2 w^2)); nonzero mass.
    Gaussian,
    /// Mollifier exp(1 - 1/(1-s^2)) on |s| < 1, s = (x-c)/w; compact support.
    Compact,
    Zero,
}

/// Perturbation added on top of the profile at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub shape: PerturbationShape,
    pub amplitude_v: f64,
    pub amplitude_u: f64,
    pub center: f64,
    pub width: f64,
}

impl PerturbationSpec {
    pub fn zero() -> Self {
        Self {
            shape: PerturbationShape::Zero,
            amplitude_v: 0.0,
            amplitude_u: 0.0,
            center: 0.0,
            width: 1.0,
        }
    }

    fn shape_at(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        match self.shape {
            PerturbationShape::Gaussian => (-0.5 * s * s).exp(),
            PerturbationShape::Compact => {
                if s.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
            PerturbationShape::Zero => 0.0,
        }
    }

    pub fn value_v(&self, x: f64) -> f64 {
        self.amplitude_v * self.shape_at(x)
    }

    pub fn value_u(&self, x: f64) -> f64 {
        self.amplitude_u * self.shape_at(x)
    }
}

/// Output cadence for diagnostics records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cadence {
    /// Tick every k time steps; tick spacing scales with dt under refinement.
    Steps(u64),
    /// Tick when t crosses each multiple of the period.
    Time(f64),
}

/// Full configuration of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub v_plus: f64,
    pub u_plus: f64,
    pub delta_v: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub cfl_number: f64,
    pub t_end: f64,
    pub cadence: Cadence,
    pub perturbation: PerturbationSpec,
    pub seed: u64,
    pub profile_n_samples: usize,
    pub profile_tol: f64,
    /// Snapshot period in time units; 0 disables snapshots.
    pub snapshot_every: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            return Err(Error::Config(format!(
                "cfl_number must lie in (0, 1], got {}",
                self.cfl_number
            )));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.delta_v > 0.0 && self.delta_v < self.v_plus) {
            return Err(Error::Config(format!(
                "delta_v must lie in (0, v_plus), got {}",
                self.delta_v
            )));
        }
        if !(self.perturbation.width > 0.0) {
            return Err(Error::Config("perturbation width must be positive".into()));
        }
        match self.cadence {
            Cadence::Steps(k) if k == 0 => {
                return Err(Error::Config("output cadence in steps must be >= 1".into()))
            }
            Cadence::Time(p) if !(p > 0.0) => {
                return Err(Error::Config("output period must be positive".into()))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Fields on the grid plus the shift state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    /// Accumulated shift X(t).
    pub x_shift: f64,
    /// Current shift rate.
    pub x_dot: f64,
}

/// Build the initial state v = v~ + perturbation, u = u~ + perturbation,
/// X(0) = 0, and report the H1 size of the perturbation.
pub fn initial_data(
    profile: &ShockProfile,
    spec: &PerturbationSpec,
    grid: &SimGrid,
) -> Result<(SimState, f64)> {
    let base = profile.eval_shifted(&grid.x, 0.0);
    let n = grid.n_nodes();
    let mut v = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let mut du = vec![0.0; n];
    for i in 0..n {
        dv[i] = spec.value_v(grid.x[i]);
        du[i] = spec.value_u(grid.x[i]);
        v[i] = base.v_tilde[i] + dv[i];
        u[i] = base.u_tilde[i] + du[i];
        if !(v[i] > 0.0) {
            return Err(Error::InvalidData(format!(
                "perturbation drives v <= 0 at x = {}: v = {}",
                grid.x[i], v[i]
            )));
        }
    }
    let edge = dv[0].abs().max(dv[n - 1].abs()).max(du[0].abs()).max(du[n - 1].abs());
    if edge > 1e-12 {
        return Err(Error::InvalidData(format!(
            "perturbation does not decay at the boundary: |edge value| = {edge:e}"
        )));
    }
    let h1 = h1_norm(&dv, grid.dx) + h1_norm(&du, grid.dx);
    Ok((
        SimState { t: 0.0, v, u, x_shift: 0.0, x_dot: 0.0 },
        h1,
    ))
}

fn h1_norm(f: &[f64], dx: f64) -> f64 {
    let fx = gradient(f, dx);
    let l2sq = trapezoid(&f.iter().map(|a| a * a).collect::<Vec<_>>(), dx);
    let dsq = trapezoid(&fx.iter().map(|a| a * a).collect::<Vec<_>>(), dx);
    (l2sq + dsq).sqrt()
}

/// Shift rate from the two profile-weighted velocity integrals, with the
/// same quadrature the ledger uses.
pub fn shift_rate(
    state: &SimState,
    grid: &SimGrid,
    profile: &ShockProfile,
    constants: &Constants,
) -> f64 {
    let shifted = profile.eval_shifted(&grid.x, state.x_shift);
    shift_rate_from_samples(&state.u, &shifted, grid.dx, profile, constants)
}

pub(crate) fn shift_rate_from_samples(
    u: &[f64],
    shifted: &ProfileSamples,
    dx: f64,
    profile: &ShockProfile,
    constants: &Constants,
) -> f64 {
    let (y1, y2) = functionals::y1_y2(u, shifted, dx, profile.ends.sigma);
    -(constants.m_shift / profile.ends.delta) * (y1 + y2)
}

/// Stable step for the explicit hyperbolic update. Diffusion is implicit,
/// so no dx^2 restriction enters.
pub fn cfl_dt(state: &SimState, grid: &SimGrid, cfl_number: f64, params: &ModelParams, sigma: f64) -> Result<f64> {
    if !(cfl_number > 0.0 && cfl_number <= 1.0) {
        return Err(Error::Usage(format!("cfl_number must lie in (0, 1], got {cfl_number}")));
    }
    let mut max_c = 0.0_f64;
    for &v in &state.v {
        let c = params.gamma * params.b * v.powf(-params.gamma - 1.0);
        max_c = max_c.max(c);
    }
    Ok(cfl_number * grid.dx / (sigma + max_c.sqrt()))
}

/// Conservation bookkeeping for one step: total v-mass change and the
/// (sigma v + u) fluxes at the two boundary interfaces of the final update.
#[derive(Debug, Clone, Copy)]
pub struct StepReport {
    pub mass_before: f64,
    pub mass_after: f64,
    pub flux_left: f64,
    pub flux_right: f64,
    pub dt: f64,
}

/// One step of the frame solver; owns the profile baseline.
pub struct Stepper<'a> {
    pub profile: &'a ShockProfile,
    pub constants: Constants,
    pub grid: &'a SimGrid,
    params: ModelParams,
    sigma: f64,
    base_u: Vec<f64>,
    base_rhs_v: Vec<f64>,
    base_rhs_u: Vec<f64>,
    base_diff: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(profile: &'a ShockProfile, constants: Constants, grid: &'a SimGrid) -> Result<Self> {
        if grid.x_min > profile.xi[0] || grid.x_max < *profile.xi.last().unwrap() {
            return Err(Error::Config(format!(
                "grid [{}, {}] does not contain the profile window [{}, {}]",
                grid.x_min,
                grid.x_max,
                profile.xi[0],
                profile.xi.last().unwrap()
            )));
        }
        let base = profile.eval_shifted(&grid.x, 0.0);
        let params = profile.params;
        let sigma = profile.ends.sigma;
        let n = grid.n_nodes();
        let mut base_rhs_v = vec![0.0; n];
        let mut base_rhs_u = vec![0.0; n];
        hyperbolic_rhs(
            &params,
            sigma,
            grid.dx,
            &base.v_tilde,
            &base.u_tilde,
            &mut base_rhs_v,
            &mut base_rhs_u,
        );
        let base_diff = apply_diffusion(&params, grid.dx, &base.u_tilde, &base.v_tilde);
        Ok(Self {
            profile,
            constants,
            grid,
            params,
            sigma,
            base_u: base.u_tilde,
            base_rhs_v,
            base_rhs_u,
            base_diff,
        })
    }

    /// Advance the state by dt. The shift rate is evaluated once, from the
    /// beginning-of-step state.
    pub fn advance(&self, state: &mut SimState, dt: f64) -> Result<StepReport> {
        let n = self.grid.n_nodes();
        let dx = self.grid.dx;

        let x_dot = shift_rate(state, self.grid, self.profile, &self.constants);

        let mass_before = compensated_sum(state.v[1..n - 1].iter().copied()) * dx;

        // Stage 1: midpoint predictor for the hyperbolic part.
        let mut rv = vec![0.0; n];
        let mut ru = vec![0.0; n];
        hyperbolic_rhs(&self.params, self.sigma, dx, &state.v, &state.u, &mut rv, &mut ru);
        let mut v1 = state.v.clone();
        let mut u1 = state.u.clone();
        let half = 0.5 * dt;
        for i in 1..n - 1 {
            v1[i] = state.v[i] + half * (rv[i] - self.base_rhs_v[i]);
            u1[i] = state.u[i] + half * (ru[i] - self.base_rhs_u[i]);
        }

        // Stage 2: full step with midpoint fluxes.
        hyperbolic_rhs(&self.params, self.sigma, dx, &v1, &u1, &mut rv, &mut ru);
        let mut v2 = state.v.clone();
        let mut u2 = state.u.clone();
        for i in 1..n - 1 {
            v2[i] = state.v[i] + dt * (rv[i] - self.base_rhs_v[i]);
            u2[i] = state.u[i] + dt * (ru[i] - self.base_rhs_u[i]);
        }

        for (i, &v) in v2.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::Vacuum(format!(
                    "v = {v} at x = {} (t = {})",
                    self.grid.x[i],
                    state.t + dt
                )));
            }
        }

        // Backward diffusion solve for w = u_new - u~; the right-hand side
        // vanishes identically when the state sits on the profile.
        let diff_base_at_v2 = apply_diffusion(&self.params, dx, &self.base_u, &v2);
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            rhs[i] = (u2[i] - self.base_u[i]) + dt * (diff_base_at_v2[i] - self.base_diff[i]);
        }
        let w = solve_diffusion_tridiag(&self.params, dx, dt, &v2, &rhs);
        let mut u_new = u2;
        for i in 1..n - 1 {
            u_new[i] = self.base_u[i] + w[i];
        }

        // Boundary interface fluxes of (sigma v + u) for the conservation
        // report, from the stage state the final v-update used.
        let flux_left = self.sigma * v1[1] + u1[1];
        let flux_right = self.sigma * v1[n - 1] + u1[n - 1];

        let mass_after = compensated_sum(v2[1..n - 1].iter().copied()) * dx;

        state.v = v2;
        state.u = u_new;
        state.x_dot = x_dot;
        state.x_shift += dt * x_dot;
        state.t += dt;

        Ok(StepReport { mass_before, mass_after, flux_left, flux_right, dt })
    }
}

// Conservative hyperbolic right-hand side.
//   v-flux at i+1/2:  sigma v_{i+1} + u_{i+1}        (matched upwind pair)
//   u-flux at i+1/2:  sigma u_{i+1} - (p_i + p_{i+1})/2
// Boundary nodes are Dirichlet and get zero right-hand side.
fn hyperbolic_rhs(
    params: &ModelParams,
    sigma: f64,
    dx: f64,
    v: &[f64],
    u: &[f64],
    out_v: &mut [f64],
    out_u: &mut [f64],
) {
    let n = v.len();
    let inv_dx = 1.0 / dx;
    let gamma = params.gamma;
    let b = params.b;
    let mut p_prev = b * v[0].powf(-gamma);
    let mut p_here = b * v[1].powf(-gamma);
    out_v[0] = 0.0;
    out_u[0] = 0.0;
    out_v[n - 1] = 0.0;
    out_u[n - 1] = 0.0;
    for i in 1..n - 1 {
        let p_next = b * v[i + 1].powf(-gamma);
        let g_right = sigma * v[i + 1] + u[i + 1];
        let g_left = sigma * v[i] + u[i];
        let h_right = sigma * u[i + 1] - 0.5 * (p_here + p_next);
        let h_left = sigma * u[i] - 0.5 * (p_prev + p_here);
        out_v[i] = (g_right - g_left) * inv_dx;
        out_u[i] = (h_right - h_left) * inv_dx;
        p_prev = p_here;
        p_here = p_next;
    }
}

// Diffusion operator (mu u_x / v)_x in conservative form with harmonic-free
// arithmetic-mean interface volumes; zero at the boundary nodes.
fn apply_diffusion(params: &ModelParams, dx: f64, u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut out = vec![0.0; n];
    let coeff = params.mu / (dx * dx);
    for i in 1..n - 1 {
        let v_right = 0.5 * (v[i] + v[i + 1]);
        let v_left = 0.5 * (v[i - 1] + v[i]);
        out[i] = coeff * ((u[i + 1] - u[i]) / v_right - (u[i] - u[i - 1]) / v_left);
    }
    out
}

// Solve (I - dt L_v) w = rhs with w = 0 at both boundaries (Thomas).
fn solve_diffusion_tridiag(
    params: &ModelParams,
    dx: f64,
    dt: f64,
    v: &[f64],
    rhs: &[f64],
) -> Vec<f64> {
    let n = v.len();
    let m = n - 2; // interior unknowns
    let coeff = dt * params.mu / (dx * dx);
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut b = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        let v_right = 0.5 * (v[i] + v[i + 1]);
        let v_left = 0.5 * (v[i - 1] + v[i]);
        let a_r = coeff / v_right;
        let a_l = coeff / v_left;
        diag[k] = 1.0 + a_r + a_l;
        sub[k] = -a_l;
        sup[k] = -a_r;
        b[k] = rhs[i];
    }
    // Forward elimination.
    for k in 1..m {
        let w = sub[k] / diag[k - 1];
        diag[k] -= w * sup[k - 1];
        b[k] -= w * b[k - 1];
    }
    let mut w = vec![0.0; n];
    if m > 0 {
        w[m] = b[m - 1] / diag[m - 1];
        for k in (0..m - 1).rev() {
            w[k + 1] = (b[k] - sup[k] * w[k + 2]) / diag[k];
        }
    }
    w
}

/// Field snapshot together with the shifted profile it is compared to.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub v_tilde_shifted: Vec<f64>,
    pub u_tilde_shifted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Completed,
    /// Mid-run abort (vacuum or stability failure); partial output is kept.
    Aborted { kind: String, message: String },
}

/// Everything a finished (or aborted) run produces.
pub struct RunOutput {
    pub profile: ShockProfile,
    pub constants: Constants,
    pub grid: SimGrid,
    pub records: Vec<crate::functionals::DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: SimState,
    pub h1_initial: f64,
    pub dt: f64,
    pub steps: u64,
    pub status: RunStatus,
}

/// Execute a full scenario: solve the profile, build the initial data, and
/// step to t_end, emitting one diagnostics record per cadence tick.
///
/// The step size is frozen at the initial CFL value so tick spacing is
/// uniform; a per-step monitor verifies the frozen step still sits inside
/// the stability envelope of the evolving state and aborts if not. Output
/// is a deterministic function of the configuration.
pub fn run(config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let params = config.params;
    let ends = hugoniot::left_state_from_right(&params, config.v_plus, config.u_plus, config.delta_v)?;
    let constants = hugoniot::o1_constants(&params, &ends)?;
    let half = profile::default_half_length(&constants, &ends, config.profile_tol);
    let shock = profile::solve_profile(
        &params,
        &ends,
        &constants,
        half,
        config.profile_n_samples,
        config.profile_tol,
    )?;
    let grid = SimGrid::new(config.x_min, config.x_max, config.n_cells)?;
    let stepper = Stepper::new(&shock, constants, &grid)?;
    let (mut state, h1_initial) = initial_data(&shock, &config.perturbation, &grid)?;

    let dt = cfl_dt(&state, &grid, config.cfl_number, &params, ends.sigma)?;
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut status = RunStatus::Completed;

    let tick = |state: &mut SimState, records: &mut Vec<crate::functionals::DiagnosticsRecord>| {
        state.x_dot = shift_rate(state, &grid, &shock, &constants);
        records.push(crate::functionals::ledger(state, &grid, &shock, &constants));
    };
    let snap = |state: &SimState, snapshots: &mut Vec<Snapshot>| {
        let shifted = shock.eval_shifted(&grid.x, state.x_shift);
        snapshots.push(Snapshot {
            t: state.t,
            v: state.v.clone(),
            u: state.u.clone(),
            v_tilde_shifted: shifted.v_tilde,
            u_tilde_shifted: shifted.u_tilde,
        });
    };

    tick(&mut state, &mut records);
    if config.snapshot_every > 0.0 {
        snap(&state, &mut snapshots);
    }

    let mut steps: u64 = 0;
    let mut next_tick_time = match config.cadence {
        Cadence::Time(p) => p,
        Cadence::Steps(_) => f64::INFINITY,
    };
    let mut next_snap_time = config.snapshot_every;
    let mut ticked_at_end = false;

    while state.t < config.t_end - 1e-12 * config.t_end {
        let step_dt = dt.min(config.t_end - state.t);
        // Stability monitor: the frozen step must stay inside the cfl = 1
        // envelope of the evolving state. Wave speeds drift on O(1) time
        // scales, so checking every 8 steps is as good as every step.
        if steps % 8 == 0 {
            let envelope = cfl_dt(&state, &grid, 1.0, &params, ends.sigma)?;
            if dt > envelope {
                status = RunStatus::Aborted {
                    kind: "solver_failure".into(),
                    message: format!(
                        "frozen step {dt} left the stability envelope {envelope} at t = {}",
                        state.t
                    ),
                };
                break;
            }
        }
        match stepper.advance(&mut state, step_dt) {
            Ok(_) => {}
            Err(Error::Vacuum(msg)) => {
                status = RunStatus::Aborted { kind: "vacuum".into(), message: msg };
                break;
            }
            Err(e) => return Err(e),
        }
        steps += 1;
        ticked_at_end = false;
        let due = match config.cadence {
            Cadence::Steps(k) => steps % k == 0,
            Cadence::Time(_) => state.t >= next_tick_time - 1e-12,
        };
        if due {
            if let Cadence::Time(p) = config.cadence {
                next_tick_time += p;
            }
            tick(&mut state, &mut records);
            ticked_at_end = true;
        }
        if config.snapshot_every > 0.0 && state.t >= next_snap_time - 1e-12 {
            next_snap_time += config.snapshot_every;
            snap(&state, &mut snapshots);
        }
    }

    if !ticked_at_end {
        tick(&mut state, &mut records);
    }
    if records.len() >= 3 {
        crate::functionals::energy_identity_residual(&mut records)?;
    }
    crate::functionals::apriori_fill(&mut records, ends.delta);

    Ok(RunOutput {
        profile: shock,
        constants,
        grid,
        records,
        snapshots,
        final_state: state,
        h1_initial,
        dt,
        steps,
        status,
    })
}
