//! Viscous shock profile: solve the traveling-wave ODE, verify its
//! structural properties, and build the weight function.
//!
//! Substituting the first traveling-wave relation u' = -sigma v' into the
//! momentum equation and integrating from the left far field reduces the
//! boundary-value problem to a scalar first-integral ODE,
//!
//!   dv/dxi = -(v / (mu sigma)) [ sigma^2 (v - v-) + p(v) - p(v-) ],
//!
//! whose right-hand side is positive strictly between the end states and
//! vanishes at both (the v+ root uses the jump relations exactly). The
//! profile is integrated outward from v(0) = (v- + v+)/2 in both
//! directions with an adaptive embedded Runge-Kutta pair.

use crate::error::{Error, Result};
use crate::hugoniot::{Constants, EndStates};
use crate::interp::Pchip;
use crate::model::ModelParams;
use crate::quad::linear_fit;
use std::io::Write;

/// The scalar first-integral right-hand side dv/dxi.
pub fn profile_rhs(params: &ModelParams, ends: &EndStates, v: f64) -> Result<f64> {
    if !(v >= ends.v_minus && v <= ends.v_plus) {
        return Err(Error::Domain(format!(
            "profile value {v} outside [{}, {}]",
            ends.v_minus, ends.v_plus
        )));
    }
    Ok(rhs_raw(params, ends, v))
}

// Unchecked evaluation; the formula is smooth slightly past the end states,
// which the integrator may touch at roundoff level.
fn rhs_raw(params: &ModelParams, ends: &EndStates, v: f64) -> f64 {
    let bracket = ends.sigma * ends.sigma * (v - ends.v_minus) + params.b * v.powf(-params.gamma)
        - params.b * ends.v_minus.powf(-params.gamma);
    -(v / (params.mu * ends.sigma)) * bracket
}

// d(rhs)/dv, used for the analytic second derivative of the profile.
fn rhs_raw_deriv(params: &ModelParams, ends: &EndStates, v: f64) -> f64 {
    let bracket = ends.sigma * ends.sigma * (v - ends.v_minus) + params.b * v.powf(-params.gamma)
        - params.b * ends.v_minus.powf(-params.gamma);
    let bracket_d =
        ends.sigma * ends.sigma - params.gamma * params.b * v.powf(-params.gamma - 1.0);
    -(bracket + v * bracket_d) / (params.mu * ends.sigma)
}

/// Default half-length of the profile window: generous multiple of the
/// exponential tail scale 1/(sigma_ell delta).
pub fn default_half_length(constants: &Constants, ends: &EndStates, tol: f64) -> f64 {
    30.0 / (constants.sigma_ell * ends.delta) * 1.0_f64.max(tol.ln().abs() / 10.0)
}

/// Sampled weight values a and a_x on the profile grid.
#[derive(Debug, Clone)]
pub struct WeightFn {
    pub a: Vec<f64>,
    pub a_x: Vec<f64>,
}

/// Profile quantities sampled at an arbitrary set of abscissae.
#[derive(Debug, Clone)]
pub struct ProfileSamples {
    pub v_tilde: Vec<f64>,
    pub u_tilde: Vec<f64>,
    pub v_tilde_x: Vec<f64>,
    pub u_tilde_x: Vec<f64>,
    pub u_tilde_xx: Vec<f64>,
    pub a: Vec<f64>,
    pub a_x: Vec<f64>,
    /// p'(v~) v~_x, interpolated as one quantity; the shift-rate and
    /// ledger integrands consume it so both see identical values.
    pub p_prime_v_x: Vec<f64>,
}

/// The viscous traveling wave on a uniform xi grid, with derivatives and
/// everything needed for shifted evaluation.
#[derive(Debug, Clone)]
pub struct ShockProfile {
    pub xi: Vec<f64>,
    pub v_tilde: Vec<f64>,
    pub u_tilde: Vec<f64>,
    pub v_tilde_x: Vec<f64>,
    pub u_tilde_x: Vec<f64>,
    pub u_tilde_xx: Vec<f64>,
    pub ends: EndStates,
    pub constants: Constants,
    pub params: ModelParams,
    /// |v(xi_first) - v-| and |v(xi_last) - v+|.
    pub far_field_misfit: (f64, f64),
    pub sqrt_delta: f64,
    interp_v: Pchip,
    interp_vx: Pchip,
    interp_vxx: Pchip,
    interp_pvx: Pchip,
}

struct AdaptiveOutcome {
    v: f64,
    h_next: f64,
}

// One Cash-Karp 4(5) step of the autonomous scalar ODE from v with step h
// (h may be negative). Returns (v5, error estimate).
fn ck_step(params: &ModelParams, ends: &EndStates, v: f64, h: f64) -> (f64, f64) {
    let f = |v: f64| rhs_raw(params, ends, v);
    let k1 = f(v);
    let k2 = f(v + h * (0.2 * k1));
    let k3 = f(v + h * (0.075 * k1 + 0.225 * k2));
    let k4 = f(v + h * (0.3 * k1 - 0.9 * k2 + 1.2 * k3));
    let k5 = f(v + h * (-11.0 / 54.0 * k1 + 2.5 * k2 - 70.0 / 27.0 * k3 + 35.0 / 27.0 * k4));
    let k6 = f(v
        + h * (1631.0 / 55296.0 * k1
            + 175.0 / 512.0 * k2
            + 575.0 / 13824.0 * k3
            + 44275.0 / 110592.0 * k4
            + 253.0 / 4096.0 * k5));
    let v5 = v + h * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 + 125.0 / 594.0 * k4
        + 512.0 / 1771.0 * k6);
    let v4 = v + h * (2825.0 / 27648.0 * k1
        + 18575.0 / 48384.0 * k3
        + 13525.0 / 55296.0 * k4
        + 277.0 / 14336.0 * k5
        + 0.25 * k6);
    (v5, (v5 - v4).abs())
}

// March from (xi0, v0) to xi1 with adaptive sub-steps.
fn march(
    params: &ModelParams,
    ends: &EndStates,
    mut v: f64,
    xi0: f64,
    xi1: f64,
    h_init: f64,
) -> Result<AdaptiveOutcome> {
    const RTOL: f64 = 1e-13;
    const ATOL: f64 = 1e-15;
    let span = xi1 - xi0;
    if span == 0.0 {
        return Ok(AdaptiveOutcome { v, h_next: h_init });
    }
    let dir = span.signum();
    let mut xi = xi0;
    let mut h = h_init.abs().max(1e-12) * dir;
    let mut remaining = (xi1 - xi).abs();
    while remaining > 0.0 {
        if h.abs() > remaining {
            h = remaining * dir;
        }
        let (v_new, err) = ck_step(params, ends, v, h);
        let scale = ATOL + RTOL * v.abs();
        if err <= scale {
            xi += h;
            v = v_new;
            remaining = (xi1 - xi).abs();
            let grow = if err > 0.0 { 0.9 * (scale / err).powf(0.2) } else { 5.0 };
            h *= grow.clamp(0.2, 5.0);
        } else {
            h *= (0.9 * (scale / err).powf(0.25)).clamp(0.2, 1.0);
        }
        if h.abs() < 1e-13 * (1.0 + xi.abs()) {
            return Err(Error::SolverFailure(format!(
                "step size underflow near xi = {xi}, v = {v}: equilibrium stagnation"
            )));
        }
    }
    Ok(AdaptiveOutcome { v, h_next: h })
}

// Find the abscissa (going right if `rightward`) at which the far-field
// misfit first drops below `tol`, capped at `limit`.
fn find_extent(
    params: &ModelParams,
    ends: &EndStates,
    v0: f64,
    rightward: bool,
    tol: f64,
    limit: f64,
) -> Result<f64> {
    let target = if rightward { ends.v_plus } else { ends.v_minus };
    let dir = if rightward { 1.0 } else { -1.0 };
    let mut xi = 0.0_f64;
    let mut v = v0;
    let mut h = 1e-3_f64;
    while (v - target).abs() > tol && xi.abs() < limit {
        let step = (h.abs()).min(limit - xi.abs());
        let out = march(params, ends, v, xi, xi + dir * step, h)?;
        v = out.v;
        xi += dir * step;
        h = out.h_next.abs().min(limit / 8.0).max(1e-6);
    }
    Ok(xi.abs())
}

/// Solve the traveling-wave problem on a uniform grid sized so that the
/// far-field misfit at both ends is at or below `tol` (when reachable
/// within `half_length`).
pub fn solve_profile(
    params: &ModelParams,
    ends: &EndStates,
    constants: &Constants,
    half_length: f64,
    n_samples: usize,
    tol: f64,
) -> Result<ShockProfile> {
    if n_samples < 64 {
        return Err(Error::Usage(format!("n_samples must be >= 64, got {n_samples}")));
    }
    if !(half_length > 0.0) || !(tol > 0.0) {
        return Err(Error::Usage("half_length and tol must be positive".into()));
    }
    let v_center = 0.5 * (ends.v_minus + ends.v_plus);

    let ext_r = find_extent(params, ends, v_center, true, tol, half_length)?;
    let ext_l = find_extent(params, ends, v_center, false, tol, half_length)?;

    // Uniform spacing with xi = 0 as a node; one node of margin on each
    // side keeps the end misfit strictly below tol.
    let dxi = (ext_l + ext_r) / (n_samples.saturating_sub(3)) as f64;
    let m_left = (ext_l / dxi).ceil() as usize + 1;
    let m_right = (ext_r / dxi).ceil() as usize + 1;

    let n = m_left + m_right + 1;
    let mut xi = vec![0.0; n];
    let mut v_tilde = vec![0.0; n];
    for (i, x) in xi.iter_mut().enumerate() {
        *x = (i as f64 - m_left as f64) * dxi;
    }
    v_tilde[m_left] = v_center;

    // Fill rightward then leftward, node to node.
    let mut h = 1e-3;
    for i in m_left + 1..n {
        let out = march(params, ends, v_tilde[i - 1], xi[i - 1], xi[i], h)?;
        v_tilde[i] = out.v.min(ends.v_plus);
        h = out.h_next;
    }
    h = -1e-3;
    for i in (0..m_left).rev() {
        let out = march(params, ends, v_tilde[i + 1], xi[i + 1], xi[i], h)?;
        v_tilde[i] = out.v.max(ends.v_minus);
        h = out.h_next;
    }

    let v_tilde_x: Vec<f64> = v_tilde.iter().map(|&v| rhs_raw(params, ends, v)).collect();
    let v_tilde_xx: Vec<f64> = v_tilde
        .iter()
        .zip(&v_tilde_x)
        .map(|(&v, &vx)| rhs_raw_deriv(params, ends, v) * vx)
        .collect();
    let u_tilde: Vec<f64> = v_tilde
        .iter()
        .map(|&v| ends.u_minus - ends.sigma * (v - ends.v_minus))
        .collect();
    let u_tilde_x: Vec<f64> = v_tilde_x.iter().map(|&vx| -ends.sigma * vx).collect();
    let u_tilde_xx: Vec<f64> = v_tilde_xx.iter().map(|&vxx| -ends.sigma * vxx).collect();

    let misfit = ((v_tilde[0] - ends.v_minus).abs(), (v_tilde[n - 1] - ends.v_plus).abs());

    let p_prime_v_x: Vec<f64> = v_tilde
        .iter()
        .zip(&v_tilde_x)
        .map(|(&v, &vx)| -params.gamma * params.b * v.powf(-params.gamma - 1.0) * vx)
        .collect();

    let interp_v = Pchip::new(xi.clone(), v_tilde.clone());
    let interp_vx = Pchip::new(xi.clone(), v_tilde_x.clone());
    let interp_vxx = Pchip::new(xi.clone(), v_tilde_xx.clone());
    let interp_pvx = Pchip::new(xi.clone(), p_prime_v_x);

    Ok(ShockProfile {
        xi,
        v_tilde,
        u_tilde,
        v_tilde_x,
        u_tilde_x,
        u_tilde_xx,
        ends: *ends,
        constants: *constants,
        params: *params,
        far_field_misfit: misfit,
        sqrt_delta: ends.delta.sqrt(),
        interp_v,
        interp_vx,
        interp_vxx,
        interp_pvx,
    })
}

impl ShockProfile {
    /// Weight a = 1 + (u- - u~)/sqrt(delta) and a_x = sigma v~_x/sqrt(delta)
    /// at the profile nodes.
    pub fn build_weight(&self) -> WeightFn {
        let sd = self.sqrt_delta;
        let a = self
            .u_tilde
            .iter()
            .map(|&u| 1.0 + (self.ends.u_minus - u) / sd)
            .collect();
        let a_x = self
            .v_tilde_x
            .iter()
            .map(|&vx| self.ends.sigma * vx / sd)
            .collect();
        WeightFn { a, a_x }
    }

    /// Sample the shifted profile at `x - shift` for each x, clamping to
    /// the far-field constants (with zero derivatives) outside the window.
    ///
    /// v~ and its stored derivatives are interpolated independently; u~,
    /// its derivatives, and the weight are derived algebraically from them
    /// so that u~_x = -sigma v~_x and a_x sqrt(delta) = sigma v~_x hold
    /// pointwise off the nodes too.
    pub fn eval_shifted(&self, x: &[f64], shift: f64) -> ProfileSamples {
        let n = x.len();
        let mut out = ProfileSamples {
            v_tilde: vec![0.0; n],
            u_tilde: vec![0.0; n],
            v_tilde_x: vec![0.0; n],
            u_tilde_x: vec![0.0; n],
            u_tilde_xx: vec![0.0; n],
            a: vec![0.0; n],
            a_x: vec![0.0; n],
            p_prime_v_x: vec![0.0; n],
        };
        let lo = self.xi[0];
        let hi = self.xi[self.xi.len() - 1];
        let e = &self.ends;
        let sd = self.sqrt_delta;
        for i in 0..n {
            let q = x[i] - shift;
            if q < lo {
                out.v_tilde[i] = e.v_minus;
                out.u_tilde[i] = e.u_minus;
                out.a[i] = 1.0;
            } else if q > hi {
                out.v_tilde[i] = e.v_plus;
                out.u_tilde[i] = e.u_plus;
                out.a[i] = 1.0 + sd;
            } else {
                let v = self.interp_v.eval(q);
                let vx = self.interp_vx.eval(q).max(0.0);
                let vxx = self.interp_vxx.eval(q);
                let u = e.u_minus - e.sigma * (v - e.v_minus);
                out.v_tilde[i] = v;
                out.u_tilde[i] = u;
                out.v_tilde_x[i] = vx;
                out.u_tilde_x[i] = -e.sigma * vx;
                out.u_tilde_xx[i] = -e.sigma * vxx;
                out.a[i] = 1.0 + (e.u_minus - u) / sd;
                out.a_x[i] = e.sigma * vx / sd;
                out.p_prime_v_x[i] = self.interp_pvx.eval(q).min(0.0);
            }
        }
        out
    }

    /// Log-linear fit of the right tail over the outer quarter of the grid:
    /// returns (slope, r_squared) of ln|v~ - v+| against xi.
    pub fn tail_fit_right(&self) -> (f64, f64) {
        let hi = self.xi[self.xi.len() - 1];
        let cut = 0.75 * hi;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (x, v) in self.xi.iter().zip(&self.v_tilde) {
            let gap = self.ends.v_plus - v;
            if *x >= cut && gap > 0.0 {
                xs.push(*x);
                ys.push(gap.ln());
            }
        }
        let (slope, _, r2) = linear_fit(&xs, &ys);
        (slope, r2)
    }

    /// Export with full double precision, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "xi,v_tilde,u_tilde,v_tilde_x,u_tilde_x,u_tilde_xx,a,a_x")?;
        let weight = self.build_weight();
        for i in 0..self.xi.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.xi[i],
                self.v_tilde[i],
                self.u_tilde[i],
                self.v_tilde_x[i],
                self.u_tilde_x[i],
                self.u_tilde_xx[i],
                weight.a[i],
                weight.a_x[i],
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hugoniot::{left_state_from_right, o1_constants};
    use approx::assert_relative_eq;

    fn setup(delta_v: f64) -> (ModelParams, EndStates, Constants) {
        let params = ModelParams::monatomic();
        let ends = left_state_from_right(&params, 1.0, 0.0, delta_v).unwrap();
        let constants = o1_constants(&params, &ends).unwrap();
        (params, ends, constants)
    }

    // delta_v realizing a given shock strength.
    fn dv_for_strength(delta: f64) -> f64 {
        crate::hugoniot::delta_v_from_delta(&ModelParams::monatomic(), 1.0, delta).unwrap()
    }

    fn solve_default(delta_v: f64, n: usize) -> ShockProfile {
        let (params, ends, constants) = setup(delta_v);
        let half = default_half_length(&constants, &ends, 1e-9);
        solve_profile(&params, &ends, &constants, half, n, 1e-9).unwrap()
    }

    #[test]
    fn rhs_vanishes_at_end_states() {
        let (params, ends, _) = setup(0.1);
        assert_eq!(profile_rhs(&params, &ends, ends.v_minus).unwrap(), 0.0);
        // The v+ root holds through the jump relations, not exactly in fp.
        assert!(profile_rhs(&params, &ends, ends.v_plus).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rhs_positive_between_states() {
        let (params, ends, _) = setup(0.1);
        // Convexity puts p(v) - p(v-) below the chord, so the bracket is
        // negative and the right-hand side positive.
        let v = 0.95;
        let chord = -ends.sigma * ends.sigma * (v - ends.v_minus);
        let secant = params.pressure(v).unwrap() - params.pressure(ends.v_minus).unwrap();
        assert!(secant < chord);
        assert!(profile_rhs(&params, &ends, v).unwrap() > 0.0);
    }

    #[test]
    fn rhs_domain_checked() {
        let (params, ends, _) = setup(0.1);
        assert!(profile_rhs(&params, &ends, 0.5).is_err());
        assert!(profile_rhs(&params, &ends, 1.5).is_err());
    }

    #[test]
    fn profile_center_and_monotonicity() {
        let profile = solve_default(0.1, 2048);
        let m = profile.xi.iter().position(|&x| x == 0.0).unwrap();
        assert_eq!(profile.v_tilde[m], 0.95);
        for w in profile.v_tilde.windows(2) {
            assert!(w[1] > w[0], "v~ not strictly increasing");
        }
        for w in profile.u_tilde.windows(2) {
            assert!(w[1] < w[0], "u~ not strictly decreasing");
        }
        for (ux, vx) in profile.u_tilde_x.iter().zip(&profile.v_tilde_x) {
            assert!(*vx > 0.0);
            assert!(*ux < 0.0);
            assert_relative_eq!(*ux, -profile.ends.sigma * vx, max_relative = 1e-15);
        }
        // Bounds and far-field misfit.
        for &v in &profile.v_tilde {
            assert!(v >= profile.ends.v_minus && v <= profile.ends.v_plus);
        }
        assert!(profile.far_field_misfit.0 <= 1e-9);
        assert!(profile.far_field_misfit.1 <= 1e-9);
    }

    #[test]
    fn total_variation_equals_jump() {
        let profile = solve_default(0.1, 1024);
        let tv: f64 = profile.v_tilde.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        let jump = profile.v_tilde.last().unwrap() - profile.v_tilde[0];
        assert_relative_eq!(tv, jump, max_relative = 1e-15);
    }

    #[test]
    fn tail_is_log_linear_with_delta_scaled_rate() {
        let mut rates = Vec::new();
        for &delta in &[0.2, 0.1, 0.05] {
            let profile = solve_default(dv_for_strength(delta), 2048);
            let (slope, r2) = profile.tail_fit_right();
            assert!(slope < 0.0);
            assert!(r2 >= 0.999, "r2 = {r2}");
            rates.push(-slope / profile.ends.delta);
        }
        let max = rates.iter().cloned().fold(0.0_f64, f64::max);
        let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 2.0, "decay rate does not scale with delta: {rates:?}");
    }

    #[test]
    fn curvature_bounded_by_delta_times_slope() {
        // |v~''| <= C delta |v~'| with a bounded observed constant.
        let mut consts = Vec::new();
        for &delta in &[0.2, 0.1, 0.05] {
            let profile = solve_default(dv_for_strength(delta), 2048);
            let (params, ends) = (profile.params, profile.ends);
            let mut c: f64 = 0.0;
            for &v in &profile.v_tilde {
                let vx = rhs_raw(&params, &ends, v);
                let vxx = rhs_raw_deriv(&params, &ends, v) * vx;
                if vx > 1e-300 {
                    c = c.max(vxx.abs() / (ends.delta * vx));
                }
            }
            consts.push(c);
        }
        for c in &consts {
            assert!(c.is_finite() && *c < 20.0, "unbounded curvature constant {c}");
        }
        let max = consts.iter().cloned().fold(0.0_f64, f64::max);
        let min = consts.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 3.0, "curvature constant drifts: {consts:?}");
    }

    #[test]
    fn finite_difference_consistent_with_rhs() {
        // Central difference of the solved profile matches the ODE
        // right-hand side at second order under grid refinement.
        let err = |n: usize| {
            let profile = solve_default(0.1, n);
            let dxi = profile.xi[1] - profile.xi[0];
            let mut worst: f64 = 0.0;
            for i in 1..profile.xi.len() - 1 {
                let fd = (profile.v_tilde[i + 1] - profile.v_tilde[i - 1]) / (2.0 * dxi);
                worst = worst.max((fd - profile.v_tilde_x[i]).abs());
            }
            worst
        };
        let e1 = err(1024);
        let e2 = err(2048);
        let ratio = e1 / e2;
        assert!(ratio > 3.0 && ratio < 5.0, "not second order: {e1} -> {e2}");
    }

    #[test]
    fn momentum_residual_second_order() {
        // The full traveling-wave momentum balance, rebuilt by finite
        // differences on the solved profile, converges at second order.
        let resid = |n: usize| {
            let p = solve_default(0.1, n);
            let dxi = p.xi[1] - p.xi[0];
            let params = p.params;
            let e = p.ends;
            let mut worst: f64 = 0.0;
            for i in 1..p.xi.len() - 1 {
                let press: Vec<f64> = (i - 1..=i + 1)
                    .map(|k| params.pressure(p.v_tilde[k]).unwrap())
                    .collect();
                let dp = (press[2] - press[0]) / (2.0 * dxi);
                let flux = |k: usize| params.mu * p.u_tilde_x[k] / p.v_tilde[k];
                let dflux = (flux(i + 1) - flux(i - 1)) / (2.0 * dxi);
                let r = -e.sigma * p.u_tilde_x[i] + dp - dflux;
                worst = worst.max(r.abs());
            }
            worst
        };
        let e1 = resid(1024);
        let e2 = resid(2048);
        assert!(e1 / e2 > 3.0, "not second order: {e1} -> {e2}");
    }

    #[test]
    fn weight_bounds_and_derivative_relation() {
        let profile = solve_default(0.1, 2048);
        let weight = profile.build_weight();
        let sd = profile.sqrt_delta;
        assert!(sd < 0.5);
        for (a, ax) in weight.a.iter().zip(&weight.a_x) {
            assert!(*a >= 1.0 - 1e-15 && *a <= 1.0 + sd + 1e-15);
            assert!(*a < 1.5);
            assert!(*ax > 0.0);
        }
        // a_x sqrt(delta) - sigma v~_x = 0 pointwise.
        for (ax, vx) in weight.a_x.iter().zip(&profile.v_tilde_x) {
            assert!((ax * sd - profile.ends.sigma * vx).abs() <= 1e-10);
        }
        // Far-field values of the weight.
        assert!((weight.a[0] - 1.0).abs() < 1e-7);
        assert!((weight.a.last().unwrap() - (1.0 + sd)).abs() < 1e-7);
    }

    #[test]
    fn shifted_eval_reproduces_nodes() {
        let profile = solve_default(0.1, 512);
        let samples = profile.eval_shifted(&profile.xi, 0.0);
        for i in 0..profile.xi.len() {
            assert_eq!(samples.v_tilde[i], profile.v_tilde[i]);
            assert_eq!(samples.u_tilde[i], profile.u_tilde[i]);
        }
        // Shift by one exact grid spacing reproduces neighbor samples.
        let dxi = profile.xi[1] - profile.xi[0];
        let shifted = profile.eval_shifted(&profile.xi, dxi);
        for i in 1..profile.xi.len() {
            assert_relative_eq!(shifted.v_tilde[i], profile.v_tilde[i - 1], max_relative = 1e-14);
            assert_relative_eq!(shifted.v_tilde_x[i], profile.v_tilde_x[i - 1], max_relative = 1e-14);
        }
    }

    #[test]
    fn shifted_eval_clamps_to_far_field() {
        let profile = solve_default(0.1, 512);
        let e = profile.ends;
        let far = vec![profile.xi.last().unwrap() + 5.0, -profile.xi[0].abs() - 7.0];
        let s = profile.eval_shifted(&far, 0.0);
        assert_eq!(
            (s.v_tilde[0], s.u_tilde[0], s.v_tilde_x[0], s.u_tilde_x[0], s.u_tilde_xx[0]),
            (e.v_plus, e.u_plus, 0.0, 0.0, 0.0)
        );
        assert_eq!(s.a[0], 1.0 + profile.sqrt_delta);
        assert_eq!(s.a_x[0], 0.0);
        assert_eq!((s.v_tilde[1], s.u_tilde[1], s.a[1], s.a_x[1]), (e.v_minus, e.u_minus, 1.0, 0.0));
    }

    #[test]
    fn shifted_eval_preserves_monotonicity() {
        let profile = solve_default(0.1, 512);
        let lo = profile.xi[0] - 2.0;
        let hi = profile.xi.last().unwrap() + 2.0;
        let fine: Vec<f64> = (0..20000)
            .map(|i| lo + (hi - lo) * i as f64 / 19999.0)
            .collect();
        let s = profile.eval_shifted(&fine, 0.37);
        for w in s.v_tilde.windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
        for w in s.u_tilde.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        for vx in &s.v_tilde_x {
            assert!(*vx >= 0.0);
        }
    }

    #[test]
    fn csv_export_shape() {
        let profile = solve_default(0.1, 256);
        let mut buf = Vec::new();
        profile.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "xi,v_tilde,u_tilde,v_tilde_x,u_tilde_x,u_tilde_xx,a,a_x"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), profile.xi.len());
        // Full precision round-trip on a middle row.
        let mid = rows[rows.len() / 2];
        let fields: Vec<f64> = mid.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(fields.len(), 8);
        let i = rows.len() / 2;
        assert_eq!(fields[1], profile.v_tilde[i]);
        assert_eq!(fields[2], profile.u_tilde[i]);
    }

    #[test]
    fn constant_viscosity_scales_profile() {
        // Doubling mu stretches the profile without changing its range.
        let (params, ends, constants) = setup(0.1);
        let mut params2 = params;
        params2.mu = 2.0;
        let half = default_half_length(&constants, &ends, 1e-9);
        let p1 = solve_profile(&params, &ends, &constants, half, 1024, 1e-9).unwrap();
        let p2 = solve_profile(&params2, &ends, &constants, 2.0 * half, 1024, 1e-9).unwrap();
        let width = |p: &ShockProfile| p.xi.last().unwrap() - p.xi[0];
        assert_relative_eq!(width(&p2) / width(&p1), 2.0, max_relative = 0.05);
    }
}
