//! Shock data: Rankine-Hugoniot relations, the 2-shock curve through a
//! right state, the entropy condition, and the O(1) constants used by the
//! weight, shift, and ledger machinery.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use serde::{Deserialize, Serialize};

/// End states of an admissible 2-shock together with speed and strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndStates {
    pub v_minus: f64,
    pub v_plus: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    /// Shock speed sigma = sqrt(-(p(v+)-p(v-))/(v+-v-)) > 0.
    pub sigma: f64,
    /// Shock strength delta = u- - u+ > 0.
    pub delta: f64,
}

impl EndStates {
    /// Rankine-Hugoniot residuals, relative to the size of their terms.
    ///
    /// r1 = -sigma (v+ - v-) - (u+ - u-)
    /// r2 = -sigma (u+ - u-) + (p(v+) - p(v-))
    ///
    /// Both vanish identically for states built by [`left_state_from_right`].
    pub fn rh_residuals(&self, params: &ModelParams) -> Result<(f64, f64)> {
        let dv = self.v_plus - self.v_minus;
        let du = self.u_plus - self.u_minus;
        let dp = params.pressure(self.v_plus)? - params.pressure(self.v_minus)?;
        let r1 = -self.sigma * dv - du;
        let r2 = -self.sigma * du + dp;
        let s1 = (self.sigma * dv).abs().max(du.abs()).max(f64::MIN_POSITIVE);
        let s2 = (self.sigma * du).abs().max(dp.abs()).max(f64::MIN_POSITIVE);
        Ok((r1 / s1, r2 / s2))
    }
}

/// O(1) constants attached to a shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// sigma_ell = sqrt(-p'(v-)).
    pub sigma_ell: f64,
    /// alpha_ell = (gamma+1)/(2 gamma sigma_ell p(v-)).
    pub alpha_ell: f64,
    /// C* = (1/sigma_ell - sqrt(delta) (gamma+1)/(gamma p(v-))) / 2.
    pub c_star: f64,
    /// Shift gain M = 5 sigma_ell^3 alpha_ell / 4.
    pub m_shift: f64,
}

/// Shock speed from the difference quotient of the pressure.
pub fn shock_speed(params: &ModelParams, v_minus: f64, v_plus: f64) -> Result<f64> {
    if !(v_minus > 0.0) || !(v_plus > 0.0) {
        return Err(Error::Domain(format!(
            "volumes must be positive, got v- = {v_minus}, v+ = {v_plus}"
        )));
    }
    if !(v_minus < v_plus) {
        return Err(Error::EntropyCondition(format!(
            "2-shock requires v- < v+, got v- = {v_minus}, v+ = {v_plus}"
        )));
    }
    let dp = params.pressure(v_plus)? - params.pressure(v_minus)?;
    let sigma = (-dp / (v_plus - v_minus)).sqrt();
    debug_assert!(sigma > 0.0);
    Ok(sigma)
}

/// Walk the 2-shock curve from a right state by delta_v = v+ - v-.
pub fn left_state_from_right(
    params: &ModelParams,
    v_plus: f64,
    u_plus: f64,
    delta_v: f64,
) -> Result<EndStates> {
    if !(v_plus > 0.0) {
        return Err(Error::Domain(format!("v+ must be positive, got {v_plus}")));
    }
    if !(delta_v > 0.0 && delta_v < v_plus) {
        return Err(Error::InvalidShock(format!(
            "delta_v must lie in (0, v+); got delta_v = {delta_v}, v+ = {v_plus}"
        )));
    }
    let v_minus = v_plus - delta_v;
    let sigma = shock_speed(params, v_minus, v_plus)?;
    let u_minus = u_plus + sigma * delta_v;
    Ok(EndStates {
        v_minus,
        v_plus,
        u_minus,
        u_plus,
        sigma,
        delta: u_minus - u_plus,
    })
}

/// Invert delta(delta_v) by bisection, for scenarios specified by shock
/// strength rather than volume jump.
pub fn delta_v_from_delta(params: &ModelParams, v_plus: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidShock(format!("delta must be positive, got {delta}")));
    }
    let strength = |dv: f64| -> Result<f64> {
        Ok(shock_speed(params, v_plus - dv, v_plus)? * dv)
    };
    let mut lo = v_plus * 1e-12;
    let mut hi = v_plus * (1.0 - 1e-12);
    if strength(hi)? < delta {
        return Err(Error::InvalidShock(format!(
            "delta = {delta} not reachable on the 2-shock curve through v+ = {v_plus}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if strength(mid)? < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All four O(1) constants, with the two closed forms of alpha_ell
/// cross-checked against each other.
pub fn o1_constants(params: &ModelParams, ends: &EndStates) -> Result<Constants> {
    let p_minus = params.pressure(ends.v_minus)?;
    let dp1 = params.pressure_deriv(ends.v_minus)?;
    let dp2 = params.pressure_deriv2(ends.v_minus)?;
    let sigma_ell = (-dp1).sqrt();
    let gamma = params.gamma;
    let alpha_ell = (gamma + 1.0) / (2.0 * gamma * sigma_ell * p_minus);
    let alpha_alt = dp2 / (2.0 * dp1 * dp1 * sigma_ell);
    let alt_err = (alpha_ell - alpha_alt).abs() / alpha_ell.abs();
    if alt_err > 1e-12 {
        return Err(Error::Domain(format!(
            "alpha_ell closed forms disagree by {alt_err:e}"
        )));
    }
    let c_star = 0.5 * (1.0 / sigma_ell - ends.delta.sqrt() * (gamma + 1.0) / (gamma * p_minus));
    if !(c_star > 0.0) {
        return Err(Error::ShockTooStrong(format!(
            "C* = {c_star} <= 0 at delta = {}; the quadratic estimate degenerates",
            ends.delta
        )));
    }
    let m_shift = 1.25 * sigma_ell.powi(3) * alpha_ell;
    Ok(Constants { sigma_ell, alpha_ell, c_star, m_shift })
}
