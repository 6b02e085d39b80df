//! Evaluation of the per-scenario verification bundles, shared by the CLI
//! and the acceptance suite. Thresholds are pinned here.

use crate::dynamics::{RunOutput, SimState};
use crate::error::Result;
use crate::functionals::{
    completion_of_square_check, diffusion_coefficient_probe, poincare_check,
};
use crate::hugoniot::Constants;
use crate::model::lemma21_probe;
use crate::output::CheckResult;
use crate::profile::ShockProfile;
use crate::scenario::Scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Contraction: the weighted relative entropy may increase between
/// consecutive ticks by at most this fraction of its initial value.
pub const CONTRACTION_SLACK_FRACTION: f64 = 1e-3;
/// Identity: the balance residual must stay below this fraction of the
/// largest term it balances.
pub const IDENTITY_RELATIVE_TOL: f64 = 0.1;
/// Exact algebraic identities (completed square, closed-form constants).
pub const EXACT_IDENTITY_TOL: f64 = 1e-12;
/// Leading-coefficient convergence of the relative-quantity bounds at
/// separation 1e-3.
pub const COEFF_TOL: f64 = 0.05;
/// Weight derivative relation a_x sqrt(delta) = sigma v~_x.
pub const WEIGHT_RELATION_TOL: f64 = 1e-10;

/// Largest one-tick increase of the weighted relative entropy.
pub fn contraction_slack(out: &RunOutput) -> f64 {
    let mut slack = 0.0_f64;
    for w in out.records.windows(2) {
        slack = slack.max(w[1].weighted_rel_entropy - w[0].weighted_rel_entropy);
    }
    slack
}

pub fn contraction_check(out: &RunOutput) -> CheckResult {
    let slack = contraction_slack(out);
    let initial = out.records[0].weighted_rel_entropy;
    let allowed = CONTRACTION_SLACK_FRACTION * initial;
    let pass = initial == 0.0 || slack <= allowed;
    CheckResult {
        name: "contraction".into(),
        pass,
        details: format!(
            "max one-tick increase of the weighted relative entropy = {slack:.3e}, allowed {allowed:.3e} (initial {initial:.6e})"
        ),
    }
}

/// Max interior identity residual and the scale of the balanced terms.
pub fn identity_residual_stats(out: &RunOutput) -> (f64, f64) {
    let n = out.records.len();
    let max_res = if n >= 3 {
        out.records[1..n - 1]
            .iter()
            .map(|r| r.identity_residual)
            .fold(0.0_f64, f64::max)
    } else {
        0.0
    };
    let scale = out
        .records
        .iter()
        .map(|r| (r.x_dot * r.y_total).abs() + r.j_bad.abs() + r.j_good.abs())
        .fold(0.0_f64, f64::max);
    (max_res, scale)
}

pub fn identity_check(out: &RunOutput) -> CheckResult {
    let (max_res, scale) = identity_residual_stats(out);
    let pass = scale == 0.0 || max_res <= IDENTITY_RELATIVE_TOL * scale;
    CheckResult {
        name: "identity".into(),
        pass,
        details: format!(
            "max balance residual = {max_res:.3e} against term scale {scale:.3e} (relative {:.2e}, allowed {IDENTITY_RELATIVE_TOL})",
            if scale > 0.0 { max_res / scale } else { 0.0 }
        ),
    }
}

/// The Poincare battery: equality for affine data plus a random
/// piecewise-linear sweep.
pub fn poincare_battery(seed: u64) -> CheckResult {
    let n = 10_001;
    let f: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let (lhs, rhs) = poincare_check(&f).expect("affine battery");
    let affine_ok = (lhs - 1.0 / 12.0).abs() < 1e-6 && (rhs - 1.0 / 12.0).abs() < 1e-6;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..1000 {
        let m = rng.random_range(3..400);
        let f: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (lhs, rhs) = poincare_check(&f).expect("random battery");
        if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
            violations += 1;
        }
        worst_gap = worst_gap.min(rhs - lhs);
    }
    CheckResult {
        name: "poincare".into(),
        pass: affine_ok && violations == 0,
        details: format!(
            "affine case lhs = rhs = 1/12 within 1e-6: {affine_ok}; violations in 1000 random piecewise-linear samples: {violations}; smallest slack {worst_gap:.3e}"
        ),
    }
}

/// Numeric outcomes of the inequality probes at one shock.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub p_coeff_err: f64,
    pub q_coeff_err: f64,
    pub sigma_identity_err: f64,
    pub completion_residual: f64,
    pub diffusion_deviation_over_delta_sq: f64,
    pub weight_relation_max: f64,
    pub weight_in_bounds: bool,
}

/// Run every pointwise probe against a solved profile.
pub fn probe_battery(
    profile: &ShockProfile,
    constants: &Constants,
    seed: u64,
) -> Result<(CheckResult, ProbeReport)> {
    let params = &profile.params;
    let ends = &profile.ends;

    // Leading coefficients of the relative-quantity bounds at both end
    // states, probed at separation 1e-3.
    let mut p_err = 0.0_f64;
    let mut q_err = 0.0_f64;
    for vbar in [ends.v_minus, ends.v_plus] {
        let probe = lemma21_probe(params, vbar + 1e-3, vbar, 1.0)?;
        p_err = p_err.max((probe.p_ratio / probe.p_ratio_limit - 1.0).abs());
        q_err = q_err.max((probe.q_ratio / probe.q_ratio_limit - 1.0).abs());
    }

    // Completed square on random fields over the profile grid.
    let grid = crate::dynamics::SimGrid::new(
        profile.xi[0] - 1.0,
        profile.xi.last().unwrap() + 1.0,
        1000,
    )?;
    let base = profile.eval_shifted(&grid.x, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SimState {
        t: 0.0,
        v: base.v_tilde.clone(),
        u: base.u_tilde.clone(),
        x_shift: 0.0,
        x_dot: 0.0,
    };
    for i in 0..grid.n_nodes() {
        state.v[i] += rng.random_range(-0.3..0.3);
        state.u[i] += rng.random_range(-0.5..0.5);
    }
    let completion = completion_of_square_check(&state, &grid, profile, constants);

    let diffusion = diffusion_coefficient_probe(profile, constants);

    let weight = profile.build_weight();
    let sd = profile.sqrt_delta;
    let mut relation_max = 0.0_f64;
    let mut in_bounds = true;
    for (a, (ax, vx)) in weight.a.iter().zip(weight.a_x.iter().zip(&profile.v_tilde_x)) {
        in_bounds &= *a >= 1.0 - 1e-15 && *a <= 1.0 + sd + 1e-15;
        relation_max = relation_max.max((ax * sd - ends.sigma * vx).abs());
    }

    let report = ProbeReport {
        p_coeff_err: p_err,
        q_coeff_err: q_err,
        sigma_identity_err: diffusion.identity_residual,
        completion_residual: completion,
        diffusion_deviation_over_delta_sq: diffusion.deviation_over_delta_sq,
        weight_relation_max: relation_max,
        weight_in_bounds: in_bounds,
    };
    let pass = p_err <= COEFF_TOL
        && q_err <= COEFF_TOL
        && diffusion.identity_residual <= EXACT_IDENTITY_TOL
        && completion <= EXACT_IDENTITY_TOL
        && diffusion.deviation_over_delta_sq.is_finite()
        && relation_max <= WEIGHT_RELATION_TOL
        && in_bounds;
    let check = CheckResult {
        name: "probes".into(),
        pass,
        details: format!(
            "coefficient errors p {p_err:.2e} / q {q_err:.2e} (allowed {COEFF_TOL}); completed-square residual {completion:.2e}; sigma_ell^3 alpha_ell identity {:.2e}; diffusion deviation/delta^2 {:.3e}; weight relation max {relation_max:.2e}, bounds ok: {in_bounds}",
            diffusion.identity_residual, diffusion.deviation_over_delta_sq
        ),
    };
    Ok((check, report))
}

/// Structural properties of a solved profile, for the profile command.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub n_samples: usize,
    pub window: (f64, f64),
    pub strictly_monotone: bool,
    pub rh_residuals: (f64, f64),
    pub far_field_misfit: (f64, f64),
    pub tail_slope: f64,
    pub tail_r2: f64,
    pub center_value: f64,
    pub sigma: f64,
    pub delta: f64,
    pub pass: bool,
}

pub fn profile_report(profile: &ShockProfile) -> Result<ProfileReport> {
    let monotone = profile.v_tilde.windows(2).all(|w| w[1] > w[0])
        && profile.u_tilde.windows(2).all(|w| w[1] < w[0]);
    let rh = profile.ends.rh_residuals(&profile.params)?;
    let (slope, r2) = profile.tail_fit_right();
    let m = profile.xi.iter().position(|&x| x == 0.0).expect("grid contains 0");
    let pass = monotone
        && rh.0.abs() <= 1e-12
        && rh.1.abs() <= 1e-12
        && profile.far_field_misfit.0 <= 1e-9
        && profile.far_field_misfit.1 <= 1e-9
        && slope < 0.0
        && r2 >= 0.999;
    Ok(ProfileReport {
        n_samples: profile.xi.len(),
        window: (profile.xi[0], *profile.xi.last().unwrap()),
        strictly_monotone: monotone,
        rh_residuals: rh,
        far_field_misfit: profile.far_field_misfit,
        tail_slope: slope,
        tail_r2: r2,
        center_value: profile.v_tilde[m],
        sigma: profile.ends.sigma,
        delta: profile.ends.delta,
        pass,
    })
}

/// Evaluate the checks a scenario enables against a finished run.
pub fn evaluate_enabled(scenario: &Scenario, out: &RunOutput) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    for check in &scenario.checks {
        match check {
            crate::scenario::Check::Identity => results.push(identity_check(out)),
            crate::scenario::Check::Contraction => results.push(contraction_check(out)),
            crate::scenario::Check::Poincare => results.push(poincare_battery(scenario.config.seed)),
            crate::scenario::Check::Probes => {
                let (check, _) = probe_battery(&out.profile, &out.constants, scenario.config.seed)?;
                results.push(check);
            }
        }
    }
    Ok(results)
}

/// Solve the scenario's shock structure without running dynamics.
pub fn solve_scenario_profile(scenario: &Scenario) -> Result<(ShockProfile, Constants)> {
    let c = &scenario.config;
    let ends =
        crate::hugoniot::left_state_from_right(&c.params, c.v_plus, c.u_plus, c.delta_v)?;
    let constants = crate::hugoniot::o1_constants(&c.params, &ends)?;
    let half = crate::profile::default_half_length(&constants, &ends, c.profile_tol);
    let profile = crate::profile::solve_profile(
        &c.params,
        &ends,
        &constants,
        half,
        c.profile_n_samples,
        c.profile_tol,
    )?;
    Ok((profile, constants))
}
