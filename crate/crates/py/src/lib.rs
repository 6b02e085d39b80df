//! Python bindings: equation of state, shock data, traveling-wave
//! profiles, the weighted Poincare check, and whole-scenario runs.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use shocklab::dynamics::{run, RunStatus};
use shocklab::error::Error;
use shocklab::functionals;
use shocklab::hugoniot;
use shocklab::model;
use shocklab::profile as profile_mod;
use shocklab::scenario;

fn to_py(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Gamma-law model parameters.
#[pyclass(frozen, skip_from_py_object)]
struct ModelParams {
    inner: model::ModelParams,
}

#[pymethods]
impl ModelParams {
    #[new]
    #[pyo3(signature = (gamma, b=1.0, mu=1.0))]
    fn new(gamma: f64, b: f64, mu: f64) -> PyResult<Self> {
        Ok(Self { inner: model::ModelParams::new(gamma, b, mu).map_err(to_py)? })
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    fn pressure(&self, v: f64) -> PyResult<f64> {
        self.inner.pressure(v).map_err(to_py)
    }

    fn pressure_deriv(&self, v: f64) -> PyResult<f64> {
        self.inner.pressure_deriv(v).map_err(to_py)
    }

    fn internal_energy(&self, v: f64) -> PyResult<f64> {
        self.inner.internal_energy(v).map_err(to_py)
    }

    fn pressure_rel(&self, v: f64, w: f64) -> PyResult<f64> {
        self.inner.pressure_rel(v, w).map_err(to_py)
    }

    fn rel_entropy_density(&self, v: f64, u: f64, vbar: f64, ubar: f64) -> PyResult<f64> {
        self.inner.rel_entropy_density(v, u, vbar, ubar).map_err(to_py)
    }
}

/// End states, speed, strength, and the O(1) constants of one 2-shock.
#[pyclass(frozen)]
struct ShockData {
    ends: hugoniot::EndStates,
    constants: hugoniot::Constants,
}

#[pymethods]
impl ShockData {
    #[getter]
    fn v_minus(&self) -> f64 {
        self.ends.v_minus
    }

    #[getter]
    fn u_minus(&self) -> f64 {
        self.ends.u_minus
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.ends.sigma
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.ends.delta
    }

    #[getter]
    fn sigma_ell(&self) -> f64 {
        self.constants.sigma_ell
    }

    #[getter]
    fn alpha_ell(&self) -> f64 {
        self.constants.alpha_ell
    }

    #[getter]
    fn c_star(&self) -> f64 {
        self.constants.c_star
    }

    #[getter]
    fn m_shift(&self) -> f64 {
        self.constants.m_shift
    }

    /// Relative Rankine-Hugoniot residuals (both vanish by construction).
    fn rh_residuals(&self, params: &ModelParams) -> PyResult<(f64, f64)> {
        self.ends.rh_residuals(&params.inner).map_err(to_py)
    }
}

/// Walk the 2-shock curve from a right state by delta_v = v+ - v-.
#[pyfunction]
fn shock_from_right(
    params: &ModelParams,
    v_plus: f64,
    u_plus: f64,
    delta_v: f64,
) -> PyResult<ShockData> {
    let ends =
        hugoniot::left_state_from_right(&params.inner, v_plus, u_plus, delta_v).map_err(to_py)?;
    let constants = hugoniot::o1_constants(&params.inner, &ends).map_err(to_py)?;
    Ok(ShockData { ends, constants })
}

/// Solved viscous shock profile with derivatives and weight.
#[pyclass(frozen)]
struct Profile {
    inner: profile_mod::ShockProfile,
}

#[pymethods]
impl Profile {
    #[getter]
    fn xi(&self) -> Vec<f64> {
        self.inner.xi.clone()
    }

    #[getter]
    fn v_tilde(&self) -> Vec<f64> {
        self.inner.v_tilde.clone()
    }

    #[getter]
    fn u_tilde(&self) -> Vec<f64> {
        self.inner.u_tilde.clone()
    }

    #[getter]
    fn v_tilde_x(&self) -> Vec<f64> {
        self.inner.v_tilde_x.clone()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.ends.sigma
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.ends.delta
    }

    #[getter]
    fn far_field_misfit(&self) -> (f64, f64) {
        self.inner.far_field_misfit
    }

    /// Weight samples (a, a_x) on the profile grid.
    fn weight(&self) -> (Vec<f64>, Vec<f64>) {
        let w = self.inner.build_weight();
        (w.a, w.a_x)
    }

    /// Log-linear tail fit on the outer quarter: (slope, r_squared).
    fn tail_fit(&self) -> (f64, f64) {
        self.inner.tail_fit_right()
    }

    /// Sample (v~, u~, v~_x, u~_x, a, a_x) at x - shift.
    fn eval_shifted(
        &self,
        x: Vec<f64>,
        shift: f64,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let s = self.inner.eval_shifted(&x, shift);
        (s.v_tilde, s.u_tilde, s.v_tilde_x, s.u_tilde_x, s.a, s.a_x)
    }

    /// Write the profile CSV (full double precision).
    fn write_csv(&self, path: &str) -> PyResult<()> {
        let f = std::fs::File::create(path)?;
        self.inner.write_csv(std::io::BufWriter::new(f))?;
        Ok(())
    }
}

/// Solve the traveling-wave profile for a shock given by delta_v.
#[pyfunction]
#[pyo3(signature = (params, v_plus, u_plus, delta_v, n_samples=4096, tol=1e-9))]
fn solve_profile(
    params: &ModelParams,
    v_plus: f64,
    u_plus: f64,
    delta_v: f64,
    n_samples: usize,
    tol: f64,
) -> PyResult<Profile> {
    let ends =
        hugoniot::left_state_from_right(&params.inner, v_plus, u_plus, delta_v).map_err(to_py)?;
    let constants = hugoniot::o1_constants(&params.inner, &ends).map_err(to_py)?;
    let half = profile_mod::default_half_length(&constants, &ends, tol);
    let inner =
        profile_mod::solve_profile(&params.inner, &ends, &constants, half, n_samples, tol)
            .map_err(to_py)?;
    Ok(Profile { inner })
}

/// Both sides of the weighted Poincare inequality for uniform samples of
/// f on [0, 1], treated as a piecewise-linear function.
#[pyfunction]
fn poincare_check(f: Vec<f64>) -> PyResult<(f64, f64)> {
    functionals::poincare_check(&f).map_err(to_py)
}

/// Leading-coefficient probe of the relative-quantity bounds:
/// returns (p_ratio, p_ratio_limit, q_ratio, q_ratio_limit).
#[pyfunction]
fn relative_bound_coefficients(
    params: &ModelParams,
    v: f64,
    vbar: f64,
) -> PyResult<(f64, f64, f64, f64)> {
    let probe = model::lemma21_probe(&params.inner, v, vbar, f64::INFINITY).map_err(to_py)?;
    Ok((probe.p_ratio, probe.p_ratio_limit, probe.q_ratio, probe.q_ratio_limit))
}

/// Condensed outcome of one scenario run.
#[pyclass(frozen)]
struct RunSummary {
    #[pyo3(get)]
    completed: bool,
    #[pyo3(get)]
    steps: u64,
    #[pyo3(get)]
    ticks: usize,
    #[pyo3(get)]
    h1_initial: f64,
    #[pyo3(get)]
    a_re_first: f64,
    #[pyo3(get)]
    a_re_last: f64,
    #[pyo3(get)]
    sup_first: f64,
    #[pyo3(get)]
    sup_last: f64,
    #[pyo3(get)]
    x_final: f64,
    #[pyo3(get)]
    x_dot_final: f64,
    #[pyo3(get)]
    contraction_slack: f64,
    #[pyo3(get)]
    apriori_c0: f64,
}

/// Parse scenario text (the flat key = value format) and run it.
#[pyfunction]
fn run_scenario(text: &str) -> PyResult<RunSummary> {
    let scenario = scenario::parse_str(text).map_err(to_py)?;
    let out = run(&scenario.config).map_err(to_py)?;
    let r0 = out.records.first().ok_or_else(|| PyValueError::new_err("no records"))?;
    let rl = out.records.last().unwrap();
    let mut slack = 0.0_f64;
    for w in out.records.windows(2) {
        slack = slack.max(w[1].weighted_rel_entropy - w[0].weighted_rel_entropy);
    }
    Ok(RunSummary {
        completed: matches!(out.status, RunStatus::Completed),
        steps: out.steps,
        ticks: out.records.len(),
        h1_initial: out.h1_initial,
        a_re_first: r0.weighted_rel_entropy,
        a_re_last: rl.weighted_rel_entropy,
        sup_first: r0.sup_v.max(r0.sup_u),
        sup_last: rl.sup_v.max(rl.sup_u),
        x_final: rl.x_shift,
        x_dot_final: rl.x_dot,
        contraction_slack: slack,
        apriori_c0: rl.apriori_ratio,
    })
}

/// The built-in desk-scale scenario text, as a starting point.
#[pyfunction]
fn default_scenario() -> String {
    scenario::DEFAULT_SCENARIO.to_string()
}

#[pymodule]
fn shocklab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ModelParams>()?;
    m.add_class::<ShockData>()?;
    m.add_class::<Profile>()?;
    m.add_class::<RunSummary>()?;
    m.add_function(wrap_pyfunction!(shock_from_right, m)?)?;
    m.add_function(wrap_pyfunction!(solve_profile, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_check, m)?)?;
    m.add_function(wrap_pyfunction!(relative_bound_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(default_scenario, m)?)?;
    Ok(())
}
