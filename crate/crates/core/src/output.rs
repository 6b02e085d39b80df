//! File emission: diagnostics CSV, snapshot CSV, run metadata, check
//! reports, and machine-readable error JSON. All floating-point columns
//! carry 17 significant digits so reruns can be compared bitwise.

use crate::dynamics::{RunOutput, RunStatus, Snapshot};
use crate::error::{Error, Result};
use crate::functionals::DiagnosticsRecord;
use crate::hugoniot::{Constants, EndStates};
use crate::scenario::Scenario;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

pub const DIAGNOSTICS_HEADER: &str = "t,X,X_dot,aRE,G1,GS,Dv,Du1,Du2,Y1,Y2,Y3,Y4,B1,B2,B3,B4,B5,B6,cG1,cG2,cD,id_residual,sup_v,sup_u,h1,g,apriori_ratio";

pub fn write_diagnostics_csv<W: Write>(records: &[DiagnosticsRecord], mut w: W) -> Result<()> {
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t,
            r.x_shift,
            r.x_dot,
            r.weighted_rel_entropy,
            r.g1,
            r.g_s,
            r.d_v,
            r.d_u1,
            r.d_u2,
            r.y1,
            r.y2,
            r.y3,
            r.y4,
            r.b1,
            r.b2,
            r.b3,
            r.b4,
            r.b5,
            r.b6,
            r.curly_g1,
            r.curly_g2,
            r.curly_d,
            r.identity_residual,
            r.sup_v,
            r.sup_u,
            r.h1_perturbation,
            r.g_diag,
            r.apriori_ratio,
        )?;
    }
    Ok(())
}

pub fn write_snapshot_csv<W: Write>(snapshot: &Snapshot, x: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "x,v,u,v_tilde_X,u_tilde_X")?;
    for i in 0..x.len() {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            x[i],
            snapshot.v[i],
            snapshot.u[i],
            snapshot.v_tilde_shifted[i],
            snapshot.u_tilde_shifted[i],
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    scenario: &'a str,
    config_echo: String,
    ends: &'a EndStates,
    constants: &'a Constants,
    grid_n_cells: usize,
    grid_dx: f64,
    dt: f64,
    steps: u64,
    h1_initial: f64,
    profile_far_field_misfit: (f64, f64),
    status: &'a RunStatus,
    exit_status: i32,
}

/// One verification outcome inside a report.
#[derive(Serialize, Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Serialize)]
struct Report<'a> {
    scenario: &'a str,
    all_pass: bool,
    checks: &'a [CheckResult],
}

/// Write diagnostics, snapshots, metadata, and the check report for one
/// finished run into `dir`.
pub fn write_run_outputs(
    dir: &Path,
    scenario: &Scenario,
    out: &RunOutput,
    checks: &[CheckResult],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let f = fs::File::create(dir.join("diagnostics.csv"))?;
    write_diagnostics_csv(&out.records, std::io::BufWriter::new(f))?;

    if !out.snapshots.is_empty() {
        let snap_dir = dir.join("snapshots");
        fs::create_dir_all(&snap_dir)?;
        for (k, snapshot) in out.snapshots.iter().enumerate() {
            let f = fs::File::create(snap_dir.join(format!("snap_{k:04}.csv")))?;
            write_snapshot_csv(snapshot, &out.grid.x, std::io::BufWriter::new(f))?;
        }
    }

    let exit_status = match (&out.status, checks.iter().all(|c| c.pass)) {
        (RunStatus::Aborted { .. }, _) => 3,
        (RunStatus::Completed, true) => 0,
        (RunStatus::Completed, false) => 1,
    };
    let metadata = Metadata {
        scenario: &scenario.name,
        config_echo: scenario.emit(),
        ends: &out.profile.ends,
        constants: &out.constants,
        grid_n_cells: out.grid.n_cells,
        grid_dx: out.grid.dx,
        dt: out.dt,
        steps: out.steps,
        h1_initial: out.h1_initial,
        profile_far_field_misfit: out.profile.far_field_misfit,
        status: &out.status,
        exit_status,
    };
    fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&metadata)? + "\n")?;
    write_report(dir, &scenario.name, checks)?;
    Ok(())
}

pub fn write_report(dir: &Path, scenario: &str, checks: &[CheckResult]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let report = Report { scenario, all_pass: checks.iter().all(|c| c.pass), checks };
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(())
}

/// Machine-readable error file for failed commands.
pub fn write_error_json(dir: &Path, err: &Error) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let body = serde_json::json!({
        "error": err.to_string(),
        "kind": err.kind(),
        "exit_code": err.exit_code(),
    });
    fs::write(dir.join("error.json"), body.to_string() + "\n")
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}
