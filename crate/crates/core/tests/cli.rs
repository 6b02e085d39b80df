//! End-to-end exercises of the command-line driver: file emission, exit
//! codes, determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_shocklab");

fn small_scenario(name: &str) -> String {
    format!(
        "name = {name}\n\
         gamma = 1.6666666666666667\n\
         v_plus = 1\n\
         delta_v = 0.1\n\
         x_min = -400\n\
         x_max = 400\n\
         n_cells = 1024\n\
         cfl = 0.5\n\
         t_end = 5\n\
         output_every_steps = 8\n\
         perturbation = gaussian\n\
         amplitude_v = 0.002\n\
         amplitude_u = -0.0028\n\
         center = 0\n\
         width = 2\n\
         seed = 11\n\
         profile_n_samples = 1024\n\
         profile_tol = 1e-9\n\
         snapshot_every = 2.5\n\
         checks = contraction,poincare,probes\n"
    )
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.cfg"));
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn probe_is_deterministic_and_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "probe", &small_scenario("probe-case"));
    let run = |out: &str| {
        let status = Command::new(BIN)
            .args(["probe", "--config"])
            .arg(&cfg)
            .args(["--seed", "7", "--out"])
            .arg(tmp.path().join(out))
            .status()
            .unwrap();
        assert!(status.success(), "probe exited with {status}");
        fs::read_to_string(tmp.path().join(out).join("probe-case/probe_report.json")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b, "probe reports differ between identical runs");
    assert!(a.contains("\"all_pass\": true"));
}

#[test]
fn profile_emits_csv_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "profile", &small_scenario("prof"));
    let status = Command::new(BIN)
        .args(["profile", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(tmp.path().join("out/prof/profile.csv")).unwrap();
    assert!(csv.starts_with("xi,v_tilde,u_tilde,v_tilde_x,u_tilde_x,u_tilde_xx,a,a_x\n"));
    let report = fs::read_to_string(tmp.path().join("out/prof/profile_report.json")).unwrap();
    assert!(report.contains("\"pass\": true"), "{report}");
}

#[test]
fn simulate_outputs_and_bitwise_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim", &small_scenario("sim-case"));
    let run = |out: &str| {
        let status = Command::new(BIN)
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--out"])
            .arg(tmp.path().join(out))
            .status()
            .unwrap();
        assert!(status.success(), "simulate exited with {status}");
        let dir = tmp.path().join(out).join("sim-case");
        (
            fs::read(dir.join("diagnostics.csv")).unwrap(),
            fs::read_to_string(dir.join("metadata.json")).unwrap(),
            fs::read(dir.join("snapshots/snap_0001.csv")).unwrap(),
        )
    };
    let (csv1, meta1, snap1) = run("r1");
    let (csv2, _meta2, snap2) = run("r2");
    assert_eq!(csv1, csv2, "diagnostics CSV not bit-identical across reruns");
    assert_eq!(snap1, snap2, "snapshot CSV not bit-identical across reruns");
    assert!(meta1.contains("\"exit_status\": 0"));
    let text = String::from_utf8(csv1).unwrap();
    assert!(text.starts_with(shocklab::output::DIAGNOSTICS_HEADER));
}

#[test]
fn sweep_emits_tree_per_strength() {
    let tmp = tempfile::tempdir().unwrap();
    let mut body = small_scenario("sweepbase");
    body.push_str("sweep_delta = 0.2,0.1,0.05\n");
    let cfg = write_config(tmp.path(), "sweep", &body);
    let status = Command::new(BIN)
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("unused"))
        .status()
        .unwrap();
    // The base scenario still simulates fine even with a sweep list.
    assert!(status.success());
    let status = Command::new(BIN)
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert!(status.success(), "sweep exited with {status}");
    let entries: Vec<String> = fs::read_dir(tmp.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(entries.len(), 3, "expected three sweep trees, got {entries:?}");
    for e in &entries {
        assert!(
            tmp.path().join("out").join(e).join("diagnostics.csv").exists(),
            "missing diagnostics in {e}"
        );
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    // Usage: missing config file.
    let status = Command::new(BIN)
        .args(["simulate", "--config", "/nonexistent/path.cfg"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Config: unknown key.
    let cfg = write_config(tmp.path(), "bad", "gamma = 1.4\nv_plus = 1\ndelta_v = 0.1\nwat = 1\n");
    let status = Command::new(BIN)
        .args(["probe", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Config: missing required key, named in the message.
    let cfg = write_config(tmp.path(), "nogamma", "v_plus = 1\ndelta_v = 0.1\n");
    let out = Command::new(BIN)
        .args(["probe", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
    // Runtime: shock too strong for the quadratic estimate.
    let cfg = write_config(
        tmp.path(),
        "strong",
        "name = strong\ngamma = 1.6666666666666667\nv_plus = 1\ndelta_v = 0.8\nn_cells = 256\nt_end = 1\n",
    );
    let dir = tmp.path().join("strongout");
    let status = Command::new(BIN)
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    let err = fs::read_to_string(dir.join("strong/error.json")).unwrap();
    assert!(err.contains("shock_too_strong"), "{err}");
}

#[test]
fn refine_doubles_resolution() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "refine", &small_scenario("ref-case"));
    let status = Command::new(BIN)
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--refine", "1", "--out"])
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert!(status.success());
    let meta = fs::read_to_string(tmp.path().join("out/ref-case/metadata.json")).unwrap();
    assert!(meta.contains("\"grid_n_cells\": 2048"), "{meta}");
}
