//! Batch driver: profile construction, scenario simulation, inequality
//! probes, and parameter sweeps.
//!
//! Exit codes: 0 all enabled checks pass, 1 check failure, 2 usage or
//! config error, 3 runtime failure (vacuum, solver breakdown).

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use shocklab::checks;
use shocklab::dynamics::{run, RunStatus};
use shocklab::error::Error;
use shocklab::output;
use shocklab::scenario::{parse_config, Scenario};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "shocklab",
    about = "Viscous shock stability laboratory for 1D barotropic Navier-Stokes",
    long_about = "Viscous shock stability laboratory for 1D barotropic Navier-Stokes.\n\
    Scenario files use a flat `key = value` format; every key can be\n\
    overridden from the environment with the prefix SHOCKLAB_, e.g.\n\
    SHOCKLAB_N_CELLS=16384. Exit codes: 0 all checks pass, 1 check\n\
    failure, 2 usage/config error, 3 runtime failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (flat key = value).
    #[arg(long)]
    config: PathBuf,
    /// Output directory root; overrides the scenario's out_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the scenario's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Double the spatial resolution k times (tick spacing follows dt).
    #[arg(long, default_value_t = 0)]
    refine: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the traveling wave and emit the profile CSV plus a property report.
    Profile(CommonArgs),
    /// Run the scenario, emitting diagnostics, snapshots, and a check report.
    Simulate(CommonArgs),
    /// Run the inequality probes (relative-quantity coefficients, Poincare,
    /// completed square, diffusion coefficient) without time stepping.
    Probe(CommonArgs),
    /// Run one simulation per sweep entry, in parallel, one output tree each.
    Sweep(CommonArgs),
}

fn load(args: &CommonArgs) -> Result<(Scenario, PathBuf), Error> {
    let mut scenario = parse_config(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.config.seed = seed;
    }
    scenario.refine(args.refine);
    let root = args
        .out
        .clone()
        .or_else(|| scenario.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((scenario, root))
}

fn json_pretty<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn cmd_profile(scenario: &Scenario, dir: &Path) -> Result<bool, Error> {
    let (profile, _constants) = checks::solve_scenario_profile(scenario)?;
    std::fs::create_dir_all(dir)?;
    let f = std::fs::File::create(dir.join("profile.csv"))?;
    profile.write_csv(std::io::BufWriter::new(f))?;
    let report = checks::profile_report(&profile)?;
    std::fs::write(dir.join("profile_report.json"), json_pretty(&report)?)?;
    let summary = output::CheckResult {
        name: "profile".into(),
        pass: report.pass,
        details: format!(
            "monotone: {}, rh residuals ({:.2e}, {:.2e}), misfit ({:.2e}, {:.2e}), tail slope {:.4e}, r2 {:.6}",
            report.strictly_monotone,
            report.rh_residuals.0,
            report.rh_residuals.1,
            report.far_field_misfit.0,
            report.far_field_misfit.1,
            report.tail_slope,
            report.tail_r2
        ),
    };
    output::write_report(dir, &scenario.name, std::slice::from_ref(&summary))?;
    println!("[{}] profile: {}", scenario.name, if report.pass { "PASS" } else { "FAIL" });
    Ok(report.pass)
}

fn cmd_simulate(scenario: &Scenario, dir: &Path) -> Result<bool, Error> {
    let out = run(&scenario.config)?;
    let results = checks::evaluate_enabled(scenario, &out)?;
    output::write_run_outputs(dir, scenario, &out, &results)?;
    for r in &results {
        println!(
            "[{}] {}: {} ({})",
            scenario.name,
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.details
        );
    }
    if let RunStatus::Aborted { kind, message } = &out.status {
        return Err(match kind.as_str() {
            "vacuum" => Error::Vacuum(message.clone()),
            _ => Error::SolverFailure(message.clone()),
        });
    }
    Ok(results.iter().all(|r| r.pass))
}

fn cmd_probe(scenario: &Scenario, dir: &Path) -> Result<bool, Error> {
    let (profile, constants) = checks::solve_scenario_profile(scenario)?;
    let (probe_check, report) = checks::probe_battery(&profile, &constants, scenario.config.seed)?;
    let poincare = checks::poincare_battery(scenario.config.seed);
    std::fs::create_dir_all(dir)?;
    let body = serde_json::json!({
        "scenario": scenario.name,
        "probe": report,
        "checks": [&probe_check, &poincare],
        "all_pass": probe_check.pass && poincare.pass,
    });
    std::fs::write(dir.join("probe_report.json"), json_pretty(&body)?)?;
    for r in [&probe_check, &poincare] {
        println!(
            "[{}] {}: {} ({})",
            scenario.name,
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.details
        );
    }
    Ok(probe_check.pass && poincare.pass)
}

fn cmd_sweep(base: &Scenario, root: &Path) -> Result<bool, Error> {
    if base.sweep_delta_v.is_empty() {
        return Err(Error::Usage(
            "sweep requires `sweep_delta_v` or `sweep_delta` in the scenario".into(),
        ));
    }
    let members: Vec<Scenario> = base
        .sweep_delta_v
        .iter()
        .map(|&dv| {
            let mut s = base.clone();
            s.config.delta_v = dv;
            s.name = format!("{}-dv{dv}", base.name);
            s.sweep_delta_v.clear();
            s
        })
        .collect();
    let mut names: Vec<&str> = members.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() != members.len() {
        return Err(Error::Usage("sweep entries must produce unique scenario names".into()));
    }
    let outcomes: Vec<Result<bool, Error>> = members
        .par_iter()
        .map(|s| cmd_simulate(s, &root.join(&s.name)))
        .collect();
    let mut all = true;
    for (s, outcome) in members.iter().zip(outcomes) {
        match outcome {
            Ok(pass) => all &= pass,
            Err(e) => {
                let _ = output::write_error_json(&root.join(&s.name), &e);
                eprintln!("[{}] failed: {e}", s.name);
                all = false;
            }
        }
    }
    Ok(all)
}

fn main() -> ExitCode {
    let command = <Cli as clap::CommandFactory>::command().after_long_help(format!(
        "Scenario keys and their defaults (the built-in default scenario):\n\n{}",
        shocklab::scenario::DEFAULT_SCENARIO
    ));
    let cli = match <Cli as clap::FromArgMatches>::from_arg_matches(&command.get_matches()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let (args, runner): (&CommonArgs, fn(&Scenario, &Path) -> Result<bool, Error>) =
        match &cli.command {
            Command::Profile(a) => (a, cmd_profile),
            Command::Simulate(a) => (a, cmd_simulate),
            Command::Probe(a) => (a, cmd_probe),
            Command::Sweep(a) => (a, cmd_sweep),
        };
    let (scenario, root) = match load(args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let dir = match &cli.command {
        Command::Sweep(_) => root.clone(),
        _ => root.join(&scenario.name),
    };
    match runner(&scenario, &dir) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = output::write_error_json(&dir, &e);
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
