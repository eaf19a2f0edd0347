use crate::commands::{run_simulation, stepper_config};
use crate::config::ExperimentConfig;
use crate::output::write_json;
use crate::CmdError;
use nsclab_core::sim::{write_manifest, write_snapshot, Manifest, ManifestEntry};
use serde_json::json;

/// Full nonlinear run with snapshot files, a manifest, and a run report.
/// Instability exits with code 3 after writing the partial artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<(), CmdError> {
    let hash = cfg.hash();
    let out = cfg.out_path();
    std::fs::create_dir_all(&out)?;
    let params = cfg.params()?;
    stepper_config(cfg)?;
    let (series, report, _) = run_simulation(cfg)?;

    let mut entries = Vec::new();
    for (idx, (t, state)) in series.times.iter().zip(series.states.iter()).enumerate() {
        let name = format!("snap_{idx:05}.bin");
        write_snapshot(&out.join(&name), *t, state, &params)?;
        entries.push(ManifestEntry { path: name, t: *t });
    }
    let manifest = Manifest {
        version: 1,
        n: cfg.n,
        box_length: cfg.box_length,
        mu: cfg.mu,
        omega: cfg.omega,
        eps: cfg.eps,
        gamma: cfg.gamma,
        dt: report.dt_used,
        scheme_order: cfg.scheme,
        config_hash: Some(hash.clone()),
        snapshots: entries,
    };
    write_manifest(&out.join("manifest.json"), &manifest)?;
    write_json(
        &out.join("run_report.json"),
        json!({
            "run_id": hash,
            "steps_taken": report.steps_taken,
            "dt_used": report.dt_used,
            "final_time": report.final_time,
            "stable": report.stable,
            "failure": report.failure,
            "mean_a_drift": report.mean_a_drift(),
            "margin_history": report.margin_history,
        }),
        &hash,
    )?;
    println!(
        "run {hash}: {} steps to t = {:.4}, stable = {}, snapshots = {}",
        report.steps_taken,
        report.final_time,
        report.stable,
        series.times.len()
    );
    if report.stable {
        Ok(())
    } else {
        Err(CmdError::unstable(format!(
            "run halted at t = {:.4}: {}",
            report.failure.as_ref().map(|f| f.0).unwrap_or(0.0),
            report.failure.as_ref().map(|f| f.1.clone()).unwrap_or_default()
        )))
    }
}
