use crate::commands::run_simulation;
use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, write_json, CsvWriter};
use crate::CmdError;
use nsclab_core::estimates::{compute_a, compute_data_functionals, compute_e, NormSuiteSpec};
use nsclab_core::lp::make_partition;
use nsclab_core::Fft3;
use serde_json::json;

/// Runs the configured experiment and evaluates the energy norm, the
/// auxiliary norm (every summand named), and the data functionals.
pub fn run(cfg: &ExperimentConfig) -> Result<(), CmdError> {
    let hash = cfg.hash();
    let out = cfg.out_path();
    let grid = cfg.grid()?;
    let part = make_partition(grid)?;
    let fft = Fft3::new(grid.n());
    let params = cfg.params()?;
    let spec = NormSuiteSpec::new(cfg.q, cfg.r, cfg.effective_alpha(&grid), cfg.beta0)?;
    // fail fast with the violated constraint named
    spec.validate_theorem_regime()?;
    spec.validate_thresholds(params.omega, params.eps)?;

    let (series, report, initial) = run_simulation(cfg)?;
    let e = compute_e(&series, &params, &spec, &part, &fft)?;
    let a = compute_a(&series, &params, &spec, &part, &fft)?;
    let data = compute_data_functionals(&initial, &params, &part, &fft)?;

    let summands: serde_json::Map<String, serde_json::Value> = e
        .summands
        .iter()
        .chain(a.summands.iter())
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    write_json(
        &out.join("norms_report.json"),
        json!({
            "run_id": hash,
            "t": report.final_time,
            "summands": summands,
            "totals": { "E": e.total, "A": a.total },
            "data_functionals": data,
            "fitted_constants": {},
            "regime_flag": report.stable,
        }),
        &hash,
    )?;
    let mut csv = CsvWriter::create(&out.join("norms_report.csv"), &["name", "value"], &hash)?;
    for (name, value) in e.summands.iter().chain(a.summands.iter()) {
        csv.row(&[name.clone(), fmt_f64(*value)])?;
    }
    csv.row(&["total_E".into(), fmt_f64(e.total)])?;
    csv.row(&["total_A".into(), fmt_f64(a.total)])?;
    csv.row(&["D_star".into(), fmt_f64(data.d_star)])?;
    csv.row(&["D_eps".into(), fmt_f64(data.d_eps)])?;
    csv.row(&["D_upper".into(), fmt_f64(data.d_upper)])?;
    csv.finish()?;
    println!(
        "norms for run {hash} at t = {:.4}: E = {:.6e}, A = {:.6e}, D* = {:.4e} <= D_eps = {:.4e}",
        report.final_time, e.total, a.total, data.d_star, data.d_eps
    );
    Ok(())
}
