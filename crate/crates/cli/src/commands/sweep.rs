use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, write_json, CsvWriter};
use crate::CmdError;
use nsclab_core::estimates::{
    continuation_probe, row_monotone_fraction, upward_closed_fraction, ProbeSetup,
};
use nsclab_core::sim::DataRecipe;
use serde_json::json;

/// Runs the `(Omega, eps)` grid at every seed and writes the stability map.
/// Per-cell failures are recorded in the map; the sweep itself completes.
pub fn run(cfg: &ExperimentConfig) -> Result<(), CmdError> {
    if cfg.omegas.is_empty() || cfg.epss.is_empty() || cfg.seeds.is_empty() {
        return Err(CmdError::validation("sweep grid must be nonempty"));
    }
    let hash = cfg.hash();
    let out = cfg.out_path();
    let grid = cfg.grid()?;
    let setup = ProbeSetup {
        mu: cfg.mu,
        gamma: cfg.gamma,
        scheme: cfg.scheme_order().map_err(CmdError::validation)?,
        snapshot_every: cfg.cadence,
        horizon: cfg.horizon,
        multiplier: cfg.multiplier,
        positivity_floor: cfg.positivity_floor,
        beta0: cfg.beta0,
        ..Default::default()
    };
    let amplitude = cfg.amplitude;
    let map = continuation_probe(
        grid,
        &move |seed| DataRecipe::LargeData {
            target_u_norm: amplitude,
            seed,
        },
        &cfg.omegas,
        &cfg.epss,
        &cfg.seeds,
        &setup,
    )?;

    let mut csv = CsvWriter::create(
        &out.join("regime_map.csv"),
        &[
            "omega", "eps", "seed", "stable", "completed", "peak_E", "reference_E", "fail_time",
        ],
        &hash,
    )?;
    for c in &map.cells {
        csv.row(&[
            fmt_f64(c.omega),
            fmt_f64(c.eps),
            c.seed.to_string(),
            (c.stable as u8).to_string(),
            (c.completed as u8).to_string(),
            fmt_f64(c.peak_e),
            fmt_f64(c.reference_e),
            c.fail_time.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    csv.finish()?;

    let upward = upward_closed_fraction(&map);
    let monotone = row_monotone_fraction(&map);
    write_json(
        &out.join("regime_summary.json"),
        json!({
            "upward_closed_fraction": upward,
            "row_monotone_fraction": monotone,
            "multiplier": map.multiplier,
            "omegas": map.omegas,
            "epss": map.epss,
            "seeds": map.seeds,
        }),
        &hash,
    )?;
    let failed: Vec<_> = map
        .cells
        .iter()
        .filter(|c| !c.completed && c.failure.is_some())
        .collect();
    if !failed.is_empty() {
        println!("{} cells reported failures; first: {}", failed.len(),
            failed[0].failure.as_deref().unwrap_or(""));
    }
    println!("regime map (config {hash}):");
    for &eps in &cfg.epss {
        print!("  eps = {eps:6.3}: ");
        for &om in &cfg.omegas {
            let frac = map.stability_fraction(eps, om);
            print!(" Omega {om:6.1} -> {frac:.2}");
        }
        println!();
    }
    println!(
        "  upward-closed rows: {:.0}%  |  monotone stability rows: {:.0}%",
        100.0 * upward,
        100.0 * monotone
    );
    Ok(())
}
