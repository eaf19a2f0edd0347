pub mod apriori;
pub mod linear_decay;
pub mod norms;
pub mod simulate;
pub mod strichartz;
pub mod sweep;
pub mod symbol;
pub mod verify_all;

use crate::config::ExperimentConfig;
use crate::CmdError;
use nsclab_core::sim::RunReport;
use nsclab_core::sim::{State, StateSeries, Stepper, StepperConfig};

/// Stepper configuration resolved from the experiment config; `dt = 0`
/// selects the scheme's acoustic resolution bound.
pub fn stepper_config(cfg: &ExperimentConfig) -> Result<StepperConfig, CmdError> {
    let scheme = cfg.scheme_order().map_err(CmdError::validation)?;
    let grid = cfg.grid()?;
    let mut sc = StepperConfig {
        dt: cfg.dt,
        scheme,
        dealias: cfg.dealias,
        snapshot_every: cfg.cadence,
        positivity_floor: cfg.positivity_floor,
    };
    if sc.dt == 0.0 {
        sc.dt = sc.dt_limit(&grid, cfg.eps);
    }
    Ok(sc)
}

/// Runs the configured simulation in memory, returning the series even when
/// the run went unstable (callers decide whether that is fatal).
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<(StateSeries, RunReport, State), CmdError> {
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let sc = stepper_config(cfg)?;
    let stepper = Stepper::new(grid, params, sc)?;
    let recipe = cfg.recipe().map_err(CmdError::validation)?;
    let initial = nsclab_core::sim::make_initial_data(&recipe, grid, stepper.fft())?;
    let (series, report) = stepper.simulate(&initial, cfg.horizon)?;
    Ok((series, report, initial))
}
