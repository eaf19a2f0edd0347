use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::sim::nonlinear::{nonlinearity_momentum, nonlinearity_velocity};
use crate::sim::{Formulation, SchemeOrder, State, StepperConfig};
use crate::symbol::propagator::PropagatorTable;
use crate::symbol::FluidParams;
use num_complex::Complex64;

/// Snapshots recorded along a run.
#[derive(Debug, Clone)]
pub struct StateSeries {
    pub times: Vec<f64>,
    pub states: Vec<State>,
}

/// Outcome bookkeeping for a completed (or aborted) run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub steps_taken: usize,
    pub dt_used: f64,
    pub final_time: f64,
    pub stable: bool,
    pub failure: Option<(f64, String)>,
    /// `(t, min(1 + eps a))` at snapshot cadence.
    pub margin_history: Vec<(f64, f64)>,
    pub mean_a_initial: Complex64,
    pub mean_a_final: Complex64,
}

impl RunReport {
    pub fn mean_a_drift(&self) -> f64 {
        (self.mean_a_final - self.mean_a_initial).norm()
    }
}

/// Lawson exponential Runge-Kutta stepper: the stiff linear symbol is applied
/// exactly through per-mode propagators, the nonlinearity pseudospectrally.
pub struct Stepper {
    grid: TorusGrid,
    params: FluidParams,
    cfg: StepperConfig,
    fft: Fft3,
    phi_full: PropagatorTable,
    phi_half: PropagatorTable,
    nonlinear_enabled: bool,
}

impl Stepper {
    pub fn new(grid: TorusGrid, params: FluidParams, cfg: StepperConfig) -> Result<Self> {
        crate::tune_allocator();
        cfg.validate()?;
        let limit = cfg.dt_limit(&grid, params.eps);
        if cfg.dt > limit * (1.0 + 1e-12) {
            return Err(Error::ConstraintViolated(format!(
                "dt = {} exceeds the acoustic resolution bound {:.6e} for this scheme",
                cfg.dt, limit
            )));
        }
        let fft = Fft3::new(grid.n());
        let phi_full = PropagatorTable::build(grid, &params, cfg.dt);
        let phi_half = PropagatorTable::build(grid, &params, 0.5 * cfg.dt);
        Ok(Self {
            grid,
            params,
            cfg,
            fft,
            phi_full,
            phi_half,
            nonlinear_enabled: true,
        })
    }

    /// Disables the nonlinear terms; the step then applies the exact linear
    /// flow. Used by linear-limit and consistency checks.
    pub fn with_nonlinearity(mut self, enabled: bool) -> Self {
        self.nonlinear_enabled = enabled;
        self
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    fn rhs(&self, state: &State) -> Result<SpectralField> {
        let (ra, rv) = match state.formulation {
            Formulation::Velocity => nonlinearity_velocity(
                state,
                &self.params,
                &self.fft,
                self.cfg.dealias,
                self.cfg.positivity_floor,
            )?,
            Formulation::Momentum => nonlinearity_momentum(
                state,
                &self.params,
                &self.fft,
                self.cfg.dealias,
                self.cfg.positivity_floor,
            )?,
        };
        Ok(SpectralField::stack(&[&ra, &rv]).expect("same grid"))
    }

    fn apply(&self, table: &PropagatorTable, f: &SpectralField) -> SpectralField {
        let mut out = f.clone();
        table.apply(&mut out);
        out
    }

    /// One step of the chosen Lawson scheme.
    pub fn step(&self, state: &State) -> Result<State> {
        let u = state.stacked();
        let h = self.cfg.dt;
        let formulation = state.formulation;
        let next = if !self.nonlinear_enabled {
            self.apply(&self.phi_full, &u)
        } else {
            match self.cfg.scheme {
                SchemeOrder::Two => {
                    // exponential midpoint:
                    //   k1 = N(U)
                    //   k2 = N(Phi_h/2 (U + h/2 k1))
                    //   U+ = Phi_h U + h Phi_h/2 k2
                    let k1 = self.rhs(state)?;
                    let mut mid = u.clone();
                    mid.add_assign(&k1.scaled(0.5 * h));
                    let mid = self.apply(&self.phi_half, &mid);
                    let k2 = self.rhs(&State::from_stacked(&mid, formulation)?)?;
                    let mut out = self.apply(&self.phi_full, &u);
                    out.add_assign(&self.apply(&self.phi_half, &k2).scaled(h));
                    out
                }
                SchemeOrder::Four => {
                    // classical Lawson RK4
                    let k1 = self.rhs(state)?;
                    let mut s2 = u.clone();
                    s2.add_assign(&k1.scaled(0.5 * h));
                    let s2 = self.apply(&self.phi_half, &s2);
                    let k2 = self.rhs(&State::from_stacked(&s2, formulation)?)?;
                    let half_u = self.apply(&self.phi_half, &u);
                    let mut s3 = half_u.clone();
                    s3.add_assign(&k2.scaled(0.5 * h));
                    let k3 = self.rhs(&State::from_stacked(&s3, formulation)?)?;
                    let mut s4 = self.apply(&self.phi_half, &half_u);
                    s4.add_assign(&self.apply(&self.phi_half, &k3).scaled(h));
                    let k4 = self.rhs(&State::from_stacked(&s4, formulation)?)?;
                    let mut out = self.apply(&self.phi_full, &u);
                    out.add_assign(&self.apply(&self.phi_full, &k1).scaled(h / 6.0));
                    let mut k23 = k2;
                    k23.add_assign(&k3);
                    out.add_assign(&self.apply(&self.phi_half, &k23).scaled(h / 3.0));
                    out.add_assign(&k4.scaled(h / 6.0));
                    out
                }
            }
        };
        if !next.is_finite() {
            return Err(Error::NonFinite("time step produced NaN/Inf".into()));
        }
        State::from_stacked(&next, formulation)
    }

    /// Steps to the horizon, invoking `observe` at `t = 0` and then every
    /// `snapshot_every` steps (plus the final time). Returns the run report;
    /// on instability the report carries the failure time and reason.
    pub fn run_with<F: FnMut(f64, &State)>(
        &self,
        initial: &State,
        horizon: f64,
        mut observe: F,
    ) -> Result<RunReport> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        // land exactly on the horizon without exceeding the configured step
        let n_steps = (horizon / self.cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let dt_used = horizon / n_steps as f64;
        let rebuilt;
        let stepper: &Stepper = if (dt_used - self.cfg.dt).abs() > 1e-12 * self.cfg.dt {
            let mut cfg = self.cfg;
            cfg.dt = dt_used;
            rebuilt = Stepper::new(self.grid, self.params, cfg)?
                .with_nonlinearity(self.nonlinear_enabled);
            &rebuilt
        } else {
            self
        };
        let mean_a_initial = initial.a.mean(0);
        let mut margin_history = Vec::new();
        let mut state = initial.clone();
        let mut t = 0.0;
        observe(t, &state);
        margin_history.push((t, state.positivity_margin(self.params.eps, &self.fft)));
        let mut failure = None;
        let mut steps_taken = 0;
        for step_idx in 1..=n_steps {
            match stepper.step(&state) {
                Ok(next) => {
                    state = next;
                    t = step_idx as f64 * dt_used;
                    steps_taken += 1;
                }
                Err(e) => {
                    failure = Some((t, e.to_string()));
                    break;
                }
            }
            if step_idx % self.cfg.snapshot_every == 0 || step_idx == n_steps {
                observe(t, &state);
                let margin = state.positivity_margin(self.params.eps, &self.fft);
                margin_history.push((t, margin));
                if margin <= self.cfg.positivity_floor {
                    failure = Some((t, format!("positivity margin {margin} below floor")));
                    break;
                }
            }
        }
        Ok(RunReport {
            steps_taken,
            dt_used,
            final_time: t,
            stable: failure.is_none(),
            failure,
            margin_history,
            mean_a_initial,
            mean_a_final: state.a.mean(0),
        })
    }

    /// Steps to the horizon collecting snapshots per cadence.
    pub fn simulate(&self, initial: &State, horizon: f64) -> Result<(StateSeries, RunReport)> {
        let mut times = Vec::new();
        let mut states = Vec::new();
        let report = self.run_with(initial, horizon, |t, s| {
            times.push(t);
            states.push(s.clone());
        })?;
        Ok((StateSeries { times, states }, report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::initial::{make_initial_data, DataRecipe};
    use crate::symbol::{propagator, PressureLaw};
    use nalgebra::Vector4;

    fn gamma14() -> PressureLaw {
        PressureLaw::gamma_law(1.4).unwrap()
    }

    fn grid16() -> TorusGrid {
        TorusGrid::new(16, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn dt_gate_enforced() {
        let grid = grid16();
        let params = FluidParams::new(0.25, 1.0, 0.1, gamma14()).unwrap();
        let cfg = StepperConfig {
            dt: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            Stepper::new(grid, params, cfg),
            Err(Error::ConstraintViolated(_))
        ));
    }

    #[test]
    fn linear_only_step_equals_exact_propagator() {
        let grid = grid16();
        let params = FluidParams::new(0.25, 2.0, 0.5, gamma14()).unwrap();
        let cfg = StepperConfig {
            dt: 0.01,
            ..Default::default()
        };
        let stepper = Stepper::new(grid, params, cfg).unwrap().with_nonlinearity(false);
        let init = make_initial_data(
            &DataRecipe::RandomBand {
                j_lo: 1,
                j_hi: 2,
                amplitude: 0.5,
                seed: 4,
            },
            grid,
            stepper.fft(),
        )
        .unwrap();
        let next = stepper.step(&init).unwrap();
        // oracle: per-mode exact propagator applied to the stacked spectrum
        let stacked = init.stacked();
        let n = grid.n();
        let mut expect = SpectralField::zeros(grid, 4);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let phi = propagator(0.01, grid.xi(i, j, k), &params);
                    let v = Vector4::new(
                        stacked.comp(0)[[i, j, k]],
                        stacked.comp(1)[[i, j, k]],
                        stacked.comp(2)[[i, j, k]],
                        stacked.comp(3)[[i, j, k]],
                    );
                    let w = phi * v;
                    for c in 0..4 {
                        expect.comp_mut(c)[[i, j, k]] = w[c];
                    }
                }
            }
        }
        let err = next.stacked().sub(&expect).l2_norm();
        assert!(err < 1e-12, "linear step deviates by {err}");
    }

    #[test]
    fn mean_density_is_conserved() {
        let grid = grid16();
        let params = FluidParams::new(0.25, 3.0, 0.2, gamma14()).unwrap();
        let cfg = StepperConfig {
            dt: 0.005,
            snapshot_every: 20,
            ..Default::default()
        };
        let stepper = Stepper::new(grid, params, cfg).unwrap();
        let init = make_initial_data(
            &DataRecipe::RandomBand {
                j_lo: 1,
                j_hi: 2,
                amplitude: 0.3,
                seed: 11,
            },
            grid,
            stepper.fft(),
        )
        .unwrap();
        let (_, report) = stepper.simulate(&init, 0.5).unwrap();
        assert!(report.stable);
        assert!(report.mean_a_drift() <= 1e-13, "drift {}", report.mean_a_drift());
    }

    #[test]
    fn hermitian_symmetry_survives_stepping() {
        let grid = grid16();
        let params = FluidParams::new(0.3, 5.0, 0.25, gamma14()).unwrap();
        let cfg = StepperConfig {
            dt: 0.005,
            scheme: SchemeOrder::Two,
            ..Default::default()
        };
        let stepper = Stepper::new(grid, params, cfg).unwrap();
        let init = make_initial_data(
            &DataRecipe::RandomBand {
                j_lo: 1,
                j_hi: 2,
                amplitude: 0.4,
                seed: 8,
            },
            grid,
            stepper.fft(),
        )
        .unwrap();
        let mut state = init;
        for _ in 0..100 {
            state = stepper.step(&state).unwrap();
        }
        assert!(state.a.hermitian_defect() < 1e-12);
        assert!(state.vel.hermitian_defect() < 1e-12);
    }
}
