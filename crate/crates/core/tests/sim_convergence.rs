//! Convergence studies for the exponential time stepper: quadratic smallness
//! of the nonlinear correction, self-convergence at the nominal order, the
//! exact-linear oracle, and the velocity/momentum cross-check.

use nalgebra::Vector4;
use nsclab_core::sim::{
    convert, make_initial_data, DataRecipe, Formulation, SchemeOrder, State, Stepper,
    StepperConfig,
};
use nsclab_core::symbol::{log_log_slope, propagator, FluidParams, PressureLaw};
use nsclab_core::{Fft3, SpectralField, TorusGrid};

fn gamma14() -> PressureLaw {
    PressureLaw::gamma_law(1.4).unwrap()
}

fn grid16() -> TorusGrid {
    TorusGrid::new(16, 2.0 * std::f64::consts::PI).unwrap()
}

/// Exact linear solution at time `t` (per-mode propagator application).
fn exact_linear(state: &State, params: &FluidParams, t: f64) -> State {
    let grid = state.grid();
    let n = grid.n();
    let stacked = state.stacked();
    let mut out = SpectralField::zeros(grid, 4);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let phi = propagator(t, grid.xi(i, j, k), params);
                let v = Vector4::new(
                    stacked.comp(0)[[i, j, k]],
                    stacked.comp(1)[[i, j, k]],
                    stacked.comp(2)[[i, j, k]],
                    stacked.comp(3)[[i, j, k]],
                );
                let w = phi * v;
                for c in 0..4 {
                    out.comp_mut(c)[[i, j, k]] = w[c];
                }
            }
        }
    }
    State::from_stacked(&out, state.formulation).unwrap()
}

fn seeded_data(grid: TorusGrid, fft: &Fft3, amplitude: f64, seed: u64) -> State {
    make_initial_data(
        &DataRecipe::RandomBand {
            j_lo: 1,
            j_hi: 2,
            amplitude,
            seed,
        },
        grid,
        fft,
    )
    .unwrap()
}

#[test]
fn nonlinear_correction_is_quadratically_small() {
    // || numerical - exact-linear || = O(amplitude^2): slope 2 +- 0.1
    let grid = grid16();
    let params = FluidParams::new(0.25, 2.0, 0.5, gamma14()).unwrap();
    let cfg = StepperConfig {
        dt: 0.005,
        scheme: SchemeOrder::Two,
        snapshot_every: 1000,
        ..Default::default()
    };
    let stepper = Stepper::new(grid, params, cfg).unwrap();
    let t_final = 0.1;
    let deltas = [1e-2, 1e-3, 1e-4];
    let mut errs = Vec::new();
    for &delta in &deltas {
        let init = seeded_data(grid, stepper.fft(), delta, 31);
        let (series, report) = stepper.simulate(&init, t_final).unwrap();
        assert!(report.stable);
        let num = series.states.last().unwrap();
        let lin = exact_linear(&init, &params, t_final);
        let err = num.stacked().sub(&lin.stacked()).l2_norm();
        errs.push(err);
    }
    let slope = log_log_slope(&deltas.to_vec(), &errs);
    assert!(
        (slope - 2.0).abs() <= 0.1,
        "quadratic smallness violated: slope {slope}, errors {errs:?}"
    );
}

#[test]
fn self_convergence_matches_scheme_order() {
    let grid = grid16();
    let params = FluidParams::new(0.25, 1.0, 0.5, gamma14()).unwrap();
    let t_final = 0.16;
    for (scheme, nominal) in [(SchemeOrder::Two, 2.0), (SchemeOrder::Four, 4.0)] {
        let run = |dt: f64| -> State {
            let cfg = StepperConfig {
                dt,
                scheme,
                snapshot_every: 100_000,
                ..Default::default()
            };
            let stepper = Stepper::new(grid, params, cfg).unwrap();
            let init = seeded_data(grid, stepper.fft(), 0.4, 17);
            let (series, report) = stepper.simulate(&init, t_final).unwrap();
            assert!(report.stable);
            series.states.last().unwrap().clone()
        };
        let reference = run(0.0005);
        let dts = [0.016, 0.008, 0.004];
        let errs: Vec<f64> = dts
            .iter()
            .map(|&dt| run(dt).stacked().sub(&reference.stacked()).l2_norm())
            .collect();
        let slope = log_log_slope(&dts.to_vec(), &errs);
        assert!(
            (slope - nominal).abs() <= 0.2,
            "scheme order {nominal}: measured slope {slope}, errors {errs:?}"
        );
    }
}

#[test]
fn linear_regime_run_matches_per_mode_oracle() {
    // tiny data at n = 32, T = 1, dt = 1e-3: the nonlinear solution stays
    // within 1e-6 of the exact linear flow
    let grid = TorusGrid::new(32, 2.0 * std::f64::consts::PI).unwrap();
    let params = FluidParams::new(0.25, 2.0, 0.5, gamma14()).unwrap();
    let cfg = StepperConfig {
        dt: 1e-3,
        scheme: SchemeOrder::Two,
        snapshot_every: 1000,
        ..Default::default()
    };
    let stepper = Stepper::new(grid, params, cfg).unwrap();
    let init = make_initial_data(
        &DataRecipe::RandomBand {
            j_lo: 1,
            j_hi: 3,
            amplitude: 1e-4,
            seed: 5,
        },
        grid,
        stepper.fft(),
    )
    .unwrap();
    let (series, report) = stepper.simulate(&init, 1.0).unwrap();
    assert!(report.stable);
    let lin = exact_linear(&init, &params, 1.0);
    let err = series
        .states
        .last()
        .unwrap()
        .stacked()
        .sub(&lin.stacked())
        .l2_norm();
    assert!(err <= 1e-6, "linear-regime deviation {err}");
}

#[test]
fn velocity_and_momentum_runs_converge_together() {
    // identical physical data evolved in both formulations: the gap decays
    // monotonically under dt refinement
    let grid = grid16();
    let params = FluidParams::new(0.25, 1.0, 0.5, gamma14()).unwrap();
    let fft = Fft3::new(grid.n());
    let t_final = 0.08;
    let init_v = seeded_data(grid, &fft, 0.4, 23);
    let init_m = convert(&init_v, &params, &fft, 0.05).unwrap();
    assert_eq!(init_m.formulation, Formulation::Momentum);
    let gap = |dt: f64| -> f64 {
        let cfg = StepperConfig {
            dt,
            scheme: SchemeOrder::Two,
            snapshot_every: 100_000,
            ..Default::default()
        };
        let stepper = Stepper::new(grid, params, cfg).unwrap();
        let (sv, rv) = stepper.simulate(&init_v, t_final).unwrap();
        let (sm, rm) = stepper.simulate(&init_m, t_final).unwrap();
        assert!(rv.stable && rm.stable);
        let av = &sv.states.last().unwrap().a;
        let am = &sm.states.last().unwrap().a;
        av.sub(am).l2_norm()
    };
    let gaps: Vec<f64> = [0.016, 0.008, 0.004].iter().map(|&dt| gap(dt)).collect();
    assert!(
        gaps[1] < gaps[0] && gaps[2] < gaps[1],
        "formulation gap not decreasing: {gaps:?}"
    );
}
