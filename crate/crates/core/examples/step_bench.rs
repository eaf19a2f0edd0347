use nsclab_core::sim::{make_initial_data, DataRecipe, SchemeOrder, Stepper, StepperConfig};
use nsclab_core::symbol::{FluidParams, PressureLaw};
use nsclab_core::{Fft3, TorusGrid};
use std::time::Instant;

fn main() {
    let n = 32;
    let grid = TorusGrid::new(n, 2.0 * std::f64::consts::PI).unwrap();
    let fft = Fft3::new(n);
    let phys = ndarray::Array3::from_shape_fn((n, n, n), |(i, j, k)| (i + 2 * j + 3 * k) as f64 * 0.001);
    let t0 = Instant::now();
    let reps = 200;
    let mut spec = fft.forward(&phys);
    for _ in 0..reps { spec = fft.forward(&phys); }
    println!("forward: {:.3} ms", t0.elapsed().as_secs_f64() * 1e3 / reps as f64);
    let t0 = Instant::now();
    for _ in 0..reps { let _ = fft.inverse_real(&spec); }
    println!("inverse: {:.3} ms", t0.elapsed().as_secs_f64() * 1e3 / reps as f64);

    let params = FluidParams::new(0.25, 10.0, 0.05, PressureLaw::gamma_law(1.4).unwrap()).unwrap();
    let cfg = StepperConfig { dt: 1e-3, scheme: SchemeOrder::Two, snapshot_every: 1000, ..Default::default() };
    let stepper = Stepper::new(grid, params, cfg).unwrap();
    let stepper_m = Stepper::new(grid, params, cfg).unwrap();
    let init = make_initial_data(&DataRecipe::RandomBand { j_lo: 1, j_hi: 3, amplitude: 0.1, seed: 1 }, grid, stepper.fft()).unwrap();
    use nsclab_core::sim::nonlinearity_velocity;
    // momentum-form eval and a full RK2 step
    let minit = nsclab_core::sim::convert(&init, &params, &fft, 0.05).unwrap();
    let t0 = Instant::now();
    for _ in 0..50 { let _ = nsclab_core::sim::nonlinearity_momentum(&minit, &params, &fft, true, 0.05).unwrap(); }
    println!("momentum rhs eval: {:.3} ms", t0.elapsed().as_secs_f64() * 1e3 / 50.0);
    let t0 = Instant::now();
    let mut ms = minit.clone();
    for _ in 0..50 { ms = stepper_m.step(&ms).unwrap(); }
    println!("momentum rk2 step: {:.3} ms", t0.elapsed().as_secs_f64() * 1e3 / 50.0);
    let t0 = Instant::now();
    let reps = 50;
    for _ in 0..reps { let _ = nonlinearity_velocity(&init, &params, &fft, true, 0.05).unwrap(); }
    println!("one rhs eval: {:.3} ms", t0.elapsed().as_secs_f64() * 1e3 / reps as f64);
}
