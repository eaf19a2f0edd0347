use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::SpectralField;
use crate::sim::dealias::dealias;
use crate::sim::{Formulation, State};
use crate::symbol::FluidParams;
use ndarray::Array3;

/// Switches between velocity and momentum unknowns through the pointwise
/// relation `m = (1 + eps a) u`, re-transforming and dealiasing the result.
pub fn convert(state: &State, params: &FluidParams, fft: &Fft3, floor: f64) -> Result<State> {
    let grid = state.grid();
    let (a_physv, _) = state.a.to_physical(fft);
    let a_phys = &a_physv[0];
    let margin = a_phys
        .iter()
        .map(|&v| 1.0 + params.eps * v)
        .fold(f64::INFINITY, f64::min);
    if margin <= floor {
        return Err(Error::PositivityViolation { margin, floor });
    }
    let (vel_phys, _) = state.vel.to_physical(fft);
    let rho: Array3<f64> = a_phys.mapv(|v| 1.0 + params.eps * v);
    let target = match state.formulation {
        Formulation::Velocity => Formulation::Momentum,
        Formulation::Momentum => Formulation::Velocity,
    };
    let new_phys: Vec<Array3<f64>> = vel_phys
        .iter()
        .map(|c| {
            let mut out = c.clone();
            match state.formulation {
                Formulation::Velocity => out.zip_mut_with(&rho, |x, &r| *x *= r),
                Formulation::Momentum => out.zip_mut_with(&rho, |x, &r| *x /= r),
            }
            out
        })
        .collect();
    let mut vel = SpectralField::from_physical(grid, &new_phys, fft);
    dealias(&mut vel);
    State::new(state.a.clone(), vel, target)
}
