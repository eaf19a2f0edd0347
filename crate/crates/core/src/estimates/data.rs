use crate::error::Result;
use crate::fft::Fft3;
use crate::lp::besov::{besov_norm, BesovSpec};
use crate::lp::partition::DyadicPartition;
use crate::sim::State;
use crate::symbol::FluidParams;
use serde::Serialize;

/// Size functionals of the initial data. `d_star` enters the low-frequency
/// estimate, `d_eps` the full energy bound, and `d_upper` is the
/// `eps`-independent majorant appearing in the sandwich
/// `D_eps <= C4 * D`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DataFunctionals {
    /// `||(a0,u0)||_{B^{-3/2}_{2,inf}} + eps ||a0||_{B^{3/2}_{2,1}} ||u0||_{B^{-3/2}_{2,inf}}`
    pub d_star: f64,
    /// `d_star + ||(a0,u0)||_{B^{1/2}_{2,1}} + eps ||a0||_{B^{3/2}_{2,1}}`
    pub d_eps: f64,
    /// `||a0||_{B^{-3/2}_{2,inf} ^ B^{3/2}_{2,1}} + ||u0||_{B^{-3/2}_{2,inf} ^ B^{1/2}_{2,1}}
    ///  + ||a0||_{B^{3/2}_{2,1}} ||a0||_{B^{-3/2}_{2,inf}}` (intersection = sum)
    pub d_upper: f64,
}

pub fn compute_data_functionals(
    initial: &State,
    params: &FluidParams,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<DataFunctionals> {
    let low = BesovSpec::new(2.0, f64::INFINITY, -1.5)?;
    let mid = BesovSpec::new(2.0, 1.0, 0.5)?;
    let high = BesovSpec::new(2.0, 1.0, 1.5)?;

    let stacked = initial.stacked();
    let au_low = besov_norm(&stacked, &low, part, fft)?;
    let au_mid = besov_norm(&stacked, &mid, part, fft)?;
    let a_low = besov_norm(&initial.a, &low, part, fft)?;
    let a_high = besov_norm(&initial.a, &high, part, fft)?;
    let u_low = besov_norm(&initial.vel, &low, part, fft)?;
    let u_mid = besov_norm(&initial.vel, &mid, part, fft)?;

    let d_star = au_low + params.eps * a_high * u_low;
    let d_eps = d_star + au_mid + params.eps * a_high;
    let d_upper = (a_low + a_high) + (u_low + u_mid) + a_high * a_low;
    Ok(DataFunctionals {
        d_star,
        d_eps,
        d_upper,
    })
}
