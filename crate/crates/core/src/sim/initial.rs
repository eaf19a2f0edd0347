use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::lp::besov::{besov_norm, BesovSpec};
use crate::lp::partition::make_partition;
use crate::sim::{Formulation, State};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Initial-data recipes. All produce real-valued mean-zero fields in
/// velocity form, band-limited to the 2/3-dealiased mode set.
#[derive(Debug, Clone)]
pub enum DataRecipe {
    /// `a = amp_a cos(<xi_k, x>)`, `u_i = amp_u[i] cos(<xi_k, x>)`.
    SingleMode {
        k: [i64; 3],
        amp_a: f64,
        amp_u: [f64; 3],
    },
    /// Hermitian Gaussian coefficients on the dyadic annuli `j_lo..=j_hi`,
    /// scaled to the requested aggregate `L^2` norm.
    RandomBand {
        j_lo: i32,
        j_hi: i32,
        amplitude: f64,
        seed: u64,
    },
    /// Smooth isotropic bump at the box center (spectral Gaussian profile)
    /// in the density plus a horizontal swirl in the velocity.
    GaussianBump { width: f64, amplitude: f64 },
    /// Random smooth data rescaled so the velocity norm in `B^{1/2}_{2,1}`
    /// hits the target; the density is scaled to `min(target, 2)` in the
    /// same norm to keep the density perturbation bounded.
    LargeData { target_u_norm: f64, seed: u64 },
}

fn fill_random_modes(
    field: &mut SpectralField,
    grid: TorusGrid,
    rng: &mut ChaCha8Rng,
    lo: f64,
    hi: f64,
    decay: f64,
) {
    let n = grid.n();
    let kmax = (n / 3) as i64;
    for c in 0..field.ncomp() {
        let mut comp = field.comp_mut(c);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let kv = [grid.k_of_index(i), grid.k_of_index(j), grid.k_of_index(k)];
                    if kv.iter().any(|&x| x.abs() > kmax) {
                        continue;
                    }
                    let r = grid.xi_norm(i, j, k);
                    if r < lo || r > hi || r == 0.0 {
                        continue;
                    }
                    let amp = (-decay * r * r).exp();
                    comp[[i, j, k]] = Complex64::new(
                        amp * (rng.random::<f64>() - 0.5),
                        amp * (rng.random::<f64>() - 0.5),
                    );
                }
            }
        }
    }
    field.hermitianize();
    field.zero_mean();
}

/// Builds initial data per the recipe; reports are deterministic in the seed.
pub fn make_initial_data(recipe: &DataRecipe, grid: TorusGrid, fft: &Fft3) -> Result<State> {
    let mut a = SpectralField::zeros(grid, 1);
    let mut u = SpectralField::zeros(grid, 3);
    match *recipe {
        DataRecipe::SingleMode { k, amp_a, amp_u } => {
            let n = grid.n() as i64;
            if k.iter().any(|&x| x.abs() > n / 3) || k == [0; 3] {
                return Err(Error::InvalidParameter(format!(
                    "single-mode wavevector {k:?} must be nonzero with |k_i| <= n/3"
                )));
            }
            let idx = |x: i64| -> usize {
                if x >= 0 {
                    x as usize
                } else {
                    (x + n) as usize
                }
            };
            let pos = [idx(k[0]), idx(k[1]), idx(k[2])];
            let neg = [idx(-k[0]), idx(-k[1]), idx(-k[2])];
            a.comp_mut(0)[pos] = Complex64::new(0.5 * amp_a, 0.0);
            a.comp_mut(0)[neg] = Complex64::new(0.5 * amp_a, 0.0);
            for c in 0..3 {
                u.comp_mut(c)[pos] = Complex64::new(0.5 * amp_u[c], 0.0);
                u.comp_mut(c)[neg] = Complex64::new(0.5 * amp_u[c], 0.0);
            }
        }
        DataRecipe::RandomBand {
            j_lo,
            j_hi,
            amplitude,
            seed,
        } => {
            if j_hi < j_lo {
                return Err(Error::InvalidParameter("band range is empty".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lo = 2f64.powi(j_lo - 1);
            let hi = 2f64.powi(j_hi + 1);
            fill_random_modes(&mut a, grid, &mut rng, lo, hi, 0.0);
            fill_random_modes(&mut u, grid, &mut rng, lo, hi, 0.0);
            let norm = (a.l2_norm().powi(2) + u.l2_norm().powi(2)).sqrt();
            if norm == 0.0 {
                return Err(Error::UnreachableTarget(
                    "no modes inside the requested bands on this grid".into(),
                ));
            }
            let c = amplitude / norm;
            a.scale(c);
            u.scale(c);
        }
        DataRecipe::GaussianBump { width, amplitude } => {
            if !(width > 0.0) {
                return Err(Error::InvalidParameter("bump width must be positive".into()));
            }
            let n = grid.n();
            let kmax = (n / 3) as i64;
            let center = 0.5 * grid.length();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let kv = [grid.k_of_index(i), grid.k_of_index(j), grid.k_of_index(k)];
                        if kv.iter().any(|&x| x.abs() > kmax) {
                            continue;
                        }
                        let xi = grid.xi(i, j, k);
                        let x2: f64 = xi.iter().map(|v| v * v).sum();
                        if x2 == 0.0 {
                            continue;
                        }
                        // Gaussian spectrum centered at the box middle
                        let phase = -(xi[0] + xi[1] + xi[2]) * center;
                        let mag = (-x2 * width * width / 4.0).exp();
                        let coeff = Complex64::from_polar(mag, phase);
                        a.comp_mut(0)[[i, j, k]] = coeff;
                        // horizontal swirl u = (d2 psi, -d1 psi, 0), psi = bump
                        u.comp_mut(0)[[i, j, k]] = Complex64::new(0.0, xi[1]) * coeff;
                        u.comp_mut(1)[[i, j, k]] = -Complex64::new(0.0, xi[0]) * coeff;
                    }
                }
            }
            a.hermitianize();
            u.hermitianize();
            a.zero_mean();
            u.zero_mean();
            let sup = a.lp_norm(crate::field::LebesgueExp::Infinity, fft, false);
            if sup == 0.0 {
                return Err(Error::UnreachableTarget("bump too narrow for this grid".into()));
            }
            let c = amplitude / sup;
            a.scale(c);
            u.scale(c * width);
        }
        DataRecipe::LargeData { target_u_norm, seed } => {
            if !(target_u_norm > 0.0) {
                return Err(Error::InvalidParameter("target norm must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lo = 0.5 * grid.fundamental();
            let hi = grid.nyquist();
            fill_random_modes(&mut a, grid, &mut rng, lo, hi, 0.05);
            fill_random_modes(&mut u, grid, &mut rng, lo, hi, 0.05);
            let part = make_partition(grid)?;
            let spec = BesovSpec::new(2.0, 1.0, 0.5)?;
            let u_norm = {
                let joined = SpectralField::stack(&[&u])?;
                besov_norm(&joined, &spec, &part, fft)?
            };
            let a_norm = besov_norm(&a, &spec, &part, fft)?;
            if u_norm == 0.0 || a_norm == 0.0 {
                return Err(Error::UnreachableTarget(
                    "random draw produced no resolvable modes".into(),
                ));
            }
            u.scale(target_u_norm / u_norm);
            a.scale(target_u_norm.min(2.0) / a_norm);
        }
    }
    State::new(a, u, Formulation::Velocity)
}
