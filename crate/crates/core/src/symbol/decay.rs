use crate::error::{Error, Result};
use crate::symbol::expm::op_norm_2;
use crate::symbol::{decay_rate_kappa, propagator, symbol_eigenvalues, FluidParams};
use rayon::prelude::*;

/// Decay-verification configuration: the frequency threshold `beta >= 1`
/// controlling the validity region `|xi| <= 2 beta / eps` and the guaranteed
/// rate `kappa / (48 beta^2)`.
#[derive(Debug, Clone, Copy)]
pub struct DecaySetup {
    pub beta: f64,
    pub fit_samples: usize,
    pub horizon_cap: f64,
}

impl Default for DecaySetup {
    fn default() -> Self {
        Self {
            beta: 1.0,
            fit_samples: 33,
            horizon_cap: 1e4,
        }
    }
}

/// Measured decay behavior of one mode.
#[derive(Debug, Clone)]
pub struct ModeDecayReport {
    pub xi: [f64; 3],
    pub kappa: f64,
    /// `max Re(-lambda)` over the symbol's eigenvalues.
    pub abscissa: f64,
    /// Least-squares rate of `log ||Phi(t)||_2` over `[T/2, T]`.
    pub fitted_rate: f64,
    /// Largest `||Phi(t)||_2 e^{required t}` over the fit window.
    pub prefactor: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    slope(&lx, &ly)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Verifies the guaranteed mode decay on a sample of frequencies: for each
/// mode inside the validity region the spectral abscissa must clear
/// `-kappa/(48 beta^2)` and the fitted propagator decay rate must reach the
/// same threshold. A mode failing either check is a hard error.
pub fn verify_decay_bound(
    params: &FluidParams,
    setup: &DecaySetup,
    modes: &[[f64; 3]],
) -> Result<Vec<ModeDecayReport>> {
    if !(setup.beta >= 1.0) {
        return Err(Error::ConstraintViolated("beta >= 1".into()));
    }
    if !(params.eps > 0.0 && params.eps <= 1.0) {
        return Err(Error::ConstraintViolated("0 < eps <= 1".into()));
    }
    let omega_eps = (params.omega * params.eps).abs();
    if omega_eps > setup.beta / params.eps {
        return Err(Error::ConstraintViolated("|Omega| eps <= beta / eps".into()));
    }
    let radius = 2.0 * setup.beta / params.eps;
    let reports: Vec<Result<ModeDecayReport>> = modes
        .par_iter()
        .map(|&xi| {
            let xn = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            if xn > radius {
                return Err(Error::ConstraintViolated(format!(
                    "|xi| = {xn} exceeds validity radius {radius}"
                )));
            }
            let kappa = if xn == 0.0 && omega_eps == 0.0 {
                0.0
            } else {
                decay_rate_kappa(xn, omega_eps)?
            };
            let required = kappa / (48.0 * setup.beta * setup.beta);
            let ev = symbol_eigenvalues(xi, params);
            let min_re = ev.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
            let abscissa = -min_re;
            if abscissa > -required + 1e-12 {
                return Err(Error::DecayBoundViolation {
                    xi,
                    abscissa,
                    required: -required,
                });
            }
            let mut horizon = if required > 0.0 {
                (10.0 / required).min(setup.horizon_cap)
            } else {
                setup.horizon_cap
            };
            let slowest_rate = -abscissa; // = min Re(lambda) > 0 for decaying modes
            if slowest_rate > 0.0 {
                // keep ||Phi|| representable when the true decay far
                // outpaces the guaranteed rate
                horizon = horizon.min(300.0 / slowest_rate);
            }
            let m = setup.fit_samples.max(2);
            let mut ts = Vec::with_capacity(m);
            let mut logs = Vec::with_capacity(m);
            let mut prefactor = 0.0f64;
            for i in 0..m {
                let t = 0.5 * horizon + 0.5 * horizon * i as f64 / (m - 1) as f64;
                let norm = op_norm_2(&propagator(t, xi, params));
                if norm <= 0.0 {
                    break;
                }
                ts.push(t);
                logs.push(norm.ln());
                prefactor = prefactor.max(norm * (required * t).exp());
            }
            if ts.len() < 2 {
                return Err(Error::NonFinite("propagator norm underflow in decay fit".into()));
            }
            let fitted_rate = -slope(&ts, &logs);
            if fitted_rate < required {
                return Err(Error::DecayBoundViolation {
                    xi,
                    abscissa: -fitted_rate,
                    required: -required,
                });
            }
            Ok(ModeDecayReport {
                xi,
                kappa,
                abscissa,
                fitted_rate,
                prefactor,
            })
        })
        .collect();
    reports.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::PressureLaw;

    fn params(mu: f64, omega: f64, eps: f64) -> FluidParams {
        FluidParams::new(mu, omega, eps, PressureLaw::gamma_law(1.4).unwrap()).unwrap()
    }

    #[test]
    fn no_rotation_small_modes_decay_like_heat() {
        // kappa reduces to |xi|^2 at Omega = 0; the fitted rate must clear
        // kappa/48 and in fact sits at the shear rate mu |xi|^2.
        let p = params(0.3, 0.0, 1.0);
        let modes = [[0.2, 0.0, 0.0], [0.0, 0.3, 0.1], [0.1, 0.1, 0.1]];
        let reps = verify_decay_bound(&p, &DecaySetup::default(), &modes).unwrap();
        for r in &reps {
            let xn2: f64 = r.xi.iter().map(|v| v * v).sum();
            assert!((r.kappa - xn2).abs() < 1e-12);
            assert!(r.fitted_rate >= r.kappa / 48.0);
            // slowest physical rate at small |xi| is about mu |xi|^2
            assert!(r.fitted_rate < 1.01 * xn2.max(0.5));
            assert!(r.prefactor.is_finite() && r.prefactor > 0.0);
        }
    }

    #[test]
    fn fourth_order_regime_slope() {
        // Omega eps = 1: fitted rate ~ |xi|^4 as |xi| -> 0 on the slowest
        // (horizontal, xi3 = 0) modes. Modes with xi3 != 0 carry inertial
        // waves damped at the faster |xi|^2 rate, so the quartic envelope is
        // read off along xi3 = 0.
        let p = params(0.25, 10.0, 0.1);
        let dir = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0];
        let radii = [0.01, 0.0178, 0.0316, 0.0562, 0.1];
        let modes: Vec<[f64; 3]> =
            radii.iter().map(|&r| [dir[0] * r, dir[1] * r, dir[2] * r]).collect();
        let reps = verify_decay_bound(&p, &DecaySetup::default(), &modes).unwrap();
        let rates: Vec<f64> = reps.iter().map(|r| r.fitted_rate).collect();
        let slope = log_log_slope(&radii.to_vec(), &rates);
        assert!(
            (slope - 4.0).abs() <= 0.2,
            "expected quartic dissipation, slope = {slope}"
        );
        // a tilted mode decays at the inertial-wave quadratic rate instead
        let tilted: Vec<[f64; 3]> = radii
            .iter()
            .map(|&r| {
                let d = 3f64.sqrt().recip();
                [d * r, d * r, d * r]
            })
            .collect();
        let reps = verify_decay_bound(&p, &DecaySetup::default(), &tilted).unwrap();
        let rates: Vec<f64> = reps.iter().map(|r| r.fitted_rate).collect();
        let slope = log_log_slope(&radii.to_vec(), &rates);
        assert!((slope - 2.0).abs() <= 0.2, "tilted slope = {slope}");
    }

    #[test]
    fn mode_outside_region_rejected() {
        let p = params(0.3, 1.0, 0.5);
        let err = verify_decay_bound(&p, &DecaySetup::default(), &[[100.0, 0.0, 0.0]]);
        assert!(matches!(err, Err(Error::ConstraintViolated(_))));
    }
}
