//! Exact per-mode linear theory: the 4x4 symbol of the linearized rotating
//! compressible system, its quartic characteristic polynomial, eigenvalues
//! computed along two independent routes, matrix-exponential propagators,
//! the modified mode energy, and decay/dispersion measurements.

pub mod decay;
pub mod expm;
pub mod propagator;
pub mod strichartz;

pub use decay::{log_log_slope, verify_decay_bound, DecaySetup, ModeDecayReport};
pub use propagator::{duhamel_solve, propagator, PropagatorTable};
pub use strichartz::{inertial_packet, strichartz_measure, StrichartzMeasurement, StrichartzSetup};

use crate::error::{Error, Result};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

/// Barotropic pressure law, normalized so the sound speed at the reference
/// density is one (`P'(1) = 1`).
#[derive(Debug, Clone, Copy)]
pub enum PressureLaw {
    /// `P(rho) = rho^gamma / gamma` with `gamma > 1`.
    Gamma { gamma: f64 },
    /// User-supplied `(P, P', P'')`; higher Taylor corrections fall back to
    /// the two available derivatives.
    Custom {
        p: fn(f64) -> f64,
        dp: fn(f64) -> f64,
        d2p: fn(f64) -> f64,
    },
}

impl PressureLaw {
    pub fn gamma_law(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "adiabatic exponent must exceed 1, got {gamma}"
            )));
        }
        Ok(PressureLaw::Gamma { gamma })
    }

    pub fn custom(p: fn(f64) -> f64, dp: fn(f64) -> f64, d2p: fn(f64) -> f64) -> Result<Self> {
        if (dp(1.0) - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "pressure law must satisfy P'(1) = 1, got {}",
                dp(1.0)
            )));
        }
        Ok(PressureLaw::Custom { p, dp, d2p })
    }

    pub fn p(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::Gamma { gamma } => rho.powf(gamma) / gamma,
            PressureLaw::Custom { p, .. } => p(rho),
        }
    }

    pub fn dp(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::Gamma { gamma } => rho.powf(gamma - 1.0),
            PressureLaw::Custom { dp, .. } => dp(rho),
        }
    }

    /// `k`-th derivative of `P` at the reference density, `k >= 2`.
    /// For the gamma law `P^(k)(1) = (gamma-1)(gamma-2)...(gamma-k+1)`.
    pub fn dkp_at_one(&self, k: u32) -> f64 {
        match *self {
            PressureLaw::Gamma { gamma } => (1..k).map(|i| gamma - i as f64).product(),
            PressureLaw::Custom { d2p, .. } => {
                if k == 2 {
                    d2p(1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// `J(a) = a / (1 + a)`, the quasilinear viscosity weight.
    pub fn j_coef(a: f64) -> f64 {
        a / (1.0 + a)
    }

    /// `K(a) = P'(1 + a)/(1 + a) - 1`, the pressure nonlinearity weight;
    /// vanishes identically for the gamma law with `gamma = 2`.
    pub fn k_coef(&self, a: f64) -> f64 {
        match *self {
            // expm1/ln_1p keeps full relative precision near a = 0
            PressureLaw::Gamma { gamma } => ((gamma - 2.0) * a.ln_1p()).exp_m1(),
            PressureLaw::Custom { dp, .. } => dp(1.0 + a) / (1.0 + a) - 1.0,
        }
    }

    /// `Q(a) = (P(1+a) - P(1) - a)/a^2` with the removable singularity
    /// `Q(0) = P''(1)/2`; switches to a four-term Taylor expansion below
    /// `|a| < 1e-4`.
    pub fn q_coef(&self, a: f64) -> f64 {
        if a.abs() < 1e-4 {
            let d2 = self.dkp_at_one(2);
            let d3 = self.dkp_at_one(3);
            let d4 = self.dkp_at_one(4);
            let d5 = self.dkp_at_one(5);
            d2 / 2.0 + d3 * a / 6.0 + d4 * a * a / 24.0 + d5 * a * a * a / 120.0
        } else if let PressureLaw::Gamma { gamma } = *self {
            // P(1+a) - P(1) = expm1(gamma ln_1p(a)) / gamma, cancellation-free
            ((gamma * a.ln_1p()).exp_m1() / gamma - a) / (a * a)
        } else {
            (self.p(1.0 + a) - self.p(1.0) - a) / (a * a)
        }
    }

    /// `G(a) = int_0^a K(s) ds`; closed form for the gamma law, composite
    /// Simpson otherwise.
    pub fn g_coef(&self, a: f64) -> f64 {
        match *self {
            PressureLaw::Gamma { gamma } => {
                ((gamma - 1.0) * a.ln_1p()).exp_m1() / (gamma - 1.0) - a
            }
            PressureLaw::Custom { .. } => {
                let n = 64;
                let h = a / n as f64;
                let mut acc = 0.0;
                for i in 0..n {
                    let x0 = i as f64 * h;
                    let xm = x0 + 0.5 * h;
                    let x1 = x0 + h;
                    acc += h / 6.0 * (self.k_coef(x0) + 4.0 * self.k_coef(xm) + self.k_coef(x1));
                }
                acc
            }
        }
    }

    /// Derivatives of `K` at zero in terms of `P^(k)(1)`; these are the
    /// Taylor data for `G` (note `G^(k) = K^(k-1)`).
    pub fn dk_k_at_zero(&self, k: u32) -> f64 {
        let d2 = self.dkp_at_one(2);
        let d3 = self.dkp_at_one(3);
        let d4 = self.dkp_at_one(4);
        let d5 = self.dkp_at_one(5);
        match k {
            1 => d2 - 1.0,
            2 => d3 - 2.0 * d2 + 2.0,
            3 => d4 - 3.0 * d3 + 6.0 * d2 - 6.0,
            4 => d5 - 4.0 * d4 + 12.0 * d3 - 24.0 * d2 + 24.0,
            _ => 0.0,
        }
    }

    /// `H(a) = G(a)/a^2 - G''(0)/2`, smooth with `H(0) = 0`; series below
    /// `|a| < 1e-4`.
    pub fn h_coef(&self, a: f64) -> f64 {
        if a.abs() < 1e-4 {
            let g3 = self.dk_k_at_zero(2);
            let g4 = self.dk_k_at_zero(3);
            let g5 = self.dk_k_at_zero(4);
            g3 * a / 6.0 + g4 * a * a / 24.0 + g5 * a * a * a / 120.0
        } else {
            self.g_coef(a) / (a * a) - self.dk_k_at_zero(1) / 2.0
        }
    }
}

/// Physical constants of the rescaled system: shear viscosity `mu`, bulk
/// coefficient `mu'` with `2 mu + mu' = 1`, rotation speed `Omega`, Mach
/// number `eps`, and the pressure law.
#[derive(Debug, Clone, Copy)]
pub struct FluidParams {
    pub mu: f64,
    pub mu_prime: f64,
    pub omega: f64,
    pub eps: f64,
    pub pressure: PressureLaw,
}

impl FluidParams {
    /// Builds parameters under the rescaled convention `nu = 2 mu + mu' = 1`.
    pub fn new(mu: f64, omega: f64, eps: f64, pressure: PressureLaw) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {eps}"
            )));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter("Omega must be finite".into()));
        }
        Ok(Self {
            mu,
            mu_prime: 1.0 - 2.0 * mu,
            omega,
            eps,
            pressure,
        })
    }

    /// `min(mu, 1)`, the coercivity constant of the viscous block.
    pub fn mu_under(&self) -> f64 {
        self.mu.min(1.0)
    }

    pub fn nu(&self) -> f64 {
        2.0 * self.mu + self.mu_prime
    }
}

/// The 4x4 symbol `A(xi)` of the linearized system in the state order
/// `(a, u1, u2, u3)`: each mode obeys `d/dt (a, u) = -A(xi) (a, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSymbol {
    pub xi: [f64; 3],
    pub matrix: Matrix4<Complex64>,
}

pub fn symbol_matrix(xi: [f64; 3], params: &FluidParams) -> ModeSymbol {
    let mut m = Matrix4::<Complex64>::zeros();
    let xn2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let inv_eps = 1.0 / params.eps;
    for k in 0..3 {
        let coupling = Complex64::new(0.0, xi[k] * inv_eps);
        m[(0, k + 1)] = coupling;
        m[(k + 1, 0)] = coupling;
        for l in 0..3 {
            let mut v = (params.mu + params.mu_prime) * xi[k] * xi[l];
            if k == l {
                v += params.mu * xn2;
            }
            m[(k + 1, l + 1)] = Complex64::new(v, 0.0);
        }
    }
    // Coriolis block: Omega e3 x u = Omega (-u2, u1, 0)
    m[(1, 2)] += Complex64::new(-params.omega, 0.0);
    m[(2, 1)] += Complex64::new(params.omega, 0.0);
    ModeSymbol { xi, matrix: m }
}

/// Real matrix similar to `A(xi)` via `diag(i, 1, 1, 1)`; shares its
/// eigenvalues and carries the propagator computation in real arithmetic.
pub fn real_similar_matrix(xi: [f64; 3], params: &FluidParams) -> Matrix4<f64> {
    let mut m = Matrix4::<f64>::zeros();
    let xn2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let inv_eps = 1.0 / params.eps;
    for k in 0..3 {
        m[(0, k + 1)] = -xi[k] * inv_eps;
        m[(k + 1, 0)] = xi[k] * inv_eps;
        for l in 0..3 {
            let mut v = (params.mu + params.mu_prime) * xi[k] * xi[l];
            if k == l {
                v += params.mu * xn2;
            }
            m[(k + 1, l + 1)] = v;
        }
    }
    m[(1, 2)] += -params.omega;
    m[(2, 1)] += params.omega;
    m
}

/// Coefficients `[1, c3, c2, c1, c0]` of the characteristic quartic
/// `lambda^4 + c3 lambda^3 + c2 lambda^2 + c1 lambda + c0` of `A(xi)`,
/// written out under the rescaled convention `2 mu + mu' = 1`:
///
/// ```text
/// lambda^4 - (4mu + mu')|xi|^2 lambda^3
///   + { |xi|^2/eps^2 + mu(5mu + 2mu')|xi|^4 + Omega^2 } lambda^2
///   - { 2mu|xi|^4/eps^2 + mu^2|xi|^6 + Omega^2 mu |xi|^2
///       + Omega^2 (mu + mu') xi3^2 } lambda
///   + mu^2 |xi|^6 / eps^2 + Omega^2 xi3^2 / eps^2
/// ```
pub fn characteristic_quartic(xi: [f64; 3], params: &FluidParams) -> [f64; 5] {
    let (mu, mup, om, eps) = (params.mu, params.mu_prime, params.omega, params.eps);
    let x2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let x4 = x2 * x2;
    let x6 = x4 * x2;
    let e2 = eps * eps;
    let om2 = om * om;
    let c3 = -(4.0 * mu + mup) * x2;
    let c2 = x2 / e2 + mu * (5.0 * mu + 2.0 * mup) * x4 + om2;
    let c1 =
        -(2.0 * mu * x4 / e2 + mu * mu * x6 + om2 * mu * x2 + om2 * (mu + mup) * xi[2] * xi[2]);
    let c0 = mu * mu * x6 / e2 + om2 * xi[2] * xi[2] / e2;
    [1.0, c3, c2, c1, c0]
}

/// Characteristic polynomial `[1, c3, c2, c1, c0]` of the symbol computed
/// by the Faddeev-LeVerrier recursion on the matrix itself; the independent
/// cross-check route for the closed-form quartic.
pub fn charpoly_from_matrix(xi: [f64; 3], params: &FluidParams) -> [Complex64; 5] {
    let a = symbol_matrix(xi, params).matrix;
    let id = Matrix4::<Complex64>::identity();
    let mut m = a;
    let c3 = -m.trace();
    m = a * (m + id * c3);
    let c2 = -m.trace() / Complex64::new(2.0, 0.0);
    m = a * (m + id * c2);
    let c1 = -m.trace() / Complex64::new(3.0, 0.0);
    m = a * (m + id * c1);
    let c0 = -m.trace() / Complex64::new(4.0, 0.0);
    [Complex64::ONE, c3, c2, c1, c0]
}

pub(crate) fn sort_complex(vals: &mut [Complex64]) {
    // total_cmp keeps the sort well-defined even when an eigensolve failed
    // and produced NaN (callers detect that separately)
    vals.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Roots of the characteristic quartic via a companion-matrix eigensolve.
pub fn quartic_roots(coeffs: &[f64; 5]) -> [Complex64; 4] {
    let c = coeffs;
    let companion = Matrix4::<f64>::new(
        0.0, 0.0, 0.0, -c[4], //
        1.0, 0.0, 0.0, -c[3], //
        0.0, 1.0, 0.0, -c[2], //
        0.0, 0.0, 1.0, -c[1],
    );
    let ev = companion.complex_eigenvalues();
    let mut out = [Complex64::ZERO; 4];
    for i in 0..4 {
        out[i] = Complex64::new(ev[i].re, ev[i].im);
    }
    sort_complex(&mut out);
    out
}

/// Eigenvalues of the symbol by direct eigensolve of the real-similar matrix.
pub fn symbol_eigenvalues(xi: [f64; 3], params: &FluidParams) -> [Complex64; 4] {
    let b = real_similar_matrix(xi, params);
    let ev = b.complex_eigenvalues();
    let mut out = [Complex64::ZERO; 4];
    for i in 0..4 {
        out[i] = Complex64::new(ev[i].re, ev[i].im);
    }
    sort_complex(&mut out);
    out
}

/// Eigenvalues computed both from the quartic and from the matrix; the two
/// routes must agree within `1e-8` absolute or `1e-6` relative, otherwise
/// the parameter point is flagged as ill-conditioned.
pub fn eigenvalues(xi: [f64; 3], params: &FluidParams) -> Result<[Complex64; 4]> {
    let from_matrix = symbol_eigenvalues(xi, params);
    let from_quartic = quartic_roots(&characteristic_quartic(xi, params));
    // scale the relative tolerance by the whole spectrum: polynomial root
    // extraction loses half its digits at (near-)double roots even when the
    // matrix route is backward stable
    let scale = from_matrix
        .iter()
        .chain(from_quartic.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let mut mismatch = 0.0f64;
    for i in 0..4 {
        let d = (from_matrix[i] - from_quartic[i]).norm();
        let ok = d <= 1e-8 || d <= 1e-6 * scale;
        if !ok {
            mismatch = mismatch.max(d);
        }
    }
    if mismatch > 0.0 {
        return Err(Error::EigenvalueMismatch { xi, mismatch });
    }
    Ok(from_matrix)
}

/// The decay rate `kappa(|xi|, Omega eps) = |xi|^4 / (Omega^2 eps^2 + |xi|^2)`.
pub fn decay_rate_kappa(xi_norm: f64, omega_eps: f64) -> Result<f64> {
    if xi_norm == 0.0 && omega_eps == 0.0 {
        return Err(Error::InvalidParameter(
            "kappa undefined at (|xi|, Omega*eps) = (0, 0)".into(),
        ));
    }
    let x2 = xi_norm * xi_norm;
    Ok(x2 * x2 / (omega_eps * omega_eps + x2))
}

/// The modified-energy functional of the low/medium frequency estimate:
/// carries the threshold `beta >= 1` and the derived `delta = mu_/(16 beta^2)`.
#[derive(Debug, Clone, Copy)]
pub struct EnergyFunctional {
    pub beta: f64,
    pub delta: f64,
}

impl EnergyFunctional {
    pub fn new(params: &FluidParams, beta: f64) -> Result<Self> {
        if !(beta >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "energy threshold requires beta >= 1, got {beta}"
            )));
        }
        Ok(Self {
            beta,
            delta: params.mu_under() / (16.0 * beta * beta),
        })
    }

    /// Largest mode magnitude on which the functional is valid, `2 beta / eps`.
    pub fn validity_radius(&self, params: &FluidParams) -> f64 {
        2.0 * self.beta / params.eps
    }

    /// `V^2 = (Omega^2 eps^2 + |xi|^2) |(a, u)|^2
    ///        + 2 delta |xi|^2 Re< i eps xi a, u >`.
    pub fn v_squared(
        &self,
        state: &Vector4<Complex64>,
        xi: [f64; 3],
        params: &FluidParams,
    ) -> Result<f64> {
        let x2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if x2.sqrt() > self.validity_radius(params) {
            return Err(Error::ConstraintViolated(format!(
                "|xi| = {} outside validity radius {}",
                x2.sqrt(),
                self.validity_radius(params)
            )));
        }
        let a = state[0];
        let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        let mut cross = 0.0;
        for k in 0..3 {
            let lhs = Complex64::new(0.0, params.eps * xi[k]) * a;
            cross += (lhs * state[k + 1].conj()).re;
        }
        let oe = params.omega * params.eps;
        Ok((oe * oe + x2) * norm2 + 2.0 * self.delta * x2 * cross)
    }

    /// `V`, clamped at zero against rounding.
    pub fn v(
        &self,
        state: &Vector4<Complex64>,
        xi: [f64; 3],
        params: &FluidParams,
    ) -> Result<f64> {
        Ok(self.v_squared(state, xi, params)?.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gamma14() -> PressureLaw {
        PressureLaw::gamma_law(1.4).unwrap()
    }

    fn rand_params(rng: &mut ChaCha8Rng) -> FluidParams {
        let mu = rng.random_range(0.1..0.45);
        let omega = rng.random_range(-20.0..20.0);
        let eps = rng.random_range(0.02..1.0);
        FluidParams::new(mu, omega, eps, gamma14()).unwrap()
    }

    fn rand_xi(rng: &mut ChaCha8Rng) -> [f64; 3] {
        [
            rng.random_range(-8.0..8.0),
            rng.random_range(-8.0..8.0),
            rng.random_range(-8.0..8.0),
        ]
    }

    #[test]
    fn rescaling_convention_enforced() {
        let p = FluidParams::new(0.25, 1.0, 0.5, gamma14()).unwrap();
        assert!((2.0 * p.mu + p.mu_prime - 1.0).abs() < 1e-15);
        assert!((p.nu() - 1.0).abs() < 1e-15);
        assert!(FluidParams::new(0.0, 1.0, 0.5, gamma14()).is_err());
        assert!(FluidParams::new(0.25, 1.0, 0.0, gamma14()).is_err());
    }

    #[test]
    fn pressure_law_identities() {
        // gamma = 2 makes K vanish identically
        let p2 = PressureLaw::gamma_law(2.0).unwrap();
        for a in [-0.5, -0.1, 0.0, 0.3, 1.7] {
            assert!(p2.k_coef(a).abs() < 1e-15);
        }
        // Q(0) = P''(1)/2 = (gamma - 1)/2
        let p = gamma14();
        assert!((p.q_coef(0.0) - 0.2).abs() < 1e-15);
        // Taylor branch is consistent with the quotient across the switch.
        // The raw quotient loses ~a^-2 digits to cancellation, which is the
        // reason the series branch exists; tolerate exactly that loss.
        for a in [-3e-5, -1e-5, 1e-5, 9.9e-5, 1.01e-4, 1e-3] {
            let quotient = (p.p(1.0 + a) - p.p(1.0) - a) / (a * a);
            let tol = 1e-9f64.max(4e-16 / (a * a));
            assert!(
                (p.q_coef(a) - quotient).abs() < tol,
                "a = {a}: {} vs {quotient}",
                p.q_coef(a)
            );
        }
        // G matches numeric quadrature of K
        let quad = {
            let n = 4000;
            let a = 0.3;
            let h = a / n as f64;
            (0..n)
                .map(|i| {
                    let x0 = i as f64 * h;
                    h / 6.0 * (p.k_coef(x0) + 4.0 * p.k_coef(x0 + 0.5 * h) + p.k_coef(x0 + h))
                })
                .sum::<f64>()
        };
        assert!((p.g_coef(0.3) - quad).abs() < 1e-12);
        // Q(0.3) for gamma = 1.4 against the quotient directly
        assert!((p.q_coef(0.3) - ((p.p(1.3) - p.p(1.0) - 0.3) / 0.09)).abs() < 1e-10);
        // both H branches agree where they overlap
        let a = 1.05e-4;
        let quotient = p.g_coef(a) / (a * a) - p.dk_k_at_zero(1) / 2.0;
        let series = {
            let g3 = p.dk_k_at_zero(2);
            let g4 = p.dk_k_at_zero(3);
            let g5 = p.dk_k_at_zero(4);
            g3 * a / 6.0 + g4 * a * a / 24.0 + g5 * a * a * a / 120.0
        };
        assert!((quotient - series).abs() < 1e-11);
    }

    #[test]
    fn symbol_is_dissipative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let params = rand_params(&mut rng);
            let xi = rand_xi(&mut rng);
            let a = symbol_matrix(xi, &params).matrix;
            for _ in 0..10 {
                let u = Vector4::from_fn(|_, _| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                });
                let quad = (a * u).dotc(&u).re;
                assert!(quad >= -1e-12 * u.norm_squared(), "Re<AU,U> = {quad}");
            }
        }
    }

    #[test]
    fn quartic_matches_symbol_charpoly() {
        // Faddeev-LeVerrier on the complex symbol as the independent oracle.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let params = rand_params(&mut rng);
            let xi = rand_xi(&mut rng);
            let a = symbol_matrix(xi, &params).matrix;
            let id = Matrix4::<Complex64>::identity();
            let mut m = a;
            let c3 = -m.trace();
            m = a * (m + id * c3);
            let c2 = -m.trace() / Complex64::new(2.0, 0.0);
            m = a * (m + id * c2);
            let c1 = -m.trace() / Complex64::new(3.0, 0.0);
            m = a * (m + id * c1);
            let c0 = -m.trace() / Complex64::new(4.0, 0.0);
            let q = characteristic_quartic(xi, &params);
            let want = [c3, c2, c1, c0];
            let scale: f64 = want.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (have, want) in q[1..].iter().zip(want.iter()) {
                assert!(want.im.abs() < 1e-9 * scale, "charpoly must be real");
                assert!(
                    (have - want.re).abs() <= 1e-10 * scale,
                    "coefficient mismatch {have} vs {want}"
                );
            }
        }
    }

    #[test]
    fn quartic_factorizes_without_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let mu = rng.random_range(0.05..0.49);
            let eps = rng.random_range(0.05..1.0);
            let params = FluidParams::new(mu, 0.0, eps, gamma14()).unwrap();
            let xi = rand_xi(&mut rng);
            let x2 = xi.iter().map(|v| v * v).sum::<f64>();
            // (lambda - mu|xi|^2)^2 (lambda^2 - |xi|^2 lambda + |xi|^2/eps^2)
            let (p, q2) = (mu * x2, x2 / (eps * eps));
            let want = [
                1.0,
                -(2.0 * p + x2),
                p * p + 2.0 * p * x2 + q2,
                -(p * p * x2 + 2.0 * p * q2),
                p * p * q2,
            ];
            let have = characteristic_quartic(xi, &params);
            let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (h, w) in have.iter().zip(want.iter()) {
                assert!((h - w).abs() <= 1e-12 * scale, "{h} vs {w}");
            }
        }
    }

    #[test]
    fn quartic_at_zero_mode() {
        let params = FluidParams::new(0.3, 2.0, 0.5, gamma14()).unwrap();
        let q = characteristic_quartic([0.0; 3], &params);
        assert_eq!(q, [1.0, 0.0, 4.0, 0.0, 0.0]);
        let roots = quartic_roots(&q);
        let mut expect = [
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, -2.0),
        ];
        sort_complex(&mut expect);
        for (r, e) in roots.iter().zip(expect.iter()) {
            assert!((r - e).norm() < 1e-8);
        }
    }

    #[test]
    fn eigenvalue_routes_agree_and_are_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let params = rand_params(&mut rng);
            let xi = rand_xi(&mut rng);
            let ev = eigenvalues(xi, &params).expect("routes agree");
            for l in ev {
                assert!(l.re >= -1e-12 * (1.0 + l.norm()), "dissipativity: {l}");
            }
        }
    }

    #[test]
    fn known_eigenvalues_without_rotation() {
        // mu = 1/4, mu' = 1/2, eps = 1, |xi| = 1:
        // shear pair 1/4, acoustic pair (1 +- i sqrt(3))/2
        let params = FluidParams::new(0.25, 0.0, 1.0, gamma14()).unwrap();
        let ev = eigenvalues([1.0, 0.0, 0.0], &params).unwrap();
        let s3 = 3f64.sqrt() / 2.0;
        let mut want = [
            Complex64::new(0.25, 0.0),
            Complex64::new(0.25, 0.0),
            Complex64::new(0.5, s3),
            Complex64::new(0.5, -s3),
        ];
        sort_complex(&mut want);
        for (a, b) in ev.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn kappa_basics() {
        assert!(decay_rate_kappa(0.0, 0.0).is_err());
        assert!((decay_rate_kappa(1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((decay_rate_kappa(2.0, 1.0).unwrap() - 16.0 / 5.0).abs() < 1e-15);
        // increasing in |xi|, decreasing in |Omega eps|
        let mut prev = 0.0;
        for i in 1..50 {
            let v = decay_rate_kappa(0.1 * i as f64, 0.7).unwrap();
            assert!(v > prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let v = decay_rate_kappa(1.3, 0.1 * i as f64).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn energy_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..2000 {
            let params = rand_params(&mut rng);
            let beta = rng.random_range(1.0..4.0);
            let func = EnergyFunctional::new(&params, beta).unwrap();
            assert!((func.delta - params.mu_under() / (16.0 * beta * beta)).abs() < 1e-15);
            let rad = func.validity_radius(&params);
            let dir = rand_xi(&mut rng);
            let nd = (dir.iter().map(|v| v * v).sum::<f64>()).sqrt().max(1e-9);
            let r = rng.random_range(0.0..1.0) * rad;
            let xi = [dir[0] / nd * r, dir[1] / nd * r, dir[2] / nd * r];
            let u = Vector4::from_fn(|_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let v2 = func.v_squared(&u, xi, &params).unwrap();
            let oe = params.omega * params.eps;
            let weight = (oe * oe + r * r) * u.norm_squared();
            assert!(v2 >= 0.5 * weight - 1e-12 * weight.max(1.0), "lower sandwich");
            assert!(v2 <= 1.5 * weight + 1e-12 * weight.max(1.0), "upper sandwich");
        }
        // pure-density state has no cross term
        let params = FluidParams::new(0.3, 2.0, 0.1, gamma14()).unwrap();
        let func = EnergyFunctional::new(&params, 1.0).unwrap();
        let mut st = Vector4::zeros();
        st[0] = Complex64::new(0.7, -0.2);
        let xi = [1.0, 2.0, -1.0];
        let oe = params.omega * params.eps;
        let x2 = 6.0;
        let v2 = func.v_squared(&st, xi, &params).unwrap();
        assert!((v2 - (oe * oe + x2) * st[0].norm_sqr()).abs() < 1e-14);
        // zero state
        assert_eq!(
            func.v(&Vector4::zeros(), xi, &params).unwrap(),
            0.0
        );
        // outside the validity region: error
        let far = [100.0, 0.0, 0.0];
        assert!(func.v_squared(&st, far, &params).is_err());
        assert!(EnergyFunctional::new(&params, 0.5).is_err());
    }
}
