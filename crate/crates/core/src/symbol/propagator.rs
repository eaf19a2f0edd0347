use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::symbol::expm::{eigen_decompose, expm_pade};
use crate::symbol::{symbol_eigenvalues, symbol_matrix, FluidParams};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;

/// Condition-number ceiling above which the eigendecomposition route is
/// abandoned for scaling-and-squaring.
pub const EIGEN_COND_LIMIT: f64 = 1e8;

/// `Phi(t; xi) = exp(-t A(xi))`: eigendecomposition when the eigenvector
/// basis is well conditioned, order-13 Pade with scaling and squaring
/// otherwise. The zero mode is built exactly (pure Coriolis rotation).
pub fn propagator(t: f64, xi: [f64; 3], params: &FluidParams) -> Matrix4<Complex64> {
    assert!(t >= 0.0, "propagator requires t >= 0");
    if xi == [0.0; 3] {
        return zero_mode_propagator(t, params);
    }
    let a = symbol_matrix(xi, params).matrix;
    let values = symbol_eigenvalues(xi, params);
    let finite = values.iter().all(|l| l.re.is_finite() && l.im.is_finite());
    if finite {
        if let Some(dec) = eigen_decompose(&a, values) {
            if dec.cond <= EIGEN_COND_LIMIT {
                return dec.propagator(t);
            }
        }
    }
    expm_pade(&a.map(|v| v * -t))
}

/// At `xi = 0` only the Coriolis block acts: `(u1, u2)` rotates by angle
/// `-t Omega` about the vertical axis while `a` and `u3` are fixed.
fn zero_mode_propagator(t: f64, params: &FluidParams) -> Matrix4<Complex64> {
    let (c, s) = ((params.omega * t).cos(), (params.omega * t).sin());
    let mut m = Matrix4::<Complex64>::zeros();
    m[(0, 0)] = Complex64::ONE;
    m[(3, 3)] = Complex64::ONE;
    m[(1, 1)] = Complex64::new(c, 0.0);
    m[(1, 2)] = Complex64::new(s, 0.0);
    m[(2, 1)] = Complex64::new(-s, 0.0);
    m[(2, 2)] = Complex64::new(c, 0.0);
    m
}

/// Per-mode propagators for a whole grid at a fixed time step, stored as
/// flat row-major 4x4 blocks.
pub struct PropagatorTable {
    grid: TorusGrid,
    mats: Vec<[Complex64; 16]>,
}

impl PropagatorTable {
    pub fn build(grid: TorusGrid, params: &FluidParams, t: f64) -> Self {
        let n = grid.n();
        let mats: Vec<[Complex64; 16]> = (0..n * n * n)
            .into_par_iter()
            .map(|flat| {
                let i = flat / (n * n);
                let j = (flat / n) % n;
                let k = flat % n;
                let m = propagator(t, grid.xi(i, j, k), params);
                let mut out = [Complex64::ZERO; 16];
                for r in 0..4 {
                    for c in 0..4 {
                        out[r * 4 + c] = m[(r, c)];
                    }
                }
                out
            })
            .collect();
        Self { grid, mats }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    fn apply_range(
        mats: &[[Complex64; 16]],
        a: &mut [Complex64],
        u1: &mut [Complex64],
        u2: &mut [Complex64],
        u3: &mut [Complex64],
    ) {
        for (idx, m) in mats.iter().enumerate() {
            let v = [a[idx], u1[idx], u2[idx], u3[idx]];
            let mut w = [Complex64::ZERO; 4];
            for r in 0..4 {
                let row = &m[r * 4..r * 4 + 4];
                w[r] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
            a[idx] = w[0];
            u1[idx] = w[1];
            u2[idx] = w[2];
            u3[idx] = w[3];
        }
    }

    /// Applies the per-mode matrices to a 4-component `(a, u)` spectrum.
    pub fn apply(&self, field: &mut SpectralField) {
        debug_assert_eq!(field.ncomp(), 4);
        debug_assert_eq!(field.grid(), self.grid);
        let n = self.grid.n();
        let stride = n * n * n;
        let coeffs = field.coeffs_mut();
        let (a, rest) = coeffs.as_slice_mut().expect("contiguous").split_at_mut(stride);
        let (u1, rest) = rest.split_at_mut(stride);
        let (u2, u3) = rest.split_at_mut(stride);
        // two-way split keeps the parallel grain coarse
        let mid = stride / 2;
        let (m_lo, m_hi) = self.mats.split_at(mid);
        let (a_lo, a_hi) = a.split_at_mut(mid);
        let (u1_lo, u1_hi) = u1.split_at_mut(mid);
        let (u2_lo, u2_hi) = u2.split_at_mut(mid);
        let (u3_lo, u3_hi) = u3.split_at_mut(mid);
        rayon::join(
            || Self::apply_range(m_lo, a_lo, u1_lo, u2_lo, u3_lo),
            || Self::apply_range(m_hi, a_hi, u1_hi, u2_hi, u3_hi),
        );
    }
}

/// Inhomogeneous per-mode solution by Duhamel quadrature:
/// `U(t) = Phi(t) U0 + int_0^t Phi(t - tau) F(tau) dtau`
/// with composite Simpson on `panels` subintervals.
pub fn duhamel_solve(
    t: f64,
    panels: usize,
    xi: [f64; 3],
    params: &FluidParams,
    u0: &Vector4<Complex64>,
    forcing: &dyn Fn(f64) -> Vector4<Complex64>,
) -> Vector4<Complex64> {
    let phi = |s: f64| propagator(s, xi, params);
    let mut acc = phi(t) * u0;
    let h = t / panels as f64;
    for k in 0..panels {
        let t0 = k as f64 * h;
        let tm = t0 + 0.5 * h;
        let t1 = t0 + h;
        let val = phi(t - t0) * forcing(t0)
            + (phi(t - tm) * forcing(tm)) * Complex64::new(4.0, 0.0)
            + phi(t - t1) * forcing(t1);
        acc += val * Complex64::new(h / 6.0, 0.0);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::expm::op_norm_2;
    use crate::symbol::PressureLaw;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gamma14() -> PressureLaw {
        PressureLaw::gamma_law(1.4).unwrap()
    }

    fn rand_params(rng: &mut ChaCha8Rng) -> FluidParams {
        FluidParams::new(
            rng.random_range(0.1..0.45),
            rng.random_range(-10.0..10.0),
            rng.random_range(0.05..1.0),
            gamma14(),
        )
        .unwrap()
    }

    fn rand_xi(rng: &mut ChaCha8Rng) -> [f64; 3] {
        [
            rng.random_range(-6.0..6.0),
            rng.random_range(-6.0..6.0),
            rng.random_range(-6.0..6.0),
        ]
    }

    #[test]
    fn identity_at_time_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let params = rand_params(&mut rng);
            let xi = rand_xi(&mut rng);
            let p = propagator(0.0, xi, &params);
            let diff = (p - Matrix4::<Complex64>::identity())
                .map(|v| v.norm())
                .max();
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn zero_mode_rotates_horizontal_velocity() {
        let params = FluidParams::new(0.25, 1.0, 0.3, gamma14()).unwrap();
        let t = 0.9;
        let p = propagator(t, [0.0; 3], &params);
        let u = Vector4::new(
            Complex64::new(0.3, 0.1),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.4, 0.2),
        );
        let w = p * u;
        // a and u3 fixed, (u1, u2) rotated by angle -t
        assert_eq!(w[0], u[0]);
        assert_eq!(w[3], u[3]);
        assert!((w[1].re - t.cos()).abs() < 1e-15);
        assert!((w[2].re + t.sin()).abs() < 1e-15);
        let norm_in: f64 = u.norm();
        let norm_out: f64 = w.norm();
        assert!((norm_in - norm_out).abs() < 1e-14);
    }

    #[test]
    fn group_property_and_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..40 {
            let params = rand_params(&mut rng);
            let xi = rand_xi(&mut rng);
            let (t, s) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
            let pt = propagator(t, xi, &params);
            let ps = propagator(s, xi, &params);
            let pts = propagator(t + s, xi, &params);
            let diff = (pts - pt * ps).map(|v| v.norm()).max();
            assert!(diff < 1e-10, "group property violated by {diff}");
            assert!(op_norm_2(&pt) <= 1.0 + 1e-10, "contraction violated");
            for _ in 0..5 {
                let u = Vector4::from_fn(|_, _| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                });
                assert!((pt * u).norm() <= u.norm() * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn duhamel_matches_fine_rk4() {
        let params = FluidParams::new(0.3, 4.0, 0.2, gamma14()).unwrap();
        let xi = [2.0, -1.0, 3.0];
        let a = symbol_matrix(xi, &params).matrix;
        let u0 = Vector4::new(
            Complex64::new(0.5, -0.1),
            Complex64::new(0.2, 0.3),
            Complex64::new(-0.7, 0.0),
            Complex64::new(0.1, 0.4),
        );
        let forcing = |s: f64| {
            Vector4::new(
                Complex64::new((1.3 * s).sin(), 0.2),
                Complex64::new(0.1 * s, -0.3),
                Complex64::new((0.7 * s).cos(), 0.0),
                Complex64::new(0.0, 0.05 * s * s),
            )
        };
        let t_final = 1.5;
        // stiff reference: classical RK4 with tiny steps on U' = -A U + F
        let steps = 40_000;
        let h = t_final / steps as f64;
        let mut u = u0;
        let rhs = |s: f64, v: &Vector4<Complex64>| -> Vector4<Complex64> { -(a * v) + forcing(s) };
        for k in 0..steps {
            let s = k as f64 * h;
            let k1 = rhs(s, &u);
            let k2 = rhs(s + 0.5 * h, &(u + k1 * Complex64::new(0.5 * h, 0.0)));
            let k3 = rhs(s + 0.5 * h, &(u + k2 * Complex64::new(0.5 * h, 0.0)));
            let k4 = rhs(s + h, &(u + k3 * Complex64::new(h, 0.0)));
            u += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
                * Complex64::new(h / 6.0, 0.0);
        }
        let via_duhamel = duhamel_solve(t_final, 600, xi, &params, &u0, &forcing);
        let err = (via_duhamel - u).norm();
        assert!(err < 1e-8, "duhamel vs reference: {err}");
    }
}
