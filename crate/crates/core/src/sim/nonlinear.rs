use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::sim::dealias::dealias;
use crate::sim::{Formulation, State};
use crate::symbol::{FluidParams, PressureLaw};
use ndarray::Array3;
#[cfg(test)]
use ndarray::Zip;
use num_complex::Complex64;
use rayon::prelude::*;

fn check_margin(a_phys: &Array3<f64>, eps: f64, floor: f64) -> Result<f64> {
    let mut margin = f64::INFINITY;
    for &v in a_phys.as_slice().expect("contiguous") {
        let m = 1.0 + eps * v;
        if m < margin {
            margin = m;
        }
    }
    if margin <= floor {
        return Err(Error::PositivityViolation { margin, floor });
    }
    Ok(margin)
}

/// `out[i] = a[i] * b[i]`, slice-based.
fn product_into(a: &Array3<f64>, b: &Array3<f64>) -> Array3<f64> {
    let (asl, bsl) = (
        a.as_slice().expect("contiguous"),
        b.as_slice().expect("contiguous"),
    );
    let mut out = vec![0.0f64; asl.len()];
    for ((o, &x), &y) in out.iter_mut().zip(asl.iter()).zip(bsl.iter()) {
        *o = x * y;
    }
    let d = a.dim();
    Array3::from_shape_vec(d, out).expect("shape")
}

/// Pointwise map of a real field, slice-based.
fn map_field(a: &Array3<f64>, f: impl Fn(f64) -> f64) -> Array3<f64> {
    let asl = a.as_slice().expect("contiguous");
    let mut out = vec![0.0f64; asl.len()];
    for (o, &x) in out.iter_mut().zip(asl.iter()) {
        *o = f(x);
    }
    Array3::from_shape_vec(a.dim(), out).expect("shape")
}

/// Axis frequencies in FFT index order.
fn axis_xi(grid: &TorusGrid) -> Vec<f64> {
    (0..grid.n()).map(|i| grid.xi_of_index(i)).collect()
}

/// `i xi_axis` multiplier applied to a contiguous spectrum.
fn derivative_slice(grid: &TorusGrid, src: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n();
    let xi = axis_xi(grid);
    let mut out = vec![Complex64::ZERO; src.len()];
    for i in 0..n {
        for j in 0..n {
            let base = (i * n + j) * n;
            let row_in = &src[base..base + n];
            let row_out = &mut out[base..base + n];
            match axis {
                0 => {
                    let w = xi[i];
                    for (o, v) in row_out.iter_mut().zip(row_in.iter()) {
                        *o = Complex64::new(-v.im * w, v.re * w);
                    }
                }
                1 => {
                    let w = xi[j];
                    for (o, v) in row_out.iter_mut().zip(row_in.iter()) {
                        *o = Complex64::new(-v.im * w, v.re * w);
                    }
                }
                _ => {
                    for (k, (o, v)) in row_out.iter_mut().zip(row_in.iter()).enumerate() {
                        let w = xi[k];
                        *o = Complex64::new(-v.im * w, v.re * w);
                    }
                }
            }
        }
    }
    out
}

/// `i xi_axis` multiplier as an owned cube (oracle-test helper).
#[cfg(test)]
fn spectral_derivative(
    grid: &TorusGrid,
    coeffs: &Array3<Complex64>,
    axis: usize,
) -> Array3<Complex64> {
    let n = grid.n();
    let out = derivative_slice(grid, coeffs.as_slice().expect("contiguous"), axis);
    Array3::from_shape_vec((n, n, n), out).expect("shape")
}

/// Divergence `i xi . u` of three contiguous component spectra.
fn divergence_slices(
    grid: &TorusGrid,
    s0: &[Complex64],
    s1: &[Complex64],
    s2: &[Complex64],
) -> Vec<Complex64> {
    let n = grid.n();
    let xi = axis_xi(grid);
    let mut out = vec![Complex64::ZERO; s0.len()];
    for i in 0..n {
        for j in 0..n {
            let base = (i * n + j) * n;
            for k in 0..n {
                let idx = base + k;
                let d = s0[idx] * xi[i] + s1[idx] * xi[j] + s2[idx] * xi[k];
                out[idx] = Complex64::new(-d.im, d.re);
            }
        }
    }
    out
}

/// Divergence as an owned cube (oracle-test helper).
#[cfg(test)]
fn spectral_divergence(grid: &TorusGrid, u: &SpectralField) -> Array3<Complex64> {
    let n = grid.n();
    let out = divergence_slices(grid, u.comp_slice(0), u.comp_slice(1), u.comp_slice(2));
    Array3::from_shape_vec((n, n, n), out).expect("shape")
}

/// `L u = mu Lap u + (mu + mu') grad div u` on contiguous component spectra.
fn viscous_slices(
    grid: &TorusGrid,
    s0: &[Complex64],
    s1: &[Complex64],
    s2: &[Complex64],
    params: &FluidParams,
) -> [Vec<Complex64>; 3] {
    let n = grid.n();
    let xi = axis_xi(grid);
    let (mu, mup) = (params.mu, params.mu + params.mu_prime);
    let mut o0 = vec![Complex64::ZERO; s0.len()];
    let mut o1 = vec![Complex64::ZERO; s0.len()];
    let mut o2 = vec![Complex64::ZERO; s0.len()];
    for i in 0..n {
        let xi_i = xi[i];
        for j in 0..n {
            let xi_j = xi[j];
            let base = (i * n + j) * n;
            for k in 0..n {
                let idx = base + k;
                let xi_k = xi[k];
                let x2 = xi_i * xi_i + xi_j * xi_j + xi_k * xi_k;
                let div = s0[idx] * xi_i + s1[idx] * xi_j + s2[idx] * xi_k;
                // -mu |xi|^2 u - (mu + mu') xi (xi . u)
                o0[idx] = -(s0[idx] * (mu * x2) + div * (mup * xi_i));
                o1[idx] = -(s1[idx] * (mu * x2) + div * (mup * xi_j));
                o2[idx] = -(s2[idx] * (mu * x2) + div * (mup * xi_k));
            }
        }
    }
    [o0, o1, o2]
}

/// Batched inverse transforms of Hermitian spectra via pair packing.
fn inverse_batch(specs: &[&[Complex64]], fft: &Fft3) -> Vec<Array3<f64>> {
    let n_fields = specs.len();
    let mut pair_jobs: Vec<(usize, usize)> = Vec::new();
    let mut single: Option<usize> = None;
    let mut i = 0;
    while i + 1 < n_fields {
        pair_jobs.push((i, i + 1));
        i += 2;
    }
    if i < n_fields {
        single = Some(i);
    }
    let mut out: Vec<Option<Array3<f64>>> = (0..n_fields).map(|_| None).collect();
    let pair_results: Vec<(usize, usize, Array3<f64>, Array3<f64>)> = pair_jobs
        .par_iter()
        .map(|&(a, b)| {
            let (fa, fb) = fft.inverse_real_pair_slices(specs[a], specs[b]);
            (a, b, fa, fb)
        })
        .collect();
    for (a, b, fa, fb) in pair_results {
        out[a] = Some(fa);
        out[b] = Some(fb);
    }
    if let Some(s) = single {
        out[s] = Some(fft.inverse_real_slice(specs[s]).0);
    }
    out.into_iter().map(|v| v.expect("filled")).collect()
}

/// Batched forward transforms of real fields via pair packing.
fn forward_batch(fields: Vec<Array3<f64>>, fft: &Fft3) -> Vec<Array3<Complex64>> {
    let n_fields = fields.len();
    let mut pair_jobs: Vec<(usize, usize)> = Vec::new();
    let mut single: Option<usize> = None;
    let mut i = 0;
    while i + 1 < n_fields {
        pair_jobs.push((i, i + 1));
        i += 2;
    }
    if i < n_fields {
        single = Some(i);
    }
    let mut out: Vec<Option<Array3<Complex64>>> = (0..n_fields).map(|_| None).collect();
    let pair_results: Vec<(usize, usize, Array3<Complex64>, Array3<Complex64>)> = pair_jobs
        .par_iter()
        .map(|&(a, b)| {
            let (fa, fb) = fft.forward_pair(&fields[a], &fields[b]);
            (a, b, fa, fb)
        })
        .collect();
    for (a, b, fa, fb) in pair_results {
        out[a] = Some(fa);
        out[b] = Some(fb);
    }
    if let Some(s) = single {
        out[s] = Some(fft.forward(&fields[s]));
    }
    out.into_iter().map(|v| v.expect("filled")).collect()
}

fn symmetric_index(l: usize, m: usize) -> usize {
    match (l.min(m), l.max(m)) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => unreachable!(),
    }
}

/// Right-hand side of the velocity formulation:
/// `rhs_a = -div(a u)` and
/// `rhs_u = -[(u . grad) u + J(eps a) L u + (1/eps) K(eps a) grad a]`,
/// evaluated pseudospectrally with physical-space products.
pub fn nonlinearity_velocity(
    state: &State,
    params: &FluidParams,
    fft: &Fft3,
    dealias_products: bool,
    positivity_floor: f64,
) -> Result<(SpectralField, SpectralField)> {
    debug_assert_eq!(state.formulation, Formulation::Velocity);
    let grid = state.grid();
    let n = grid.n();
    let a_s = state.a.comp_slice(0);
    let u_s = [
        state.vel.comp_slice(0),
        state.vel.comp_slice(1),
        state.vel.comp_slice(2),
    ];
    let visc = viscous_slices(&grid, u_s[0], u_s[1], u_s[2], params);
    let div_spec = divergence_slices(&grid, u_s[0], u_s[1], u_s[2]);
    let grad_a: [Vec<Complex64>; 3] = [
        derivative_slice(&grid, a_s, 0),
        derivative_slice(&grid, a_s, 1),
        derivative_slice(&grid, a_s, 2),
    ];

    // one batched inverse pass: a, u1..3, Lu1..3, da1..3, divu (11 fields)
    let spectra: Vec<&[Complex64]> = vec![
        a_s, u_s[0], u_s[1], u_s[2], &visc[0], &visc[1], &visc[2], &grad_a[0], &grad_a[1],
        &grad_a[2], &div_spec,
    ];
    let mut phys = inverse_batch(&spectra, fft);
    let div_u_phys = phys.pop().expect("divu");
    let da3 = phys.pop().expect("da3");
    let da2 = phys.pop().expect("da2");
    let da1 = phys.pop().expect("da1");
    let grad_a_phys = [da1, da2, da3];
    let lu3 = phys.pop().expect("Lu3");
    let lu2 = phys.pop().expect("Lu2");
    let lu1 = phys.pop().expect("Lu1");
    let visc_phys = [lu1, lu2, lu3];
    let u3 = phys.pop().expect("u3");
    let u2 = phys.pop().expect("u2");
    let u1 = phys.pop().expect("u1");
    let u_phys = [u1, u2, u3];
    let a_phys = phys.pop().expect("a");
    check_margin(&a_phys, params.eps, positivity_floor)?;

    let eps = params.eps;
    let j_w = map_field(&a_phys, |v| PressureLaw::j_coef(eps * v));
    let k_w = map_field(&a_phys, |v| params.pressure.k_coef(eps * v) / eps);

    // physical products: a u (3), u (x) u (6), remainder (3)
    let mut products: Vec<Array3<f64>> = Vec::with_capacity(12);
    for c in 0..3 {
        products.push(product_into(&a_phys, &u_phys[c]));
    }
    for &(l, m) in &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)] {
        products.push(product_into(&u_phys[l], &u_phys[m]));
    }
    for c in 0..3 {
        let mut out = vec![0.0f64; n * n * n];
        let jw = j_w.as_slice().expect("contiguous");
        let kw = k_w.as_slice().expect("contiguous");
        let lv = visc_phys[c].as_slice().expect("contiguous");
        let uv = u_phys[c].as_slice().expect("contiguous");
        let dv = div_u_phys.as_slice().expect("contiguous");
        let ga = grad_a_phys[c].as_slice().expect("contiguous");
        for idx in 0..out.len() {
            out[idx] = jw[idx] * lv[idx] - uv[idx] * dv[idx] + kw[idx] * ga[idx];
        }
        products.push(Array3::from_shape_vec((n, n, n), out).expect("shape"));
    }
    let mut spectra = forward_batch(products, fft);
    let rest_s = spectra.split_off(9);
    let uu_s = spectra.split_off(3);
    let au_s = spectra;

    // rhs_a = -div(a u)
    let mut rhs_a = SpectralField::zeros(grid, 1);
    {
        let mut div = divergence_slices(
            &grid,
            au_s[0].as_slice().expect("contiguous"),
            au_s[1].as_slice().expect("contiguous"),
            au_s[2].as_slice().expect("contiguous"),
        );
        for v in div.iter_mut() {
            *v = -*v;
        }
        rhs_a.comp_slice_mut(0).copy_from_slice(&div);
    }

    // rhs_u = -[ d_l (u_l u_k) + rest_k ]
    let mut rhs_u = SpectralField::zeros(grid, 3);
    for c in 0..3 {
        let mut acc = rest_s[c].as_slice().expect("contiguous").to_vec();
        for l in 0..3 {
            let d = derivative_slice(
                &grid,
                uu_s[symmetric_index(l, c)].as_slice().expect("contiguous"),
                l,
            );
            for (a, &b) in acc.iter_mut().zip(d.iter()) {
                *a += b;
            }
        }
        for v in acc.iter_mut() {
            *v = -*v;
        }
        rhs_u.comp_slice_mut(c).copy_from_slice(&acc);
    }
    if dealias_products {
        dealias(&mut rhs_a);
        dealias(&mut rhs_u);
    }
    Ok((rhs_a, rhs_u))
}

/// Right-hand side of the momentum formulation: the density equation is
/// purely linear (`rhs_a = 0`) and
/// `rhs_m = -[div((1 + eps a) u (x) u) + eps L(a u) + grad(Q(eps a) a^2)]`
/// with `u = m / (1 + eps a)` recovered pointwise.
pub fn nonlinearity_momentum(
    state: &State,
    params: &FluidParams,
    fft: &Fft3,
    dealias_products: bool,
    positivity_floor: f64,
) -> Result<(SpectralField, SpectralField)> {
    debug_assert_eq!(state.formulation, Formulation::Momentum);
    let grid = state.grid();
    let eps = params.eps;

    let spectra: Vec<&[Complex64]> = vec![
        state.a.comp_slice(0),
        state.vel.comp_slice(0),
        state.vel.comp_slice(1),
        state.vel.comp_slice(2),
    ];
    let mut phys = inverse_batch(&spectra, fft);
    let m3 = phys.pop().expect("m3");
    let m2 = phys.pop().expect("m2");
    let m1 = phys.pop().expect("m1");
    let a_phys = phys.pop().expect("a");
    check_margin(&a_phys, eps, positivity_floor)?;
    let rho = map_field(&a_phys, |v| 1.0 + eps * v);
    let rho_sl = rho.as_slice().expect("contiguous");
    let u_phys: Vec<Array3<f64>> = [m1, m2, m3]
        .into_iter()
        .map(|mut m| {
            for (x, &r) in m
                .as_slice_mut()
                .expect("contiguous")
                .iter_mut()
                .zip(rho_sl.iter())
            {
                *x /= r;
            }
            m
        })
        .collect();

    // products: rho u (x) u (6), a u (3), Q(eps a) a^2 (1)
    let mut products: Vec<Array3<f64>> = Vec::with_capacity(10);
    for &(l, m) in &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)] {
        let mut p = product_into(&u_phys[l], &u_phys[m]);
        for (x, &r) in p
            .as_slice_mut()
            .expect("contiguous")
            .iter_mut()
            .zip(rho_sl.iter())
        {
            *x *= r;
        }
        products.push(p);
    }
    for c in 0..3 {
        products.push(product_into(&a_phys, &u_phys[c]));
    }
    products.push(map_field(&a_phys, |v| params.pressure.q_coef(eps * v) * v * v));

    let mut spectra = forward_batch(products, fft);
    let qa2_s = spectra.pop().expect("qa2");
    let au_s = spectra.split_off(6);
    let w_s = spectra;

    // eps L(au)
    let visc_au = viscous_slices(
        &grid,
        au_s[0].as_slice().expect("contiguous"),
        au_s[1].as_slice().expect("contiguous"),
        au_s[2].as_slice().expect("contiguous"),
        params,
    );

    let rhs_a = SpectralField::zeros(grid, 1);
    let mut rhs_m = SpectralField::zeros(grid, 3);
    for c in 0..3 {
        let mut acc = derivative_slice(&grid, qa2_s.as_slice().expect("contiguous"), c);
        for l in 0..3 {
            let d = derivative_slice(
                &grid,
                w_s[symmetric_index(l, c)].as_slice().expect("contiguous"),
                l,
            );
            for (a, &b) in acc.iter_mut().zip(d.iter()) {
                *a += b;
            }
        }
        for (a, &v) in acc.iter_mut().zip(visc_au[c].iter()) {
            *a += eps * v;
            *a = -*a;
        }
        rhs_m.comp_slice_mut(c).copy_from_slice(&acc);
    }
    if dealias_products {
        dealias(&mut rhs_m);
    }
    Ok((rhs_a, rhs_m))
}
