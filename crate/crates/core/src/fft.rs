use ndarray::Array3;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cached 3D FFT plans for one grid size.
///
/// Conventions: `forward` produces coefficients `c_k` with
/// `f(x) = sum_k c_k exp(i <xi_k, x>)` (forward DFT divided by `n^3`),
/// so Parseval reads `(1/n^3) sum_x |f|^2 = sum_k |c_k|^2`.
#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// Cyclic index rotation `(a, b, c) -> (c, a, b)`: a 2D transpose of the
/// `(n^2) x n` view `[(ab), c]`.
fn rotate_layout(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    transpose::transpose(src, dst, n, n * n);
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        crate::tune_allocator();
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One pass over every axis via cyclic layout rotations: each rotation
    /// makes the next axis contiguous so the whole cube is transformed in a
    /// single bulk call. Three rotations restore the original layout.
    fn transform_in_place(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
        let mut tmp = vec![Complex64::ZERO; data.len()];
        // layout (i, j, k): transform axis 2 in bulk
        fft.process_with_scratch(data, &mut scratch);
        // rotate (i, j, k) -> (k, i, j) so axis 1 becomes contiguous
        rotate_layout(data, &mut tmp, n);
        fft.process_with_scratch(&mut tmp, &mut scratch);
        // rotate (k, i, j) -> (j, k, i) so axis 0 becomes contiguous
        rotate_layout(&tmp, data, n);
        fft.process_with_scratch(data, &mut scratch);
        // rotate (j, k, i) -> (i, j, k): back to the original layout
        rotate_layout(data, &mut tmp, n);
        data.copy_from_slice(&tmp);
    }

    /// Physical samples -> Fourier coefficients (normalized by `n^3`).
    pub fn forward(&self, phys: &Array3<f64>) -> Array3<Complex64> {
        let n = self.n;
        let src = phys.as_slice().expect("contiguous");
        let mut data = vec![Complex64::ZERO; src.len()];
        for (d, &v) in data.iter_mut().zip(src.iter()) {
            d.re = v;
        }
        self.transform_in_place(&mut data, &self.fwd);
        let scale = 1.0 / (n * n * n) as f64;
        for v in data.iter_mut() {
            v.re *= scale;
            v.im *= scale;
        }
        Array3::from_shape_vec((n, n, n), data).expect("shape")
    }

    /// Fourier coefficients -> complex physical samples (unnormalized inverse).
    pub fn inverse(&self, spec: &Array3<Complex64>) -> Array3<Complex64> {
        let n = self.n;
        let mut data: Vec<Complex64> = spec.as_slice().expect("contiguous").to_vec();
        self.transform_in_place(&mut data, &self.inv);
        Array3::from_shape_vec((n, n, n), data).expect("shape")
    }

    /// Inverse transform of a Hermitian spectrum; returns the real samples
    /// together with the largest absolute imaginary residue.
    pub fn inverse_real(&self, spec: &Array3<Complex64>) -> (Array3<f64>, f64) {
        self.inverse_real_slice(spec.as_slice().expect("contiguous"))
    }

    pub fn inverse_real_slice(&self, spec: &[Complex64]) -> (Array3<f64>, f64) {
        let n = self.n;
        let mut data: Vec<Complex64> = spec.to_vec();
        self.transform_in_place(&mut data, &self.inv);
        let mut re = vec![0.0f64; data.len()];
        let mut max_im = 0.0f64;
        for (o, z) in re.iter_mut().zip(data.iter()) {
            *o = z.re;
            let im = z.im.abs();
            if im > max_im {
                max_im = im;
            }
        }
        (Array3::from_shape_vec((n, n, n), re).expect("shape"), max_im)
    }

    /// Forward transform of two real fields through one complex transform:
    /// `Z = FFT(f + i g)` splits as `F_k = (Z_k + conj(Z_-k))/2`,
    /// `G_k = -i (Z_k - conj(Z_-k))/2`.
    pub fn forward_pair(
        &self,
        f: &Array3<f64>,
        g: &Array3<f64>,
    ) -> (Array3<Complex64>, Array3<Complex64>) {
        let n = self.n;
        let fsrc = f.as_slice().expect("contiguous");
        let gsrc = g.as_slice().expect("contiguous");
        let mut data = vec![Complex64::ZERO; fsrc.len()];
        for ((d, &a), &b) in data.iter_mut().zip(fsrc.iter()).zip(gsrc.iter()) {
            d.re = a;
            d.im = b;
        }
        self.transform_in_place(&mut data, &self.fwd);
        let scale = 0.5 / (n * n * n) as f64;
        let mut fs = vec![Complex64::ZERO; n * n * n];
        let mut gs = vec![Complex64::ZERO; n * n * n];
        // reversed index per axis, avoiding per-element modulo
        let rev: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        let n2 = n * n;
        for i in 0..n {
            let ri = rev[i] * n2;
            for j in 0..n {
                let base = (i * n + j) * n;
                let rbase = ri + rev[j] * n;
                for k in 0..n {
                    let z = data[base + k];
                    let w = data[rbase + rev[k]];
                    let idx = base + k;
                    fs[idx] = Complex64::new((z.re + w.re) * scale, (z.im - w.im) * scale);
                    gs[idx] = Complex64::new((z.im + w.im) * scale, (w.re - z.re) * scale);
                }
            }
        }
        (
            Array3::from_shape_vec((n, n, n), fs).expect("shape"),
            Array3::from_shape_vec((n, n, n), gs).expect("shape"),
        )
    }

    /// Inverse transform of two Hermitian spectra at once: the inverse of
    /// `F + i G` has real part `f` and imaginary part `g`.
    pub fn inverse_real_pair(
        &self,
        f_spec: &Array3<Complex64>,
        g_spec: &Array3<Complex64>,
    ) -> (Array3<f64>, Array3<f64>) {
        self.inverse_real_pair_slices(
            f_spec.as_slice().expect("contiguous"),
            g_spec.as_slice().expect("contiguous"),
        )
    }

    pub fn inverse_real_pair_slices(
        &self,
        fsrc: &[Complex64],
        gsrc: &[Complex64],
    ) -> (Array3<f64>, Array3<f64>) {
        let n = self.n;
        let mut data = vec![Complex64::ZERO; fsrc.len()];
        for ((d, &a), &b) in data.iter_mut().zip(fsrc.iter()).zip(gsrc.iter()) {
            d.re = a.re - b.im;
            d.im = a.im + b.re;
        }
        self.transform_in_place(&mut data, &self.inv);
        let mut fp = vec![0.0; n * n * n];
        let mut gp = vec![0.0; n * n * n];
        for (idx, z) in data.iter().enumerate() {
            fp[idx] = z.re;
            gp[idx] = z.im;
        }
        (
            Array3::from_shape_vec((n, n, n), fp).expect("shape"),
            Array3::from_shape_vec((n, n, n), gp).expect("shape"),
        )
    }

    /// Inverse transform onto a `factor`-times finer collocation grid by
    /// zero-padding the spectrum. Used for oversampled sup-norm evaluation.
    pub fn inverse_real_oversampled(&self, spec: &Array3<Complex64>, factor: usize) -> Array3<f64> {
        let n = self.n;
        let m = n * factor;
        let big = Fft3::new(m);
        let mut padded = Array3::<Complex64>::zeros((m, m, m));
        let map = |idx: usize| -> usize {
            // signed wavenumber of `idx` re-embedded in the larger grid
            if idx <= n / 2 {
                idx
            } else {
                m - (n - idx)
            }
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    padded[[map(i), map(j), map(k)]] = spec[[i, j, k]];
                }
            }
        }
        let (re, _) = big.inverse_real(&padded);
        re
    }
}
