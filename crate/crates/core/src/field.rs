use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::grid::TorusGrid;
use ndarray::{Array3, Array4, ArrayView3, ArrayViewMut3};
use num_complex::Complex64;

/// Spatial Lebesgue exponent. Norms use the normalized measure
/// `(1/L^3) dx`, so a unit-amplitude single mode has unit sup norm and
/// `L^2` norm `1/sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LebesgueExp {
    Finite(f64),
    Infinity,
}

impl LebesgueExp {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(LebesgueExp::Infinity)
        } else if p >= 1.0 && p.is_finite() {
            Ok(LebesgueExp::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "Lebesgue exponent must lie in [1, inf], got {p}"
            )))
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            LebesgueExp::Finite(p) => *p,
            LebesgueExp::Infinity => f64::INFINITY,
        }
    }
}

/// Fourier coefficients of a scalar (1 component) or vector (3) field on a
/// torus grid; the `(a, u)` aggregate uses 4 components in the order
/// `(a, u1, u2, u3)`. Coefficients are stored in FFT index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Array4<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid, ncomp: usize) -> Self {
        let n = grid.n();
        Self {
            grid,
            coeffs: Array4::zeros((ncomp, n, n, n)),
        }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Array4<Complex64>) -> Result<Self> {
        let n = grid.n();
        let sh = coeffs.shape();
        if sh[1] != n || sh[2] != n || sh[3] != n {
            return Err(Error::GridMismatch(format!(
                "coefficient array shape {sh:?} does not match grid n = {n}"
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn from_physical(grid: TorusGrid, comps: &[Array3<f64>], fft: &Fft3) -> Self {
        let n = grid.n();
        let mut coeffs = Array4::zeros((comps.len(), n, n, n));
        for (c, phys) in comps.iter().enumerate() {
            coeffs.index_axis_mut(ndarray::Axis(0), c).assign(&fft.forward(phys));
        }
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.coeffs.shape()[0]
    }

    pub fn comp(&self, c: usize) -> ArrayView3<'_, Complex64> {
        self.coeffs.index_axis(ndarray::Axis(0), c)
    }

    /// Contiguous coefficient storage of one component (fast path; ndarray
    /// view iteration does not vectorize).
    pub fn comp_slice(&self, c: usize) -> &[Complex64] {
        let n = self.grid.n();
        let stride = n * n * n;
        &self.coeffs.as_slice().expect("contiguous")[c * stride..(c + 1) * stride]
    }

    pub fn comp_slice_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.n();
        let stride = n * n * n;
        &mut self.coeffs.as_slice_mut().expect("contiguous")[c * stride..(c + 1) * stride]
    }

    /// Copies one component out as an owned cube.
    pub fn comp_owned(&self, c: usize) -> Array3<Complex64> {
        let n = self.grid.n();
        Array3::from_shape_vec((n, n, n), self.comp_slice(c).to_vec()).expect("shape")
    }

    pub fn comp_mut(&mut self, c: usize) -> ArrayViewMut3<'_, Complex64> {
        self.coeffs.index_axis_mut(ndarray::Axis(0), c)
    }

    pub fn coeffs(&self) -> &Array4<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array4<Complex64> {
        &mut self.coeffs
    }

    /// Mean (k = 0) coefficient of component `c`.
    pub fn mean(&self, c: usize) -> Complex64 {
        self.coeffs[[c, 0, 0, 0]]
    }

    pub fn zero_mean(&mut self) {
        for c in 0..self.ncomp() {
            self.coeffs[[c, 0, 0, 0]] = Complex64::ZERO;
        }
    }

    /// Zeroes the unpaired Nyquist planes `|k_i| = n/2`, which cannot carry a
    /// Hermitian-symmetric signal under the one-sided storage convention.
    pub fn zero_nyquist(&mut self) {
        let n = self.grid.n();
        let ny = n / 2;
        for c in 0..self.ncomp() {
            let mut comp = self.comp_mut(c);
            for i in 0..n {
                for j in 0..n {
                    comp[[ny, i, j]] = Complex64::ZERO;
                    comp[[i, ny, j]] = Complex64::ZERO;
                    comp[[i, j, ny]] = Complex64::ZERO;
                }
            }
        }
    }

    pub fn scale(&mut self, c: f64) {
        for v in self.coeffs.as_slice_mut().expect("contiguous") {
            v.re *= c;
            v.im *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        let a = self.coeffs.as_slice_mut().expect("contiguous");
        let b = other.coeffs.as_slice().expect("contiguous");
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x += y;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        let a = out.coeffs.as_slice_mut().expect("contiguous");
        let b = other.coeffs.as_slice().expect("contiguous");
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x -= y;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest violation of Hermitian symmetry `c(-k) = conj(c(k))`,
    /// relative to the largest coefficient magnitude.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut max_abs = 0.0f64;
        let mut max_defect = 0.0f64;
        let neg = |i: usize| -> usize { (n - i) % n };
        for c in 0..self.ncomp() {
            let comp = self.comp(c);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = comp[[i, j, k]];
                        max_abs = max_abs.max(v.norm());
                        let w = comp[[neg(i), neg(j), neg(k)]];
                        max_defect = max_defect.max((v - w.conj()).norm());
                    }
                }
            }
        }
        if max_abs == 0.0 {
            0.0
        } else {
            max_defect / max_abs
        }
    }

    /// Projects onto the Hermitian-symmetric part, making the physical field
    /// exactly real-valued.
    pub fn hermitianize(&mut self) {
        let n = self.grid.n();
        let neg = |i: usize| -> usize { (n - i) % n };
        for c in 0..self.ncomp() {
            let mut comp = self.comp_mut(c);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let (ni, nj, nk) = (neg(i), neg(j), neg(k));
                        if (i, j, k) <= (ni, nj, nk) {
                            let v = comp[[i, j, k]];
                            let w = comp[[ni, nj, nk]];
                            let sym = 0.5 * (v + w.conj());
                            comp[[i, j, k]] = sym;
                            comp[[ni, nj, nk]] = sym.conj();
                        }
                    }
                }
            }
        }
    }

    /// Physical-space samples of every component. Returns the samples and the
    /// largest imaginary residue encountered (should be at rounding level for
    /// Hermitian spectra).
    pub fn to_physical(&self, fft: &Fft3) -> (Vec<Array3<f64>>, f64) {
        let mut out = Vec::with_capacity(self.ncomp());
        let mut max_im = 0.0f64;
        for c in 0..self.ncomp() {
            let (re, im) = fft.inverse_real(&self.comp(c).to_owned());
            max_im = max_im.max(im);
            out.push(re);
        }
        (out, max_im)
    }

    /// Pointwise Euclidean magnitude over components, sampled on the grid.
    pub fn magnitude_physical(&self, fft: &Fft3) -> Array3<f64> {
        let (comps, _) = self.to_physical(fft);
        let n = self.grid.n();
        let mut mag = Array3::<f64>::zeros((n, n, n));
        for comp in &comps {
            mag.zip_mut_with(comp, |m, &v| *m += v * v);
        }
        mag.mapv_inplace(f64::sqrt);
        mag
    }

    /// `L^p` norm (normalized measure) of the pointwise magnitude.
    ///
    /// `p = 2` is evaluated spectrally through Parseval; other exponents are
    /// sampled on the collocation grid (`oversample` refines it 2x).
    pub fn lp_norm(&self, p: LebesgueExp, fft: &Fft3, oversample: bool) -> f64 {
        match p {
            LebesgueExp::Finite(pv) if (pv - 2.0).abs() < 1e-14 => self.l2_norm(),
            LebesgueExp::Finite(pv) => {
                let mag = self.magnitude_grid(fft, oversample);
                let m = mag.len() as f64;
                let sum: f64 = mag.iter().map(|&v| v.powf(pv)).sum();
                (sum / m).powf(1.0 / pv)
            }
            LebesgueExp::Infinity => {
                let mag = self.magnitude_grid(fft, oversample);
                mag.iter().copied().fold(0.0f64, f64::max)
            }
        }
    }

    fn magnitude_grid(&self, fft: &Fft3, oversample: bool) -> Array3<f64> {
        if !oversample {
            return self.magnitude_physical(fft);
        }
        let n = self.grid.n();
        let m = 2 * n;
        let mut mag = Array3::<f64>::zeros((m, m, m));
        for c in 0..self.ncomp() {
            let re = fft.inverse_real_oversampled(&self.comp(c).to_owned(), 2);
            mag.zip_mut_with(&re, |v, &r| *v += r * r);
        }
        mag.mapv_inplace(f64::sqrt);
        mag
    }

    /// `L^2` norm via Parseval (exact for the discrete spectrum).
    pub fn l2_norm(&self) -> f64 {
        let data = self.coeffs.as_slice().expect("contiguous");
        data.iter().map(|c| c.re * c.re + c.im * c.im).sum::<f64>().sqrt()
    }

    /// Stacks fields component-wise; all must share a grid.
    pub fn stack(parts: &[&SpectralField]) -> Result<SpectralField> {
        let grid = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("stack of zero fields".into()))?
            .grid;
        let total: usize = parts.iter().map(|f| f.ncomp()).sum();
        let n = grid.n();
        let mut coeffs = Array4::zeros((total, n, n, n));
        let stride = n * n * n;
        let dst = coeffs.as_slice_mut().expect("contiguous");
        let mut at = 0;
        for f in parts {
            if f.grid != grid {
                return Err(Error::GridMismatch("stacked fields on different grids".into()));
            }
            for c in 0..f.ncomp() {
                dst[at * stride..(at + 1) * stride].copy_from_slice(f.comp_slice(c));
                at += 1;
            }
        }
        let _ = dst;
        SpectralField::from_coeffs(grid, coeffs)
    }
}
