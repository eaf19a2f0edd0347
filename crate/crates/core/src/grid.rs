use crate::error::{Error, Result};

/// Collocation grid on the periodic box `[0, L)^3` with `n` points per axis.
///
/// Fourier modes are `xi = (2*pi/L) * k` with integer `k` in `[-n/2, n/2]`.
/// Dyadic band `j` is resolvable when the annulus `[2^(j-1), 2^(j+1)]` fits
/// between the fundamental mode `2*pi/L` and the axis Nyquist `pi*n/L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    n: usize,
    length: f64,
}

impl TorusGrid {
    pub fn new(n_per_axis: usize, domain_length: f64) -> Result<Self> {
        if n_per_axis < 8 || n_per_axis % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_per_axis must be even and >= 8, got {n_per_axis}"
            )));
        }
        if !(domain_length > 0.0) || !domain_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "domain_length must be positive and finite, got {domain_length}"
            )));
        }
        Ok(Self {
            n: n_per_axis,
            length: domain_length,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Smallest positive mode magnitude, `2*pi/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Largest representable axis frequency, `pi*n/L`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.n as f64 / self.length
    }

    /// Signed integer wavenumber for FFT storage index `idx`.
    pub fn k_of_index(&self, idx: usize) -> i64 {
        debug_assert!(idx < self.n);
        if idx <= self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Physical frequency component for FFT storage index `idx`.
    pub fn xi_of_index(&self, idx: usize) -> f64 {
        self.fundamental() * self.k_of_index(idx) as f64
    }

    /// Frequency vector of the mode stored at `(i, j, k)`.
    pub fn xi(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.xi_of_index(i),
            self.xi_of_index(j),
            self.xi_of_index(k),
        ]
    }

    pub fn xi_norm(&self, i: usize, j: usize, k: usize) -> f64 {
        let v = self.xi(i, j, k);
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    /// Inclusive range of resolvable dyadic band indices.
    ///
    /// Band `j` qualifies iff `2^(j-1) >= 2*pi/L` and `2^(j+1) <= pi*n/L`.
    pub fn band_range(&self) -> (i32, i32) {
        // Nudge against rounding so exact powers of two land on the
        // intended side of the comparison.
        let lo = self.fundamental().log2();
        let hi = (0.5 * self.n as f64 * self.fundamental()).log2();
        let j_min = (lo + 1.0 - 1e-9).ceil() as i32;
        let j_max = (hi - 1.0 + 1e-9).floor() as i32;
        (j_min, j_max)
    }

    pub fn resolvable_band_count(&self) -> usize {
        let (lo, hi) = self.band_range();
        if hi >= lo {
            (hi - lo + 1) as usize
        } else {
            0
        }
    }

    /// Frequency interval on which the resolvable bands form a partition of
    /// unity: `[2^j_min, 2^j_max]`.
    pub fn covered_mode_range(&self) -> (f64, f64) {
        let (lo, hi) = self.band_range();
        (2f64.powi(lo), 2f64.powi(hi))
    }

    /// Collocation point coordinates along one axis.
    pub fn axis_points(&self) -> Vec<f64> {
        let h = self.length / self.n as f64;
        (0..self.n).map(|i| i as f64 * h).collect()
    }
}
