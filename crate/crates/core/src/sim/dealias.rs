use crate::fft::Fft3;
use crate::field::SpectralField;
use ndarray::Array3;

/// 2/3-rule dealiasing: zeroes every mode with any `|k_i| > n/3`.
pub fn dealias(f: &mut SpectralField) {
    let grid = f.grid();
    let n = grid.n();
    let kmax = (n / 3) as i64;
    let over: Vec<bool> = (0..n).map(|i| grid.k_of_index(i).abs() > kmax).collect();
    let ncomp = f.ncomp();
    let stride = n * n * n;
    let data = f.coeffs_mut().as_slice_mut().expect("contiguous");
    for c in 0..ncomp {
        let comp = &mut data[c * stride..(c + 1) * stride];
        for i in 0..n {
            for j in 0..n {
                let row = &mut comp[(i * n + j) * n..(i * n + j + 1) * n];
                if over[i] || over[j] {
                    for v in row.iter_mut() {
                        *v = num_complex::Complex64::ZERO;
                    }
                } else {
                    for (k, v) in row.iter_mut().enumerate() {
                        if over[k] {
                            *v = num_complex::Complex64::ZERO;
                        }
                    }
                }
            }
        }
    }
}

/// True of every mode retained by the 2/3 mask.
pub fn is_dealiased(f: &SpectralField) -> bool {
    let grid = f.grid();
    let n = grid.n();
    let kmax = (n / 3) as i64;
    for c in 0..f.ncomp() {
        let comp = f.comp(c);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let over = grid.k_of_index(i).abs() > kmax
                        || grid.k_of_index(j).abs() > kmax
                        || grid.k_of_index(k).abs() > kmax;
                    if over && comp[[i, j, k]].norm_sqr() != 0.0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Pseudospectral product of scalar fields: pointwise multiply on the
/// collocation grid, transform back, apply the 2/3 mask. For inputs
/// band-limited to `|k_i| <= n/3` this equals the exact (alias-free)
/// convolution restricted to the retained modes.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField, fft: &Fft3) -> SpectralField {
    debug_assert_eq!(f.ncomp(), 1);
    debug_assert_eq!(g.ncomp(), 1);
    let (fp, _) = fft.inverse_real(&f.comp(0).to_owned());
    let (gp, _) = fft.inverse_real(&g.comp(0).to_owned());
    let mut prod = fp;
    prod.zip_mut_with(&gp, |a, &b| *a *= b);
    let mut out = SpectralField::from_physical(f.grid(), &[prod], fft);
    dealias(&mut out);
    out
}

/// Direct convolution oracle, `O(N^6)`: the exact product spectrum
/// `(fg)_k = sum_{k1 + k2 = k} f_{k1} g_{k2}` without wraparound, restricted
/// to the 2/3-retained modes. Only sensible on tiny grids.
pub fn convolution_oracle(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let n = grid.n();
    let half = (n / 2) as i64;
    let kmax = (n / 3) as i64;
    let idx = |k: i64| -> usize {
        if k >= 0 {
            k as usize
        } else {
            (k + n as i64) as usize
        }
    };
    let fc = f.comp(0);
    let gc = g.comp(0);
    let mut out_arr = Array3::zeros((n, n, n));
    for ka in -half..=half - 1 {
        for kb in -half..=half - 1 {
            for kc in -half..=half - 1 {
                if ka.abs() > kmax || kb.abs() > kmax || kc.abs() > kmax {
                    continue;
                }
                let mut acc = num_complex::Complex64::ZERO;
                for pa in -half..=half - 1 {
                    for pb in -half..=half - 1 {
                        for pc in -half..=half - 1 {
                            let (qa, qb, qc) = (ka - pa, kb - pb, kc - pc);
                            if qa.abs() > half - 1 || qb.abs() > half - 1 || qc.abs() > half - 1 {
                                continue;
                            }
                            let fv = fc[[idx(pa), idx(pb), idx(pc)]];
                            if fv.norm_sqr() == 0.0 {
                                continue;
                            }
                            acc += fv * gc[[idx(qa), idx(qb), idx(qc)]];
                        }
                    }
                }
                out_arr[[idx(ka), idx(kb), idx(kc)]] = acc;
            }
        }
    }
    SpectralField::from_coeffs(grid, out_arr.insert_axis(ndarray::Axis(0))).expect("same grid")
}
