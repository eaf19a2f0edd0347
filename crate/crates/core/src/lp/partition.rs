use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use std::collections::BTreeMap;

/// Radial profile of the unnormalized bump `chi`, supported in `[1/2, 2]`.
pub type BumpProfile = fn(f64) -> f64;

/// Default bump: `exp(-1/(1 - u^2))` in octave coordinates `u = log2 r`,
/// smooth and strictly positive on `(1/2, 2)`.
pub fn log_bump(r: f64) -> f64 {
    if r <= 0.5 || r >= 2.0 {
        return 0.0;
    }
    let u = r.log2();
    let d = 1.0 - u * u;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp()
    }
}

/// Littlewood-Paley partition restricted to the bands a torus grid resolves.
///
/// The profile is normalized on the fly, `phi_0(r) = chi(r) / sum_k chi(2^-k r)`,
/// so the partition of unity holds to rounding wherever every contributing
/// octave lies inside the resolvable range.
#[derive(Clone)]
pub struct DyadicPartition {
    grid: TorusGrid,
    j_min: i32,
    j_max: i32,
    profile: BumpProfile,
}

pub fn make_partition(grid: TorusGrid) -> Result<DyadicPartition> {
    DyadicPartition::with_profile(grid, log_bump)
}

impl DyadicPartition {
    pub fn with_profile(grid: TorusGrid, profile: BumpProfile) -> Result<Self> {
        let (j_min, j_max) = grid.band_range();
        let found = grid.resolvable_band_count();
        if found < 3 {
            return Err(Error::TooFewBands { found, need: 3 });
        }
        Ok(Self {
            grid,
            j_min,
            j_max,
            profile,
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn band_range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    pub fn bands(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    fn check_band(&self, j: i32) -> Result<()> {
        if self.contains(j) {
            Ok(())
        } else {
            Err(Error::BandOutOfRange {
                j,
                min: self.j_min,
                max: self.j_max,
            })
        }
    }

    /// Normalized profile `phi_0` evaluated at radius `r`.
    pub fn phi0(&self, r: f64) -> f64 {
        let chi = (self.profile)(r);
        if chi == 0.0 {
            return 0.0;
        }
        // Neighboring octaves are the only other contributors.
        let total = chi + (self.profile)(r * 0.5) + (self.profile)(r * 2.0);
        chi / total
    }

    /// `phi_j(xi) = phi_0(2^-j |xi|)`.
    pub fn phi(&self, j: i32, xi_norm: f64) -> f64 {
        self.phi0(xi_norm * 2f64.powi(-j))
    }

    /// Sum of `phi_j` over the resolvable bands at radius `r`.
    pub fn partition_sum(&self, r: f64) -> f64 {
        self.bands().map(|j| self.phi(j, r)).sum()
    }

    /// Frequency projection onto dyadic band `j` (coefficient-wise multiply
    /// by `phi_j`).
    pub fn project_band(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_band(j)?;
        if f.grid() != self.grid {
            return Err(Error::GridMismatch("field grid differs from partition grid".into()));
        }
        let n = self.grid.n();
        let mut out = f.clone();
        for c in 0..out.ncomp() {
            let mut comp = out.comp_mut(c);
            for i in 0..n {
                for jj in 0..n {
                    for k in 0..n {
                        let w = self.phi(j, self.grid.xi_norm(i, jj, k));
                        comp[[i, jj, k]] *= w;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `L^2` norms of every band projection in a single pass over the
    /// spectrum (Parseval; the workhorse for `p = 2` norm suites).
    pub fn band_l2_norms(&self, f: &SpectralField) -> BTreeMap<i32, f64> {
        let n = self.grid.n();
        let mut acc: BTreeMap<i32, f64> = self.bands().map(|j| (j, 0.0)).collect();
        for c in 0..f.ncomp() {
            let comp = f.comp(c);
            for i in 0..n {
                for jj in 0..n {
                    for k in 0..n {
                        let r = self.grid.xi_norm(i, jj, k);
                        if r == 0.0 {
                            continue;
                        }
                        let mag2 = comp[[i, jj, k]].norm_sqr();
                        if mag2 == 0.0 {
                            continue;
                        }
                        // phi_j is nonzero only for j in (log2 r - 1, log2 r + 1)
                        let jc = r.log2();
                        let lo = (jc - 1.0).floor() as i32;
                        for j in lo..=lo + 2 {
                            if self.contains(j) {
                                let w = self.phi(j, r);
                                if w > 0.0 {
                                    *acc.get_mut(&j).unwrap() += w * w * mag2;
                                }
                            }
                        }
                    }
                }
            }
        }
        acc.into_iter().map(|(j, v)| (j, v.sqrt())).collect()
    }
}
