use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::{LebesgueExp, SpectralField};
use crate::lp::besov::{besov_norm, BesovSpec, Truncation};
use crate::lp::partition::DyadicPartition;
use crate::sim::dealias::dealiased_product;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bilinear estimate under test, with its exponent bookkeeping.
#[derive(Debug, Clone, Copy)]
pub enum ProductLemma {
    /// `||fg||_{B^{s1+s2-3/p1}_{p2,inf}} <= C ||f||_{B^{s1}_{p1,1}} ||g||_{B^{s2}_{p2,inf}}`
    /// under `s1 + s2 >= max{0, 3(1/p1 + 1/p2 - 1)}`, `s1 <= 3/p1`,
    /// `s2 < min{3/p1, 3/p2}`.
    Sobolev { p1: f64, p2: f64, s1: f64, s2: f64 },
    /// Low-frequency bilinear estimate in `L^2`-based target norms:
    /// `||fg||^{l,beta}_{B^{s-3(2/q-1/2)}_{2,sigma}} <= C (||f||^{l,beta}_{B^{s1}_{q,1}}
    /// ||g||^{l,4beta}_{B^{s2}_{q,sigma}} + ||f||_{B^{s3}_{q,sigma}} ||g||_{B^{s4}_{q,1}})`
    /// under `2 <= q <= 4`, `s1, s4 <= 3(2/q - 1/2)`, `s = s1+s2 = s3+s4 > 0`.
    LowFrequency {
        q: f64,
        sigma: f64,
        s1: f64,
        s2: f64,
        s3: f64,
        s4: f64,
        beta: f64,
    },
}

impl ProductLemma {
    /// Checks the hypotheses, naming the first violated constraint.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProductLemma::Sobolev { p1, p2, s1, s2 } => {
                if !(1.0..=f64::INFINITY).contains(&p1) || !(1.0..=f64::INFINITY).contains(&p2) {
                    return Err(Error::ConstraintViolated("1 <= p1, p2 <= inf".into()));
                }
                let bound = (3.0 * (1.0 / p1 + 1.0 / p2 - 1.0)).max(0.0);
                if s1 + s2 < bound - 1e-12 {
                    return Err(Error::ConstraintViolated(
                        "s1 + s2 >= max{0, 3(1/p1 + 1/p2 - 1)}".into(),
                    ));
                }
                if s1 > 3.0 / p1 + 1e-12 {
                    return Err(Error::ConstraintViolated("s1 <= 3/p1".into()));
                }
                if s2 >= (3.0 / p1).min(3.0 / p2) - 1e-12 {
                    return Err(Error::ConstraintViolated("s2 < min{3/p1, 3/p2}".into()));
                }
                Ok(())
            }
            ProductLemma::LowFrequency {
                q,
                sigma,
                s1,
                s2,
                s3,
                s4,
                beta,
            } => {
                if !(2.0..=4.0).contains(&q) {
                    return Err(Error::ConstraintViolated("2 <= q <= 4".into()));
                }
                if sigma < 1.0 {
                    return Err(Error::ConstraintViolated("1 <= sigma".into()));
                }
                let cap = 3.0 * (2.0 / q - 0.5);
                if s1 > cap + 1e-12 || s4 > cap + 1e-12 {
                    return Err(Error::ConstraintViolated("s1, s4 <= 3(2/q - 1/2)".into()));
                }
                let s = s1 + s2;
                if (s - (s3 + s4)).abs() > 1e-12 {
                    return Err(Error::ConstraintViolated("s1 + s2 = s3 + s4".into()));
                }
                if s <= 0.0 {
                    return Err(Error::ConstraintViolated("s1 + s2 > 0".into()));
                }
                if !(beta > 0.0) {
                    return Err(Error::ConstraintViolated("beta > 0".into()));
                }
                Ok(())
            }
        }
    }
}

/// Empirical fit of a lemma constant over random samples.
#[derive(Debug, Clone)]
pub struct HarnessReport {
    pub samples_requested: usize,
    pub samples_used: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub ratios: Vec<f64>,
}

impl HarnessReport {
    fn from_ratios(requested: usize, ratios: Vec<f64>) -> Self {
        let used = ratios.len();
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let mean_ratio = if used == 0 {
            0.0
        } else {
            ratios.iter().sum::<f64>() / used as f64
        };
        Self {
            samples_requested: requested,
            samples_used: used,
            max_ratio,
            mean_ratio,
            ratios,
        }
    }
}

/// Random real scalar field with spectrum confined to the covered dyadic
/// range and to `|k_i| <= n/3` so products stay alias-free.
pub fn random_band_limited(grid: crate::grid::TorusGrid, rng: &mut ChaCha8Rng) -> SpectralField {
    let n = grid.n();
    let kmax = (n / 3) as i64;
    let (lo, hi) = grid.covered_mode_range();
    let mut f = SpectralField::zeros(grid, 1);
    {
        let mut comp = f.comp_mut(0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let kv = [
                        grid.k_of_index(i),
                        grid.k_of_index(j),
                        grid.k_of_index(k),
                    ];
                    if kv.iter().any(|&x| x.abs() > kmax) {
                        continue;
                    }
                    let r = grid.xi_norm(i, j, k);
                    if r < lo || r > hi {
                        continue;
                    }
                    // mild spectral decay keeps high bands populated but finite
                    let amp = 1.0 / (1.0 + r * r);
                    comp[[i, j, k]] = Complex64::new(
                        amp * (rng.random::<f64>() - 0.5),
                        amp * (rng.random::<f64>() - 0.5),
                    );
                }
            }
        }
    }
    f.hermitianize();
    f.zero_mean();
    f
}

/// Max/mean `LHS/RHS` of the chosen product lemma over random band-limited
/// pairs. Zero denominators are skipped.
pub fn product_estimate_harness(
    lemma: ProductLemma,
    samples: usize,
    seed: u64,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<HarnessReport> {
    lemma.validate()?;
    let grid = part.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(samples);
    for _ in 0..samples {
        let f = random_band_limited(grid, &mut rng);
        let g = random_band_limited(grid, &mut rng);
        let fg = dealiased_product(&f, &g, fft);
        let (lhs, rhs) = match lemma {
            ProductLemma::Sobolev { p1, p2, s1, s2 } => {
                let lhs_spec = BesovSpec::new(p2, f64::INFINITY, s1 + s2 - 3.0 / p1)?;
                let f_spec = BesovSpec::new(p1, 1.0, s1)?;
                let g_spec = BesovSpec::new(p2, f64::INFINITY, s2)?;
                let lhs = besov_norm(&fg, &lhs_spec, part, fft)?;
                let rhs = besov_norm(&f, &f_spec, part, fft)?
                    * besov_norm(&g, &g_spec, part, fft)?;
                (lhs, rhs)
            }
            ProductLemma::LowFrequency {
                q,
                sigma,
                s1,
                s2,
                s3,
                s4,
                beta,
            } => {
                let s = s1 + s2;
                let lhs_spec = BesovSpec::new(2.0, sigma, s - 3.0 * (2.0 / q - 0.5))?
                    .truncated(Truncation::Low { alpha: beta })?;
                let f1 = BesovSpec::new(q, 1.0, s1)?.truncated(Truncation::Low { alpha: beta })?;
                let g1 = BesovSpec::new(q, sigma, s2)?
                    .truncated(Truncation::Low { alpha: 4.0 * beta })?;
                let f2 = BesovSpec::new(q, sigma, s3)?;
                let g2 = BesovSpec::new(q, 1.0, s4)?;
                let lhs = besov_norm(&fg, &lhs_spec, part, fft)?;
                let rhs = besov_norm(&f, &f1, part, fft)? * besov_norm(&g, &g1, part, fft)?
                    + besov_norm(&f, &f2, part, fft)? * besov_norm(&g, &g2, part, fft)?;
                (lhs, rhs)
            }
        };
        if rhs > 1e-300 {
            ratios.push(lhs / rhs);
        }
    }
    Ok(HarnessReport::from_ratios(samples, ratios))
}

/// Max/mean `||F(a)||_B / ||a||_B` over random samples with
/// `||a||_{L^inf} <= sup_bound`; `F` must vanish at zero.
pub fn composition_estimate_harness(
    f_of_a: &dyn Fn(f64) -> f64,
    sup_bound: f64,
    spec: &BesovSpec,
    samples: usize,
    seed: u64,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<HarnessReport> {
    composition_estimate_harness_with(f_of_a, sup_bound, spec, samples, seed, part, fft, false)
}

/// As above, with the sup-norm precondition checked on a 2x-oversampled
/// collocation grid when requested.
#[allow(clippy::too_many_arguments)]
pub fn composition_estimate_harness_with(
    f_of_a: &dyn Fn(f64) -> f64,
    sup_bound: f64,
    spec: &BesovSpec,
    samples: usize,
    seed: u64,
    part: &DyadicPartition,
    fft: &Fft3,
    oversample: bool,
) -> Result<HarnessReport> {
    if f_of_a(0.0).abs() > 1e-14 {
        return Err(Error::InvalidParameter("composition requires F(0) = 0".into()));
    }
    if spec.s <= 0.0 {
        return Err(Error::ConstraintViolated("s > 0".into()));
    }
    let grid = part.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut a = random_band_limited(grid, &mut rng);
        let sup = a.lp_norm(LebesgueExp::Infinity, fft, oversample);
        if sup == 0.0 {
            continue;
        }
        let target: f64 = sup_bound * rng.random_range(0.3..1.0);
        a.scale(target / sup);
        let actual_sup = a.lp_norm(LebesgueExp::Infinity, fft, oversample);
        if actual_sup > sup_bound * (1.0 + 1e-12) {
            return Err(Error::ConstraintViolated(format!(
                "sample sup norm {actual_sup} exceeds bound {sup_bound}"
            )));
        }
        let (phys, _) = a.to_physical(fft);
        let fa_phys = phys[0].mapv(|v| f_of_a(v));
        let fa = SpectralField::from_physical(grid, &[fa_phys], fft);
        let denom = besov_norm(&a, spec, part, fft)?;
        if denom <= 1e-300 {
            continue;
        }
        let num = besov_norm(&fa, spec, part, fft)?;
        ratios.push(num / denom);
    }
    Ok(HarnessReport::from_ratios(samples, ratios))
}
