use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::{LebesgueExp, SpectralField};
use crate::lp::partition::DyadicPartition;

/// Frequency truncation of a dyadic sum: all bands, the low part
/// `2^j <= alpha`, the middle part `alpha < 2^j <= beta`, or the high part
/// `beta < 2^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Full,
    Low { alpha: f64 },
    Mid { alpha: f64, beta: f64 },
    High { beta: f64 },
}

impl Truncation {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Truncation::Full => true,
            Truncation::Low { alpha } => alpha >= 0.0,
            Truncation::Mid { alpha, beta } => alpha >= 0.0 && alpha < beta,
            Truncation::High { beta } => beta >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "truncation thresholds must satisfy 0 <= alpha < beta, got {self:?}"
            )))
        }
    }

    pub fn admits(&self, j: i32) -> bool {
        let t = 2f64.powi(j);
        match *self {
            Truncation::Full => true,
            Truncation::Low { alpha } => t <= alpha,
            Truncation::Mid { alpha, beta } => alpha < t && t <= beta,
            Truncation::High { beta } => beta < t,
        }
    }
}

/// Homogeneous Besov norm specification: integrability `p`, summation
/// `sigma`, regularity `s`, and a frequency truncation.
#[derive(Debug, Clone, Copy)]
pub struct BesovSpec {
    pub p: LebesgueExp,
    pub sigma: LebesgueExp,
    pub s: f64,
    pub truncation: Truncation,
}

impl BesovSpec {
    pub fn new(p: f64, sigma: f64, s: f64) -> Result<Self> {
        Ok(Self {
            p: LebesgueExp::new(p)?,
            sigma: LebesgueExp::new(sigma)?,
            s,
            truncation: Truncation::Full,
        })
    }

    pub fn truncated(mut self, truncation: Truncation) -> Result<Self> {
        truncation.validate()?;
        self.truncation = truncation;
        Ok(self)
    }
}

/// `l^sigma` aggregation of a weight sequence.
pub fn ell_sigma(weights: &[f64], sigma: LebesgueExp) -> f64 {
    match sigma {
        LebesgueExp::Infinity => weights.iter().copied().fold(0.0, f64::max),
        LebesgueExp::Finite(s) => weights
            .iter()
            .map(|w| w.powf(s))
            .sum::<f64>()
            .powf(1.0 / s),
    }
}

/// Per-band weights `2^{sj} ||Delta_j f||_{L^p}` over the bands admitted by
/// the spec's truncation; empty bands contribute nothing.
pub fn band_weights(
    f: &SpectralField,
    spec: &BesovSpec,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<Vec<(i32, f64)>> {
    if !f.is_finite() {
        return Err(Error::NonFinite("besov norm input".into()));
    }
    spec.truncation.validate()?;
    let mut out = Vec::new();
    let fast_l2 = matches!(spec.p, LebesgueExp::Finite(p) if (p - 2.0).abs() < 1e-14);
    let l2_table = if fast_l2 {
        Some(part.band_l2_norms(f))
    } else {
        None
    };
    for j in part.bands() {
        if !spec.truncation.admits(j) {
            continue;
        }
        let lp = match &l2_table {
            Some(t) => t[&j],
            None => part.project_band(f, j)?.lp_norm(spec.p, fft, false),
        };
        out.push((j, 2f64.powf(spec.s * j as f64) * lp));
    }
    Ok(out)
}

/// Homogeneous (possibly truncated) Besov norm of a real-valued field.
pub fn besov_norm(
    f: &SpectralField,
    spec: &BesovSpec,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<f64> {
    let w = band_weights(f, spec, part, fft)?;
    let vals: Vec<f64> = w.into_iter().map(|(_, v)| v).collect();
    Ok(ell_sigma(&vals, spec.sigma))
}
