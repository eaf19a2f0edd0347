use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::{LebesgueExp, SpectralField};
use crate::lp::besov::{besov_norm, ell_sigma, BesovSpec};
use crate::lp::partition::DyadicPartition;

/// Snapshots of a field along a strictly increasing time grid starting at 0.
#[derive(Debug, Clone)]
pub struct FieldSeries {
    times: Vec<f64>,
    snapshots: Vec<SpectralField>,
}

impl FieldSeries {
    pub fn new(times: Vec<f64>, snapshots: Vec<SpectralField>) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(Error::SeriesTooShort(
                "times and snapshots must have equal length".into(),
            ));
        }
        if times.is_empty() {
            return Err(Error::SeriesTooShort("empty series".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "series must start at t = 0, got {}",
                times[0]
            )));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "series times must be strictly increasing".into(),
            ));
        }
        let g = snapshots[0].grid();
        if !snapshots.iter().all(|s| s.grid() == g) {
            return Err(Error::GridMismatch("series snapshots on different grids".into()));
        }
        Ok(Self { times, snapshots })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[SpectralField] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `L^r` norm in time of sampled values by trapezoidal quadrature
/// (`r < inf`) or the maximum over snapshots (`r = inf`).
pub fn time_lr(times: &[f64], values: &[f64], r: LebesgueExp) -> Result<f64> {
    match r {
        LebesgueExp::Infinity => Ok(values.iter().copied().fold(0.0, f64::max)),
        LebesgueExp::Finite(rv) => {
            if times.len() < 2 {
                return Err(Error::SeriesTooShort(
                    "finite time exponent needs at least two snapshots".into(),
                ));
            }
            let mut acc = 0.0;
            for w in 0..times.len() - 1 {
                let dt = times[w + 1] - times[w];
                acc += 0.5 * dt * (values[w].powf(rv) + values[w + 1].powf(rv));
            }
            Ok(acc.powf(1.0 / rv))
        }
    }
}

/// Chemin-Lerner norm: per dyadic band, the time-`L^r` norm of the spatial
/// `L^p` norms, then the weighted `l^sigma` sum over admitted bands.
pub fn chemin_lerner_norm(
    series: &FieldSeries,
    r: LebesgueExp,
    spec: &BesovSpec,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<f64> {
    if matches!(r, LebesgueExp::Finite(_)) && series.len() < 2 {
        return Err(Error::SeriesTooShort(
            "finite time exponent needs at least two snapshots".into(),
        ));
    }
    spec.truncation.validate()?;
    let mut weights = Vec::new();
    let fast_l2 = matches!(spec.p, LebesgueExp::Finite(p) if (p - 2.0).abs() < 1e-14);
    if fast_l2 {
        // one spectrum pass per snapshot covers every band
        let tables: Vec<_> = series
            .snapshots()
            .iter()
            .map(|f| part.band_l2_norms(f))
            .collect();
        for j in part.bands() {
            if !spec.truncation.admits(j) {
                continue;
            }
            let vals: Vec<f64> = tables.iter().map(|t| t[&j]).collect();
            let w = time_lr(series.times(), &vals, r)?;
            weights.push(2f64.powf(spec.s * j as f64) * w);
        }
    } else {
        for j in part.bands() {
            if !spec.truncation.admits(j) {
                continue;
            }
            let vals: Vec<f64> = series
                .snapshots()
                .iter()
                .map(|f| {
                    part.project_band(f, j)
                        .map(|b| b.lp_norm(spec.p, fft, false))
                })
                .collect::<Result<_>>()?;
            let w = time_lr(series.times(), &vals, r)?;
            weights.push(2f64.powf(spec.s * j as f64) * w);
        }
    }
    Ok(ell_sigma(&weights, spec.sigma))
}

/// Plain `L^r(I; Besov)` norm: the Besov norm is taken per snapshot first,
/// then the time norm. Used as the Minkowski-side oracle and for the
/// untilded summands of the solution norms.
pub fn time_lr_of_besov(
    series: &FieldSeries,
    r: LebesgueExp,
    spec: &BesovSpec,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<f64> {
    let vals: Vec<f64> = series
        .snapshots()
        .iter()
        .map(|f| besov_norm(f, spec, part, fft))
        .collect::<Result<_>>()?;
    time_lr(series.times(), &vals, r)
}
