use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::LebesgueExp;
use crate::lp::besov::{ell_sigma, Truncation};
use crate::lp::chemin::time_lr;
use crate::lp::partition::DyadicPartition;
use crate::sim::StateSeries;
use crate::symbol::FluidParams;
use crate::estimates::NormSuiteSpec;
use serde::Serialize;
use std::collections::BTreeMap;

/// Which part of the state a summand measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Both,
    DensityOnly,
    VelocityOnly,
}

/// Per-band spatial norms of a snapshot series, precomputed once per run for
/// the exponents the norm suites need (`p = 2` always, `p = q` on demand).
/// Every summand evaluation reads prefixes of these tables.
pub struct BandLpTable {
    times: Vec<f64>,
    /// `(p key, target, band) -> per-time spatial norms`
    values: BTreeMap<(u64, Target, i32), Vec<f64>>,
    bands: Vec<i32>,
}

fn p_key(p: f64) -> u64 {
    p.to_bits()
}

impl BandLpTable {
    pub fn build(
        series: &StateSeries,
        extra_p: Option<f64>,
        part: &DyadicPartition,
        fft: &Fft3,
    ) -> Result<Self> {
        if series.times.is_empty() {
            return Err(Error::SeriesTooShort("empty series".into()));
        }
        let bands: Vec<i32> = part.bands().collect();
        let mut values: BTreeMap<(u64, Target, i32), Vec<f64>> = BTreeMap::new();
        let nt = series.times.len();
        for key in [2.0]
            .into_iter()
            .chain(extra_p.into_iter())
            .map(p_key)
        {
            for target in [Target::Both, Target::DensityOnly, Target::VelocityOnly] {
                for &j in &bands {
                    values.insert((key, target, j), vec![0.0; nt]);
                }
            }
        }
        for (ti, state) in series.states.iter().enumerate() {
            let stacked = state.stacked();
            // p = 2 via Parseval, split by component groups
            let a_l2 = part.band_l2_norms(&state.a);
            let u_l2 = part.band_l2_norms(&state.vel);
            for &j in &bands {
                let a2 = a_l2[&j];
                let u2 = u_l2[&j];
                values.get_mut(&(p_key(2.0), Target::DensityOnly, j)).unwrap()[ti] = a2;
                values.get_mut(&(p_key(2.0), Target::VelocityOnly, j)).unwrap()[ti] = u2;
                values.get_mut(&(p_key(2.0), Target::Both, j)).unwrap()[ti] =
                    (a2 * a2 + u2 * u2).sqrt();
            }
            if let Some(q) = extra_p {
                let qk = p_key(q);
                for &j in &bands {
                    let banded = part.project_band(&stacked, j)?;
                    let (phys, _) = banded.to_physical(fft);
                    let m = phys[0].len() as f64;
                    let mut sum_a = 0.0f64;
                    let mut sum_u = 0.0f64;
                    let mut sum_all = 0.0f64;
                    for idx in 0..phys[0].len() {
                        let av = phys[0].as_slice().unwrap()[idx];
                        let u1 = phys[1].as_slice().unwrap()[idx];
                        let u2 = phys[2].as_slice().unwrap()[idx];
                        let u3 = phys[3].as_slice().unwrap()[idx];
                        let mu = (u1 * u1 + u2 * u2 + u3 * u3).sqrt();
                        let mall = (av * av + u1 * u1 + u2 * u2 + u3 * u3).sqrt();
                        sum_a += av.abs().powf(q);
                        sum_u += mu.powf(q);
                        sum_all += mall.powf(q);
                    }
                    let norm = |s: f64| (s / m).powf(1.0 / q);
                    values.get_mut(&(qk, Target::DensityOnly, j)).unwrap()[ti] = norm(sum_a);
                    values.get_mut(&(qk, Target::VelocityOnly, j)).unwrap()[ti] = norm(sum_u);
                    values.get_mut(&(qk, Target::Both, j)).unwrap()[ti] = norm(sum_all);
                }
            }
        }
        Ok(Self {
            times: series.times.clone(),
            values,
            bands,
        })
    }

    /// Builds the `p = 2` table from streamed per-band norms of the density
    /// and velocity (the cheap path used by long probe runs, where storing
    /// snapshots would be prohibitive).
    pub fn from_band_l2(
        times: Vec<f64>,
        a_norms: &[BTreeMap<i32, f64>],
        u_norms: &[BTreeMap<i32, f64>],
        part: &DyadicPartition,
    ) -> Self {
        let bands: Vec<i32> = part.bands().collect();
        let nt = times.len();
        let mut values: BTreeMap<(u64, Target, i32), Vec<f64>> = BTreeMap::new();
        for &j in &bands {
            let mut a_row = vec![0.0; nt];
            let mut u_row = vec![0.0; nt];
            let mut both = vec![0.0; nt];
            for ti in 0..nt {
                let a = a_norms[ti][&j];
                let u = u_norms[ti][&j];
                a_row[ti] = a;
                u_row[ti] = u;
                both[ti] = (a * a + u * u).sqrt();
            }
            values.insert((p_key(2.0), Target::DensityOnly, j), a_row);
            values.insert((p_key(2.0), Target::VelocityOnly, j), u_row);
            values.insert((p_key(2.0), Target::Both, j), both);
        }
        Self {
            times,
            values,
            bands,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn series(&self, p: f64, target: Target, j: i32) -> Result<&[f64]> {
        self.values
            .get(&(p_key(p), target, j))
            .map(|v| v.as_slice())
            .ok_or_else(|| {
                Error::InvalidParameter(format!("band table lacks p = {p} for band {j}"))
            })
    }

    /// Chemin-Lerner style evaluation over the first `prefix` snapshots:
    /// time norm per band first, then the weighted `l^sigma` sum. A prefix
    /// of one snapshot spans a zero-length interval, so finite time
    /// exponents evaluate to zero there.
    pub fn tilde_norm(&self, spec: &SummandSpec, prefix: usize) -> Result<f64> {
        let prefix = prefix.min(self.times.len());
        if prefix < 2 && matches!(spec.time_exp, LebesgueExp::Finite(_)) {
            return Ok(0.0);
        }
        let times = &self.times[..prefix];
        let mut weights = Vec::new();
        for &j in &self.bands {
            if !spec.trunc.admits(j) {
                continue;
            }
            let vals = self.series(spec.p, spec.target, j)?;
            let w = time_lr(times, &vals[..prefix], spec.time_exp)?;
            weights.push(2f64.powf(spec.s * j as f64) * w);
        }
        Ok(spec.scale * ell_sigma(&weights, spec.sigma))
    }

    /// Plain `L^r(Besov)` evaluation: Besov norm per time, then the time norm.
    pub fn plain_norm(&self, spec: &SummandSpec, prefix: usize) -> Result<f64> {
        let prefix = prefix.min(self.times.len());
        if prefix < 2 && matches!(spec.time_exp, LebesgueExp::Finite(_)) {
            return Ok(0.0);
        }
        let times = &self.times[..prefix];
        let mut per_time = vec![0.0; prefix];
        for (ti, slot) in per_time.iter_mut().enumerate() {
            let mut weights = Vec::new();
            for &j in &self.bands {
                if !spec.trunc.admits(j) {
                    continue;
                }
                let vals = self.series(spec.p, spec.target, j)?;
                weights.push(2f64.powf(spec.s * j as f64) * vals[ti]);
            }
            *slot = ell_sigma(&weights, spec.sigma);
        }
        Ok(spec.scale * time_lr(times, &per_time, spec.time_exp)?)
    }

    pub fn eval(&self, spec: &SummandSpec, prefix: usize) -> Result<f64> {
        if spec.tilde {
            self.tilde_norm(spec, prefix)
        } else {
            self.plain_norm(spec, prefix)
        }
    }
}

/// One summand of a composite norm.
#[derive(Debug, Clone)]
pub struct SummandSpec {
    pub name: String,
    pub target: Target,
    pub trunc: Truncation,
    pub s: f64,
    pub p: f64,
    pub sigma: LebesgueExp,
    pub time_exp: LebesgueExp,
    pub tilde: bool,
    pub scale: f64,
}

/// Evaluated norm with its named summands.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub summands: Vec<(String, f64)>,
    pub total: f64,
}

fn sigma1() -> LebesgueExp {
    LebesgueExp::Finite(1.0)
}
fn sigma_inf() -> LebesgueExp {
    LebesgueExp::Infinity
}
fn time(r: f64) -> LebesgueExp {
    if r.is_infinite() {
        LebesgueExp::Infinity
    } else {
        LebesgueExp::Finite(r)
    }
}

/// The summand table of the energy norm `E`. Truncations: low split at
/// `|Omega| eps`, high split at `beta0 / eps`.
pub fn e_summands(params: &FluidParams, spec: &NormSuiteSpec) -> Vec<SummandSpec> {
    let oe = (params.omega * params.eps).abs();
    let be = spec.beta0 / params.eps;
    let low_oe = Truncation::Low { alpha: oe };
    let mid = Truncation::Mid { alpha: oe, beta: be };
    let low_be = Truncation::Low { alpha: be };
    let high = Truncation::High { beta: be };
    let eps = params.eps;
    let mk = |name: &str,
              target: Target,
              trunc: Truncation,
              s: f64,
              sigma: LebesgueExp,
              r: f64,
              tilde: bool,
              scale: f64| SummandSpec {
        name: name.into(),
        target,
        trunc,
        s,
        p: 2.0,
        sigma,
        time_exp: time(r),
        tilde,
        scale,
    };
    vec![
        mk("E1 l(b0/e) Lt_inf B(-1/2;2,1) (a,u)", Target::Both, low_be, -0.5, sigma1(), f64::INFINITY, true, 1.0),
        mk("E2 l(b0/e) Lt_2 B(1/2;2,1) u", Target::VelocityOnly, low_be, 0.5, sigma1(), 2.0, true, 1.0),
        mk("E3 l(Oe) L_inf B(-3/2;2,inf) (a,u)", Target::Both, low_oe, -1.5, sigma_inf(), f64::INFINITY, false, 1.0),
        mk("E4 l(Oe) Lt_1 B(5/2;2,inf) (a,u)", Target::Both, low_oe, 2.5, sigma_inf(), 1.0, true, 1.0),
        mk("E5 m(Oe,b0/e) Lt_inf B(1/2;2,1) (a,u)", Target::Both, mid, 0.5, sigma1(), f64::INFINITY, true, 1.0),
        mk("E6 m(Oe,b0/e) L_1 B(5/2;2,1) (a,u)", Target::Both, mid, 2.5, sigma1(), 1.0, false, 1.0),
        mk("E7 m(Oe,b0/e) Lt_2 B(1/2;2,1) a", Target::DensityOnly, mid, 0.5, sigma1(), 2.0, true, 1.0),
        mk("E8 h(b0/e) eps*Lt_inf B(3/2;2,1) a", Target::DensityOnly, high, 1.5, sigma1(), f64::INFINITY, true, eps),
        mk("E9 h(b0/e) (1/eps)*L_1 B(3/2;2,1) a", Target::DensityOnly, high, 1.5, sigma1(), 1.0, false, 1.0 / eps),
        mk("E10 h(b0/e) Lt_inf B(1/2;2,1) u", Target::VelocityOnly, high, 0.5, sigma1(), f64::INFINITY, true, 1.0),
        mk("E11 h(b0/e) L_1 B(5/2;2,1) u", Target::VelocityOnly, high, 2.5, sigma1(), 1.0, false, 1.0),
    ]
}

/// The summand table of the auxiliary norm `A` (based on `L^q`).
pub fn a_summands(params: &FluidParams, spec: &NormSuiteSpec) -> Vec<SummandSpec> {
    let oe = (params.omega * params.eps).abs();
    let be = spec.beta0 / params.eps;
    let (q, r) = (spec.q, spec.r);
    let rp = spec.r_conj();
    let eps = params.eps;
    let low_oe = Truncation::Low { alpha: oe };
    let low_be = Truncation::Low { alpha: be };
    let mid_oa = Truncation::Mid { alpha: oe, beta: spec.alpha };
    let mid_ab = Truncation::Mid { alpha: spec.alpha, beta: be };
    let high = Truncation::High { beta: be };
    let mk = |name: &str,
              target: Target,
              trunc: Truncation,
              s: f64,
              sigma: LebesgueExp,
              tr: f64,
              tilde: bool,
              scale: f64| SummandSpec {
        name: name.into(),
        target,
        trunc,
        s,
        p: q,
        sigma,
        time_exp: time(tr),
        tilde,
        scale,
    };
    vec![
        mk("A1 l(Oe) Lt_r' B(3/q-3+4/r';q,inf) (a,u)", Target::Both, low_oe, 3.0 / q - 3.0 + 4.0 / rp, sigma_inf(), rp, true, 1.0),
        mk("A2 l(b0/e) Lt_r B(3/q-3+4/r;q,inf) (a,u)", Target::Both, low_be, 3.0 / q - 3.0 + 4.0 / r, sigma_inf(), r, true, 1.0),
        mk("A3 m(Oe,alpha) Lt_r B(3/q-1+2/r;q,1) (a,u)", Target::Both, mid_oa, 3.0 / q - 1.0 + 2.0 / r, sigma1(), r, true, 1.0),
        mk("A4 m(alpha,b0/e) Lt_inf B(3/q-1;q,1) (a,u)", Target::Both, mid_ab, 3.0 / q - 1.0, sigma1(), f64::INFINITY, true, 1.0),
        mk("A5 m(alpha,b0/e) L_1 B(3/q+1;q,1) (a,u)", Target::Both, mid_ab, 3.0 / q + 1.0, sigma1(), 1.0, false, 1.0),
        mk("A6 h(b0/e) eps*Lt_inf B(3/q;q,1) a", Target::DensityOnly, high, 3.0 / q, sigma1(), f64::INFINITY, true, eps),
        mk("A7 h(b0/e) (1/eps)*L_1 B(3/q;q,1) a", Target::DensityOnly, high, 3.0 / q, sigma1(), 1.0, false, 1.0 / eps),
        mk("A8 h(b0/e) Lt_inf B(3/q-1;q,1) u", Target::VelocityOnly, high, 3.0 / q - 1.0, sigma1(), f64::INFINITY, true, 1.0),
        mk("A9 h(b0/e) L_1 B(3/q+1;q,1) u", Target::VelocityOnly, high, 3.0 / q + 1.0, sigma1(), 1.0, false, 1.0),
    ]
}

fn evaluate(table: &BandLpTable, specs: &[SummandSpec], prefix: usize) -> Result<NormReport> {
    let mut summands = Vec::with_capacity(specs.len());
    let mut total = 0.0;
    for s in specs {
        let v = table.eval(s, prefix)?;
        total += v;
        summands.push((s.name.clone(), v));
    }
    Ok(NormReport { summands, total })
}

/// Energy norm `E(t)` over a snapshot series, with every summand reported.
pub fn compute_e(
    series: &StateSeries,
    params: &FluidParams,
    spec: &NormSuiteSpec,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<NormReport> {
    let table = BandLpTable::build(series, None, part, fft)?;
    evaluate(&table, &e_summands(params, spec), series.times.len())
}

/// Auxiliary norm `A(t)` over a snapshot series.
pub fn compute_a(
    series: &StateSeries,
    params: &FluidParams,
    spec: &NormSuiteSpec,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<NormReport> {
    spec.validate_theorem_regime()?;
    spec.validate_thresholds(params.omega, params.eps)?;
    let table = BandLpTable::build(series, Some(spec.q), part, fft)?;
    evaluate(&table, &a_summands(params, spec), series.times.len())
}

/// Both norms from one shared table (the cheap path for diagnostics).
pub fn compute_both(
    table: &BandLpTable,
    params: &FluidParams,
    spec: &NormSuiteSpec,
    prefix: usize,
) -> Result<(NormReport, NormReport)> {
    let e = evaluate(table, &e_summands(params, spec), prefix)?;
    let a = evaluate(table, &a_summands(params, spec), prefix)?;
    Ok((e, a))
}
