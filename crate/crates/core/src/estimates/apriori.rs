use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::LebesgueExp;
use crate::lp::besov::Truncation;
use crate::lp::partition::DyadicPartition;
use crate::sim::StateSeries;
use crate::symbol::FluidParams;
use crate::estimates::data::compute_data_functionals;
use crate::estimates::ea::{compute_both, BandLpTable, SummandSpec, Target};
use crate::estimates::NormSuiteSpec;
use serde::Serialize;

/// One low-frequency a priori piece: measured left side, assembled right
/// side (with the generic constant dropped), and their ratio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LowPiece {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Ladder-point evaluation of the master inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct TimePointReport {
    pub t: f64,
    pub e_total: f64,
    pub a_total: f64,
    pub rhs_e: f64,
    pub rhs_a: f64,
    pub ratio_e: f64,
    pub ratio_a: f64,
    pub low_pieces: [LowPiece; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct AprioriReport {
    pub points: Vec<TimePointReport>,
    /// `max_t E(t) / RHS_E(t)`: the single fitted constant of the energy
    /// inequality. Bounded uniformly as the data amplitude shrinks.
    pub fitted_c_e: f64,
    pub fitted_c_a: f64,
    pub alpha: f64,
    /// Data tail `||(a0,u0)||^{h;alpha}_{B^{1/2}_{2,1}} + ||a0||^{h;alpha}_{B^{3/2}_{2,1}}`.
    pub delta_tail: f64,
    pub d_star: f64,
    pub d_eps: f64,
}

fn summand(
    target: Target,
    trunc: Truncation,
    s: f64,
    p: f64,
    sigma: f64,
    r: f64,
    tilde: bool,
) -> SummandSpec {
    SummandSpec {
        name: String::new(),
        target,
        trunc,
        s,
        p,
        sigma: if sigma.is_infinite() {
            LebesgueExp::Infinity
        } else {
            LebesgueExp::Finite(sigma)
        },
        time_exp: if r.is_infinite() {
            LebesgueExp::Infinity
        } else {
            LebesgueExp::Finite(r)
        },
        tilde,
        scale: 1.0,
    }
}

/// Geometric time ladder with 8 points per decade between the first positive
/// snapshot time and the final time (final time always included).
fn time_ladder(times: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    if times.len() < 2 {
        return out;
    }
    let t1 = times[1];
    let t_end = *times.last().unwrap();
    let mut t = t1;
    let factor = 10f64.powf(1.0 / 8.0);
    let mut last_idx = usize::MAX;
    while t < t_end * (1.0 - 1e-12) {
        let idx = match times.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1).max(1),
        };
        if idx != last_idx && idx >= 1 {
            out.push(idx);
            last_idx = idx;
        }
        t *= factor;
    }
    if out.last() != Some(&(times.len() - 1)) {
        out.push(times.len() - 1);
    }
    out
}

/// Evaluates the master energy/auxiliary inequalities along a time ladder,
/// with every generic constant collapsed into a single fitted `C`, and the
/// four low-frequency pieces individually.
pub fn apriori_diagnostic(
    series: &StateSeries,
    params: &FluidParams,
    spec: &NormSuiteSpec,
    part: &DyadicPartition,
    fft: &Fft3,
) -> Result<AprioriReport> {
    if series.times.len() < 2 {
        return Err(Error::SeriesTooShort(
            "a priori diagnostics need at least two snapshots for time quadrature".into(),
        ));
    }
    spec.validate_theorem_regime()?;
    spec.validate_thresholds(params.omega, params.eps)?;
    let table = BandLpTable::build(series, Some(spec.q), part, fft)?;
    let initial = &series.states[0];
    let funcs = compute_data_functionals(initial, params, part, fft)?;

    // data tail at the supplied split alpha
    let delta_tail = {
        use crate::lp::besov::{besov_norm, BesovSpec};
        let tail_mid = BesovSpec::new(2.0, 1.0, 0.5)?
            .truncated(Truncation::High { beta: spec.alpha })?;
        let tail_high = BesovSpec::new(2.0, 1.0, 1.5)?
            .truncated(Truncation::High { beta: spec.alpha })?;
        besov_norm(&initial.stacked(), &tail_mid, part, fft)?
            + besov_norm(&initial.a, &tail_high, part, fft)?
    };

    let (q, r) = (spec.q, spec.r);
    let rp = spec.r_conj();
    let eps = params.eps;
    let oe = (params.omega * params.eps).abs();
    let alpha = spec.alpha;
    let low_oe = Truncation::Low { alpha: oe };

    let mut points = Vec::new();
    for idx in time_ladder(&series.times) {
        let prefix = idx + 1;
        let t = series.times[idx];
        let (e_rep, a_rep) = compute_both(&table, params, spec, prefix)?;
        let (e, a) = (e_rep.total, a_rep.total);
        let mixed_full = a.powf(r / (r - 1.0)) * e.powf((r - 2.0) / (r - 1.0));
        let mixed_half = a.powf(r / (2.0 * (r - 1.0))) * e.powf((r - 2.0) / (2.0 * (r - 1.0)));
        let drive = eps * alpha * e + a;
        let rhs_e = funcs.d_eps
            + (1.0 + drive) * (a * a + mixed_full)
            + drive * drive
            + drive * e
            + eps * e * e
            + mixed_half * e;
        let omega_fac = if params.omega != 0.0 {
            params.omega.abs().powf(-1.0 / r)
        } else {
            1.0
        };
        let rhs_a = delta_tail
            + (1.0 + drive) * (a * a + mixed_full)
            + omega_fac * (1.0 + e) * e * e
            + omega_fac * (a * a + mixed_full)
            + drive * drive
            + mixed_full;

        // low-frequency pieces
        let ev = |s: SummandSpec| table.eval(&s, prefix);
        let au_low_inf = ev(summand(Target::Both, low_oe, -1.5, 2.0, f64::INFINITY, f64::INFINITY, false))?;
        let a_inf_q = ev(summand(Target::DensityOnly, Truncation::Full, 3.0 / q, q, 1.0, f64::INFINITY, true))?;
        let au_l2_qinf = ev(summand(Target::Both, Truncation::Full, 3.0 / q - 1.0, q, f64::INFINITY, 2.0, true))?;
        let a_inf_half = ev(summand(Target::DensityOnly, Truncation::Full, 0.5, 2.0, 1.0, f64::INFINITY, true))?;
        let u_inf_low = ev(summand(Target::VelocityOnly, Truncation::Full, -0.5, 2.0, f64::INFINITY, f64::INFINITY, false))?;
        let quad = (1.0 + eps * a_inf_q) * au_l2_qinf * au_l2_qinf;
        let piece1 = {
            let lhs = au_low_inf;
            let rhs = funcs.d_star + quad + eps * a_inf_half * u_inf_low;
            LowPiece { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 } }
        };
        let piece2 = {
            let lhs = ev(summand(Target::Both, low_oe, 3.0 / q - 3.0 + 4.0 / r, q, f64::INFINITY, r, true))?;
            let u_r = ev(summand(Target::VelocityOnly, Truncation::Full, 3.0 / q - 2.0 + 4.0 / r, q, f64::INFINITY, r, true))?;
            let rhs = oe.powf(2.0 / r) * (funcs.d_star + quad) + eps * a_inf_half * u_r;
            LowPiece { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 } }
        };
        let piece3 = {
            let lhs = ev(summand(Target::Both, low_oe, 3.0 / q - 3.0 + 4.0 / rp, q, f64::INFINITY, rp, true))?;
            let a_mixed = ev(summand(Target::DensityOnly, Truncation::Full, 3.0 / q - 2.0 / r, q, f64::INFINITY, f64::INFINITY, true))?;
            let u_rp = ev(summand(Target::VelocityOnly, Truncation::Full, 3.0 / q - 1.0 + 2.0 / rp, q, f64::INFINITY, rp, true))?;
            let a_l2_q1 = ev(summand(Target::DensityOnly, Truncation::Full, 3.0 / q, q, 1.0, 2.0, true))?;
            let u_l2_q1 = ev(summand(Target::VelocityOnly, Truncation::Full, 3.0 / q, q, 1.0, 2.0, true))?;
            let u_r_q1 = ev(summand(Target::VelocityOnly, Truncation::Full, 3.0 / q - 1.0 + 2.0 / r, q, 1.0, r, true))?;
            let rhs = oe.powf(2.0 / r) * (funcs.d_star + quad)
                + eps * a_mixed * u_rp
                + params.omega * params.omega * eps.powi(3) * a_l2_q1 * (u_l2_q1 + u_r_q1);
            LowPiece { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 } }
        };
        let piece4 = {
            let lhs = ev(summand(Target::Both, low_oe, 2.5, 2.0, f64::INFINITY, 1.0, true))?;
            let rhs = oe * oe * (funcs.d_star + quad);
            LowPiece { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 } }
        };

        points.push(TimePointReport {
            t,
            e_total: e,
            a_total: a,
            rhs_e,
            rhs_a,
            ratio_e: if rhs_e > 0.0 { e / rhs_e } else { 0.0 },
            ratio_a: if rhs_a > 0.0 { a / rhs_a } else { 0.0 },
            low_pieces: [piece1, piece2, piece3, piece4],
        });
    }
    let fitted_c_e = points.iter().map(|p| p.ratio_e).fold(0.0, f64::max);
    let fitted_c_a = points.iter().map(|p| p.ratio_a).fold(0.0, f64::max);
    Ok(AprioriReport {
        points,
        fitted_c_e,
        fitted_c_a,
        alpha,
        delta_tail,
        d_star: funcs.d_star,
        d_eps: funcs.d_eps,
    })
}
