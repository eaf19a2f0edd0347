//! The composite solution norms driving the global-existence machinery: the
//! energy norm `E` and auxiliary norm `A` with their frequency truncations,
//! the data functionals, fitted-constant checks for the interpolation
//! relations, master-inequality diagnostics, and the rotation/Mach regime
//! probe.

pub mod apriori;
pub mod continuation;
pub mod data;
pub mod ea;
pub mod lemma;

pub use apriori::{apriori_diagnostic, AprioriReport, TimePointReport};
pub use continuation::{
    alpha_delta, continuation_probe, row_monotone_fraction, upward_closed_fraction, ProbeSetup,
    RegimeCell, RegimeMap,
};
pub use data::{compute_data_functionals, DataFunctionals};
pub use ea::{compute_a, compute_e, BandLpTable, NormReport};
pub use lemma::{lemma_ae_check, AeCheckReport};

use crate::error::{Error, Result};

/// Exponent/threshold bundle for the norm suites: spatial exponent `q`, time
/// exponent `r`, the low/mid split `alpha`, and the mid/high threshold
/// `beta0` (applied at `beta0 / eps`).
#[derive(Debug, Clone, Copy)]
pub struct NormSuiteSpec {
    pub q: f64,
    pub r: f64,
    pub alpha: f64,
    pub beta0: f64,
}

impl NormSuiteSpec {
    pub fn new(q: f64, r: f64, alpha: f64, beta0: f64) -> Result<Self> {
        if !(q >= 1.0) || !(r >= 1.0) || !(alpha >= 0.0) || !(beta0 > 0.0) {
            return Err(Error::InvalidParameter(
                "norm suite needs q, r >= 1, alpha >= 0, beta0 > 0".into(),
            ));
        }
        Ok(Self { q, r, alpha, beta0 })
    }

    /// Conjugate time exponent `r' = r / (r - 1)`.
    pub fn r_conj(&self) -> f64 {
        self.r / (self.r - 1.0)
    }

    /// `r*` with `1/r* = 1/2 - 1/r`.
    pub fn r_star(&self) -> f64 {
        1.0 / (0.5 - 1.0 / self.r)
    }

    /// The exponent window used by the fixed-point argument; every failed
    /// constraint is reported by name.
    pub fn validate_theorem_regime(&self) -> Result<()> {
        let (q, r) = (self.q, self.r);
        let mut failed: Vec<&str> = Vec::new();
        if !(2.0 < q && q < 3.0) {
            failed.push("2 < q < 3");
        }
        if !(2.0 < r && r.is_finite()) {
            failed.push("2 < r < inf");
        }
        if 1.0 / q + 1.0 / r > 0.5 + 1e-12 {
            failed.push("1/q + 1/r <= 1/2");
        }
        if 2.0 / r > 3.0 / q - 0.5 + 1e-12 {
            failed.push("2/r <= 3/q - 1/2");
        }
        if -3.0 / q > -1.5 + 4.0 / r + 1e-12 {
            failed.push("-3/q <= -3/2 + 4/r");
        }
        if -1.5 + 4.0 / r >= 3.0 / q - 1e-12 {
            failed.push("-3/2 + 4/r < 3/q");
        }
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::ConstraintViolated(failed.join("; ")))
        }
    }

    /// Threshold ordering `|Omega| eps <= alpha < beta0 / eps`.
    pub fn validate_thresholds(&self, omega: f64, eps: f64) -> Result<()> {
        let oe = (omega * eps).abs();
        if self.alpha < oe {
            return Err(Error::ConstraintViolated(format!(
                "|Omega| eps <= alpha (got alpha = {}, |Omega| eps = {oe})",
                self.alpha
            )));
        }
        if !(self.alpha < self.beta0 / eps) {
            return Err(Error::ConstraintViolated(format!(
                "alpha < beta0 / eps (got alpha = {}, beta0/eps = {})",
                self.alpha,
                self.beta0 / eps
            )));
        }
        Ok(())
    }
}
