//! Nonlinear pseudospectral evolution of the rotating compressible system,
//! in velocity form (`(a, u)`) or momentum form (`(a, m)`), advanced by
//! Lawson-type exponential Runge-Kutta with the exact per-mode linear flow.

pub mod convert;
pub mod dealias;
pub mod initial;
pub mod nonlinear;
pub mod snapshot;
pub mod stepper;

pub use convert::convert;
pub use dealias::{convolution_oracle, dealias, dealiased_product, is_dealiased};
pub use initial::{make_initial_data, DataRecipe};
pub use nonlinear::{nonlinearity_momentum, nonlinearity_velocity};
pub use snapshot::{read_snapshot, write_manifest, write_snapshot, Manifest, ManifestEntry};
pub use stepper::{RunReport, StateSeries, Stepper};

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::field::SpectralField;
use crate::grid::TorusGrid;

/// Which unknowns the `vel` component carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// `(a, u)`: all nonlinear terms live in the velocity equation.
    Velocity,
    /// `(a, m)` with `m = (1 + eps a) u`: the density equation is purely
    /// linear and every nonlinearity is in divergence form.
    Momentum,
}

/// Density perturbation plus velocity (or momentum) in spectral form.
#[derive(Debug, Clone)]
pub struct State {
    pub a: SpectralField,
    pub vel: SpectralField,
    pub formulation: Formulation,
}

impl State {
    pub fn new(a: SpectralField, vel: SpectralField, formulation: Formulation) -> Result<Self> {
        if a.ncomp() != 1 || vel.ncomp() != 3 {
            return Err(Error::InvalidParameter(
                "state expects a scalar density and a 3-component velocity".into(),
            ));
        }
        if a.grid() != vel.grid() {
            return Err(Error::GridMismatch("state components on different grids".into()));
        }
        Ok(Self { a, vel, formulation })
    }

    pub fn zeros(grid: TorusGrid, formulation: Formulation) -> Self {
        Self {
            a: SpectralField::zeros(grid, 1),
            vel: SpectralField::zeros(grid, 3),
            formulation,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.a.grid()
    }

    /// 4-component `(a, u1, u2, u3)` aggregate.
    pub fn stacked(&self) -> SpectralField {
        SpectralField::stack(&[&self.a, &self.vel]).expect("components share a grid")
    }

    pub fn from_stacked(stacked: &SpectralField, formulation: Formulation) -> Result<Self> {
        if stacked.ncomp() != 4 {
            return Err(Error::InvalidParameter(
                "stacked state must have 4 components".into(),
            ));
        }
        let grid = stacked.grid();
        let mut a = SpectralField::zeros(grid, 1);
        let mut vel = SpectralField::zeros(grid, 3);
        a.comp_slice_mut(0).copy_from_slice(stacked.comp_slice(0));
        for c in 0..3 {
            vel.comp_slice_mut(c)
                .copy_from_slice(stacked.comp_slice(c + 1));
        }
        State::new(a, vel, formulation)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.vel.is_finite()
    }

    /// `min_x (1 + eps a(x))`; the solution class requires this positive.
    pub fn positivity_margin(&self, eps: f64, fft: &Fft3) -> f64 {
        let (phys, _) = self.a.to_physical(fft);
        phys[0]
            .iter()
            .map(|&v| 1.0 + eps * v)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a: self.a.scaled(c),
            vel: self.vel.scaled(c),
            formulation: self.formulation,
        }
    }
}

/// Exponential integrator order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeOrder {
    Two,
    Four,
}

impl SchemeOrder {
    pub fn order(&self) -> usize {
        match self {
            SchemeOrder::Two => 2,
            SchemeOrder::Four => 4,
        }
    }
}

/// Time-stepping configuration.
#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: SchemeOrder,
    pub dealias: bool,
    pub snapshot_every: usize,
    pub positivity_floor: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            scheme: SchemeOrder::Two,
            dealias: true,
            snapshot_every: 1,
            positivity_floor: 0.05,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter("snapshot cadence must be >= 1".into()));
        }
        if !(self.positivity_floor > 0.0 && self.positivity_floor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "positivity floor must lie in (0, 1), got {}",
                self.positivity_floor
            )));
        }
        Ok(())
    }

    /// Largest retained frequency magnitude under this dealiasing setting.
    pub fn xi_max(&self, grid: &TorusGrid) -> f64 {
        let k = if self.dealias {
            grid.n() / 3
        } else {
            grid.n() / 2 - 1
        };
        grid.fundamental() * k as f64 * 3f64.sqrt()
    }

    /// Accuracy bound on the step: the fastest retained acoustic phase
    /// `|xi|_max / eps` must be resolved. Order two uses
    /// `dt <= 0.5 eps / |xi|_max`; order four is allowed twice that.
    pub fn dt_limit(&self, grid: &TorusGrid, eps: f64) -> f64 {
        let base = eps / self.xi_max(grid);
        match self.scheme {
            SchemeOrder::Two => 0.5 * base,
            SchemeOrder::Four => base,
        }
    }
}
