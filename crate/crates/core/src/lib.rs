//! Pseudospectral laboratory for the 3D compressible Navier-Stokes system
//! with Coriolis forcing on a periodic box.
//!
//! The crate is organized around four subsystems:
//!
//! * [`lp`] - Littlewood-Paley dyadic analysis: Besov and Chemin-Lerner
//!   norms with low/middle/high frequency truncations, Bony paraproducts,
//!   and empirical harnesses for product and composition estimates.
//! * [`symbol`] - exact per-mode linear theory: the 4x4 symbol of the
//!   linearized system, its quartic characteristic polynomial, eigenvalues,
//!   matrix-exponential propagators, modified-energy functionals, decay-rate
//!   verification, and Strichartz-type space-time measurements.
//! * [`sim`] - nonlinear pseudospectral evolution in velocity or momentum
//!   form with Lawson-type exponential Runge-Kutta stepping.
//! * [`estimates`] - the composite solution norms `E` and `A`, data
//!   functionals, fitted-constant lemma checks, and the rotation/Mach regime
//!   probe.

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;

pub mod estimates;
pub mod lp;
pub mod sim;
pub mod symbol;

pub use error::{Error, Result};

/// Raises glibc's mmap/trim thresholds once per process. The spectral core
/// cycles through many half-megabyte buffers; with default thresholds each
/// one is a fresh mmap plus a page-fault sweep, which dominates the step
/// cost. Invoked by the FFT and stepper constructors.
pub fn tune_allocator() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| unsafe {
        libc::mallopt(libc::M_MMAP_THRESHOLD, 1 << 28);
        libc::mallopt(libc::M_TRIM_THRESHOLD, 1 << 28);
    });
}
pub use field::{LebesgueExp, SpectralField};
pub use fft::Fft3;
pub use grid::TorusGrid;
