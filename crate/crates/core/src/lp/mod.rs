//! Littlewood-Paley dyadic analysis on the torus: band projections, Besov
//! and Chemin-Lerner norms with frequency truncations, Bony paraproducts,
//! and empirical harnesses for the product/composition estimates.

pub mod besov;
pub mod bony;
pub mod chemin;
pub mod harness;
pub mod partition;

pub use besov::{band_weights, besov_norm, ell_sigma, BesovSpec, Truncation};
pub use bony::bony_decompose;
pub use chemin::{chemin_lerner_norm, time_lr, time_lr_of_besov, FieldSeries};
pub use harness::{
    composition_estimate_harness, composition_estimate_harness_with, product_estimate_harness,
    random_band_limited, HarnessReport, ProductLemma,
};
pub use partition::{make_partition, DyadicPartition};
