use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, CsvWriter};
use crate::CmdError;
use nsclab_core::symbol::{
    characteristic_quartic, charpoly_from_matrix, eigenvalues, quartic_roots, FluidParams,
    PressureLaw,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random draws of `(xi, mu, Omega, eps)` under the rescaled convention;
/// cross-checks the closed-form quartic against the matrix characteristic
/// polynomial and the two eigenvalue routes, and writes a per-draw CSV.
pub fn run(cfg: &ExperimentConfig) -> Result<(), CmdError> {
    let hash = cfg.hash();
    let out = cfg.out_path();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = CsvWriter::create(
        &out.join("symbol_report.csv"),
        &[
            "draw", "xi1", "xi2", "xi3", "mu", "omega", "eps", "coeff_relerr", "eig_mismatch",
            "min_re_lambda",
        ],
        &hash,
    )?;
    let mut worst_coeff = 0.0f64;
    let mut worst_eig = 0.0f64;
    let mut min_re = f64::INFINITY;
    for draw in 0..cfg.mode_samples {
        let mu = rng.random_range(0.05..0.49);
        let omega = rng.random_range(-20.0..20.0);
        let eps = rng.random_range(0.02..1.0);
        let params = FluidParams::new(mu, omega, eps, PressureLaw::gamma_law(cfg.gamma)?)?;
        let xi = [
            rng.random_range(-8.0..8.0),
            rng.random_range(-8.0..8.0),
            rng.random_range(-8.0..8.0),
        ];
        let closed = characteristic_quartic(xi, &params);
        let oracle = charpoly_from_matrix(xi, &params);
        let scale = oracle.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        let coeff_err = closed
            .iter()
            .zip(oracle.iter())
            .map(|(c, o)| (num_complex::Complex64::new(*c, 0.0) - o).norm())
            .fold(0.0f64, f64::max)
            / scale;
        let ev = eigenvalues(xi, &params)?;
        let roots = quartic_roots(&closed);
        let eig_err = ev
            .iter()
            .zip(roots.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        let re_min = ev.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
        worst_coeff = worst_coeff.max(coeff_err);
        worst_eig = worst_eig.max(eig_err);
        min_re = min_re.min(re_min);
        csv.row(&[
            draw.to_string(),
            fmt_f64(xi[0]),
            fmt_f64(xi[1]),
            fmt_f64(xi[2]),
            fmt_f64(mu),
            fmt_f64(omega),
            fmt_f64(eps),
            fmt_f64(coeff_err),
            fmt_f64(eig_err),
            fmt_f64(re_min),
        ])?;
    }
    csv.finish()?;
    println!("symbol check over {} draws (config {hash})", cfg.mode_samples);
    println!("  max quartic-vs-charpoly relative error: {worst_coeff:.3e}");
    println!("  max eigenvalue route mismatch:          {worst_eig:.3e}");
    println!("  smallest Re(lambda):                    {min_re:.3e}");
    let ok = worst_coeff <= 1e-10 && worst_eig <= 1e-8 && min_re >= -1e-12;
    println!("  verdict: {}", if ok { "PASS" } else { "FAIL" });
    if ok {
        Ok(())
    } else {
        Err(CmdError::validation("symbol agreement outside tolerance"))
    }
}
