use crate::config::ExperimentConfig;
use crate::CmdError;
use nalgebra::Vector4;
use nsclab_core::field::LebesgueExp;
use nsclab_core::lp::{
    besov_norm, bony_decompose, make_partition, product_estimate_harness, random_band_limited,
    BesovSpec, ProductLemma, Truncation,
};
use nsclab_core::sim::{
    convolution_oracle, dealiased_product, make_initial_data, DataRecipe, Stepper, StepperConfig,
};
use nsclab_core::symbol::{
    characteristic_quartic, charpoly_from_matrix, eigenvalues, propagator, quartic_roots,
    verify_decay_bound, DecaySetup, EnergyFunctional, FluidParams, PressureLaw,
};
use nsclab_core::symbol::expm::op_norm_2;
use nsclab_core::estimates::{compute_data_functionals, compute_e, NormSuiteSpec};
use nsclab_core::sim::StateSeries;
use nsclab_core::{Fft3, SpectralField, TorusGrid};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = (&'static str, Result<String, String>);

/// Reduced property suites across every subsystem, printed as a one-screen
/// pass/fail table. Dyadic-partition suites need three resolvable bands,
/// which takes 32 points per axis (the band count depends only on `n`), so
/// smaller configured grids are bumped to 32 for those checks while the
/// solver checks honor the requested size.
pub fn run(cfg: &ExperimentConfig) -> Result<(), CmdError> {
    let t_start = std::time::Instant::now();
    let n = cfg.n.clamp(8, 32).max(32);
    let box_length = cfg.box_length;
    let grid = TorusGrid::new(n, box_length)?;
    let part = make_partition(grid)?;
    let fft = Fft3::new(grid.n());
    let gamma = PressureLaw::gamma_law(cfg.gamma)?;
    let params = FluidParams::new(cfg.mu, 5.0, 0.1, gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut checks: Vec<Check> = Vec::new();

    // 1. partition of unity on covered modes
    checks.push(("partition of unity", {
        let (lo, hi) = grid.covered_mode_range();
        let mut worst = 0.0f64;
        for i in 0..grid.n() {
            for j in 0..grid.n() {
                for k in 0..grid.n() {
                    let r = grid.xi_norm(i, j, k);
                    if r >= lo && r <= hi {
                        worst = worst.max((part.partition_sum(r) - 1.0).abs());
                    }
                }
            }
        }
        if worst <= 1e-12 {
            Ok(format!("max defect {worst:.1e}"))
        } else {
            Err(format!("defect {worst:.1e} > 1e-12"))
        }
    }));

    // 2. reconstruction + almost orthogonality
    checks.push(("block reconstruction", {
        let f = random_band_limited(grid, &mut rng);
        let mut sum = SpectralField::zeros(grid, 1);
        for j in part.bands() {
            sum.add_assign(&part.project_band(&f, j).unwrap());
        }
        let rel = sum.sub(&f).l2_norm() / f.l2_norm().max(1e-300);
        let mut ortho = true;
        for j in part.bands() {
            for k in part.bands() {
                if (j - k).abs() >= 2 {
                    let pj = part.project_band(&f, j).unwrap();
                    ortho &= part.project_band(&pj, k).unwrap().l2_norm() == 0.0;
                }
            }
        }
        if rel <= 1e-12 && ortho {
            Ok(format!("reconstruction {rel:.1e}, disjoint blocks exact"))
        } else {
            Err(format!("reconstruction {rel:.1e}, orthogonality {ortho}"))
        }
    }));

    // 3. single-mode Besov closed form
    checks.push(("besov closed form", {
        let (j_min, j_max) = part.band_range();
        let j_mid = (j_min + j_max) / 2;
        let xi_target = 2f64.powi(j_mid);
        let k = (xi_target / grid.fundamental()).round() as i64;
        let mut f = SpectralField::zeros(grid, 1);
        let nn = grid.n();
        f.comp_mut(0)[[k as usize, 0, 0]] = num_complex::Complex64::new(0.5, 0.0);
        f.comp_mut(0)[[nn - k as usize, 0, 0]] = num_complex::Complex64::new(0.5, 0.0);
        let spec = BesovSpec::new(2.0, 1.0, 0.5).unwrap();
        let have = besov_norm(&f, &spec, &part, &fft).unwrap();
        let want = 2f64.powf(0.5 * j_mid as f64) * std::f64::consts::FRAC_1_SQRT_2;
        if (have - want).abs() <= 1e-12 * want {
            Ok(format!("single mode norm {have:.6} = closed form"))
        } else {
            Err(format!("{have} vs closed form {want}"))
        }
    }));

    // 4. Bony reconstruction
    checks.push(("bony paraproducts", {
        let f = random_band_limited(grid, &mut rng);
        let g = random_band_limited(grid, &mut rng);
        let product = dealiased_product(&f, &g, &fft);
        let (tfg, r, tgf) = bony_decompose(&f, &g, &part, &fft).unwrap();
        let mut sum = tfg;
        sum.add_assign(&r);
        sum.add_assign(&tgf);
        let rel = sum.sub(&product).l2_norm() / product.l2_norm().max(1e-300);
        if rel <= 1e-11 {
            Ok(format!("identity to {rel:.1e}"))
        } else {
            Err(format!("identity off by {rel:.1e}"))
        }
    }));

    // 5. quartic vs matrix charpoly + eigenvalue routes
    checks.push(("symbol quartic/eigen", {
        let mut worst_c = 0.0f64;
        let mut worst_e = 0.0f64;
        let mut ok = true;
        for _ in 0..200 {
            let p = FluidParams::new(
                rng.random_range(0.05..0.49),
                rng.random_range(-20.0..20.0),
                rng.random_range(0.02..1.0),
                gamma,
            )
            .unwrap();
            let xi = [
                rng.random_range(-8.0..8.0),
                rng.random_range(-8.0..8.0),
                rng.random_range(-8.0..8.0),
            ];
            let closed = characteristic_quartic(xi, &p);
            let oracle = charpoly_from_matrix(xi, &p);
            let scale = oracle.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            worst_c = worst_c.max(
                closed
                    .iter()
                    .zip(oracle.iter())
                    .map(|(c, o)| (num_complex::Complex64::new(*c, 0.0) - o).norm())
                    .fold(0.0f64, f64::max)
                    / scale,
            );
            match eigenvalues(xi, &p) {
                Ok(ev) => {
                    let roots = quartic_roots(&closed);
                    worst_e = worst_e.max(
                        ev.iter()
                            .zip(roots.iter())
                            .map(|(a, b)| (a - b).norm())
                            .fold(0.0f64, f64::max),
                    );
                }
                Err(_) => ok = false,
            }
        }
        if ok && worst_c <= 1e-10 && worst_e <= 1e-8 {
            Ok(format!("coeff err {worst_c:.1e}, eig err {worst_e:.1e}"))
        } else {
            Err(format!("coeff err {worst_c:.1e}, eig err {worst_e:.1e}"))
        }
    }));

    // 6. propagator contraction/group + energy sandwich
    checks.push(("propagator + energy", {
        let mut ok = true;
        let mut msg = String::new();
        for _ in 0..100 {
            let p = FluidParams::new(
                rng.random_range(0.05..0.49),
                rng.random_range(-10.0..10.0),
                rng.random_range(0.05..1.0),
                gamma,
            )
            .unwrap();
            let xi = [
                rng.random_range(-6.0..6.0),
                rng.random_range(-6.0..6.0),
                rng.random_range(-6.0..6.0),
            ];
            let (t, s) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
            let pt = propagator(t, xi, &p);
            let ps = propagator(s, xi, &p);
            let pts = propagator(t + s, xi, &p);
            let gerr = (pts - pt * ps).map(|v| v.norm()).max();
            if gerr > 1e-10 || op_norm_2(&pt) > 1.0 + 1e-10 {
                ok = false;
                msg = format!("group {gerr:.1e} or contraction failed");
                break;
            }
            let beta = rng.random_range(1.0..3.0);
            let func = EnergyFunctional::new(&p, beta).unwrap();
            let rad = func.validity_radius(&p);
            let xn: f64 = xi.iter().map(|v| v * v).sum::<f64>();
            if xn.sqrt() <= rad {
                let u = Vector4::from_fn(|_, _| {
                    num_complex::Complex64::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    )
                });
                let v2 = func.v_squared(&u, xi, &p).unwrap();
                let oe = p.omega * p.eps;
                let w = (oe * oe + xn) * u.norm_squared();
                if v2 < 0.5 * w - 1e-12 * w.max(1.0) || v2 > 1.5 * w + 1e-12 * w.max(1.0) {
                    ok = false;
                    msg = "sandwich failed".into();
                    break;
                }
            }
        }
        if ok {
            Ok("group/contraction/sandwich hold".into())
        } else {
            Err(msg)
        }
    }));

    // 7. guaranteed decay rates
    checks.push(("decay bound", {
        let p = FluidParams::new(0.25, 5.0, 0.1, gamma).unwrap();
        let modes: Vec<[f64; 3]> = (0..30)
            .map(|i| {
                let r = 0.02 * (i as f64 + 1.0);
                [r / 2f64.sqrt(), r / 2f64.sqrt(), 0.0]
            })
            .collect();
        match verify_decay_bound(&p, &DecaySetup::default(), &modes) {
            Ok(reps) => Ok(format!("{} modes clear kappa/(48 beta^2)", reps.len())),
            Err(e) => Err(e.to_string()),
        }
    }));

    // 8. pseudospectral product vs convolution oracle (n = 8)
    checks.push(("product vs convolution", {
        let g8 = TorusGrid::new(8, 2.0 * std::f64::consts::PI).unwrap();
        let f8 = Fft3::new(8);
        let mut a = SpectralField::zeros(g8, 1);
        let mut b = SpectralField::zeros(g8, 1);
        for field in [&mut a, &mut b] {
            for i in 0..8 {
                for j in 0..8 {
                    for k in 0..8 {
                        let kv = [
                            g8.k_of_index(i).abs(),
                            g8.k_of_index(j).abs(),
                            g8.k_of_index(k).abs(),
                        ];
                        if kv.iter().all(|&x| x <= 2) {
                            field.comp_mut(0)[[i, j, k]] = num_complex::Complex64::new(
                                rng.random_range(-0.5..0.5),
                                rng.random_range(-0.5..0.5),
                            );
                        }
                    }
                }
            }
            field.hermitianize();
        }
        let fast = dealiased_product(&a, &b, &f8);
        let slow = convolution_oracle(&a, &b);
        let rel = fast.sub(&slow).l2_norm() / slow.l2_norm().max(1e-300);
        if rel <= 1e-12 {
            Ok(format!("agreement {rel:.1e}"))
        } else {
            Err(format!("disagreement {rel:.1e}"))
        }
    }));

    // 9. short nonlinear run: mean conservation + reality
    checks.push(("mean & reality", {
        let mut sc = StepperConfig {
            snapshot_every: 50,
            ..Default::default()
        };
        sc.dt = sc.dt_limit(&grid, params.eps);
        let stepper = Stepper::new(grid, params, sc).unwrap();
        let init = make_initial_data(
            &DataRecipe::RandomBand {
                j_lo: part.band_range().0,
                j_hi: part.band_range().1,
                amplitude: 0.2,
                seed: cfg.seed,
            },
            grid,
            stepper.fft(),
        )
        .unwrap();
        match stepper.simulate(&init, 0.4) {
            Ok((series, rep)) => {
                let last = series.states.last().unwrap();
                let drift = rep.mean_a_drift();
                let herm = last.a.hermitian_defect().max(last.vel.hermitian_defect());
                if rep.stable && drift <= 1e-13 && herm <= 1e-12 {
                    Ok(format!("drift {drift:.1e}, hermitian defect {herm:.1e}"))
                } else {
                    Err(format!("drift {drift:.1e}, hermitian defect {herm:.1e}"))
                }
            }
            Err(e) => Err(e.to_string()),
        }
    }));

    // 10. norm suite: homogeneity + data functional ordering
    checks.push(("norm suite", {
        let spec = NormSuiteSpec::new(2.8, 8.0, cfg.effective_alpha(&grid), cfg.beta0).unwrap();
        let init = make_initial_data(
            &DataRecipe::RandomBand {
                j_lo: part.band_range().0,
                j_hi: part.band_range().1,
                amplitude: 1.0,
                seed: cfg.seed + 1,
            },
            grid,
            &fft,
        )
        .unwrap();
        let times: Vec<f64> = (0..5).map(|i| 0.5 * i as f64).collect();
        let series = StateSeries {
            states: times.iter().map(|_| init.clone()).collect(),
            times,
        };
        let scaled = StateSeries {
            times: series.times.clone(),
            states: series.states.iter().map(|s| s.scaled(3.0)).collect(),
        };
        let e1 = compute_e(&series, &params, &spec, &part, &fft).unwrap();
        let e3 = compute_e(&scaled, &params, &spec, &part, &fft).unwrap();
        let homo = (e3.total - 3.0 * e1.total).abs() / e3.total.max(1e-300);
        let d = compute_data_functionals(&init, &params, &part, &fft).unwrap();
        if homo <= 1e-10 && d.d_star <= d.d_eps {
            Ok(format!("homogeneity {homo:.1e}, D* <= D_eps"))
        } else {
            Err(format!("homogeneity {homo:.1e}, D* = {} vs {}", d.d_star, d.d_eps))
        }
    }));

    // 11. bilinear estimate harness stability across two batches
    checks.push(("product estimate harness", {
        let lemma = ProductLemma::Sobolev {
            p1: 2.0,
            p2: 2.0,
            s1: 0.5,
            s2: 0.5,
        };
        let r1 = product_estimate_harness(lemma, 160, cfg.seed, &part, &fft).unwrap();
        let r2 = product_estimate_harness(lemma, 160, cfg.seed + 999, &part, &fft).unwrap();
        let rel = (r1.max_ratio - r2.max_ratio).abs() / r1.max_ratio.max(r2.max_ratio);
        if rel <= 0.05 && r1.max_ratio.is_finite() {
            Ok(format!(
                "fitted constants {:.4} / {:.4} ({:.1}% apart)",
                r1.max_ratio,
                r2.max_ratio,
                100.0 * rel
            ))
        } else {
            Err(format!(
                "constants {:.4} vs {:.4} differ by {:.1}%",
                r1.max_ratio,
                r2.max_ratio,
                100.0 * rel
            ))
        }
    }));

    // 12. composition estimate: identity gives unit ratio, smooth F stable
    checks.push(("composition harness", {
        use nsclab_core::lp::composition_estimate_harness_with;
        let spec = BesovSpec::new(2.0, 1.0, 0.5).unwrap();
        let rep = composition_estimate_harness_with(
            &|a| a / (1.0 + a),
            0.5,
            &spec,
            24,
            cfg.seed,
            &part,
            &fft,
            cfg.oversample,
        )
        .unwrap();
        let ident = composition_estimate_harness_with(
            &|a| a,
            0.5,
            &spec,
            4,
            cfg.seed,
            &part,
            &fft,
            cfg.oversample,
        )
        .unwrap();
        let unit = ident.ratios.iter().all(|r| (r - 1.0).abs() < 1e-12);
        if unit && rep.max_ratio.is_finite() && rep.max_ratio > 0.0 {
            Ok(format!("identity ratio 1, smooth-F constant {:.4}", rep.max_ratio))
        } else {
            Err("composition ratios misbehaved".into())
        }
    }));

    // 13. Chemin-Lerner / plain time norm ordering
    checks.push(("time-norm ordering", {
        use nsclab_core::lp::{chemin_lerner_norm, time_lr_of_besov, FieldSeries};
        let f1 = random_band_limited(grid, &mut rng);
        let f2 = random_band_limited(grid, &mut rng);
        let f3 = random_band_limited(grid, &mut rng);
        let series = FieldSeries::new(vec![0.0, 0.4, 1.1], vec![f1, f2, f3]).unwrap();
        let spec = BesovSpec::new(2.0, f64::INFINITY, 0.5)
            .unwrap()
            .truncated(Truncation::Full)
            .unwrap();
        let tilde =
            chemin_lerner_norm(&series, LebesgueExp::Finite(2.0), &spec, &part, &fft).unwrap();
        let plain =
            time_lr_of_besov(&series, LebesgueExp::Finite(2.0), &spec, &part, &fft).unwrap();
        if tilde <= plain * (1.0 + 1e-12) {
            Ok(format!("tilde {tilde:.4e} <= plain {plain:.4e}"))
        } else {
            Err(format!("tilde {tilde:.4e} > plain {plain:.4e}"))
        }
    }));

    let mut failures = 0;
    println!("verification suites at n = {} (L = {:.3}):", grid.n(), grid.length());
    for (name, result) in &checks {
        match result {
            Ok(msg) => println!("  [PASS] {name:26} {msg}"),
            Err(msg) => {
                failures += 1;
                println!("  [FAIL] {name:26} {msg}");
            }
        }
    }
    println!(
        "{} of {} suites passed in {:.1} s",
        checks.len() - failures,
        checks.len(),
        t_start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        Ok(())
    } else {
        Err(CmdError::validation(format!("{failures} verification suites failed")))
    }
}
