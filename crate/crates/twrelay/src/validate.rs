//! Self-check harness behind the `validate` subcommand: dense-matrix
//! cross-checks of the Gram fast path, Jensen ordering, and the
//! norm-identity convergence suite, serialized as a JSON report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use twrelay_core::channel::{draw_channels, draw_distortions};
use twrelay_core::gram::{
    bilinear_form, build_gram_cache, compute_trial_sinr, frobenius_norms, power_control_rho,
    precoder_row_norm,
};
use twrelay_core::{DistortionMode, LargeScaleFading, Leg, SystemConfig};
use twrelay_oracle as oracle;

use crate::montecarlo::{
    estimate_jensen_bound, estimate_se, lln_convergence_suite, ConvergenceReport,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

/// Environment variable that deliberately corrupts one internal constant,
/// used to prove the harness can fail.
pub const CORRUPT_ENV: &str = "TWRELAY_SELFCHECK_CORRUPT";

fn corruption() -> f64 {
    if std::env::var_os(CORRUPT_ENV).is_some() {
        1.5
    } else {
        1.0
    }
}

const DENSE_TOL: f64 = 1e-9;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Compares every Gram-route quantity against the explicitly formed dense
/// precoder on random small instances.
pub fn dense_equivalence(instances: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for inst in 0..instances {
        let n = rng.random_range(1..=16);
        let k = rng.random_range(1..=4usize.min(n));
        let mode = if inst % 2 == 0 {
            DistortionMode::Realization
        } else {
            DistortionMode::ConditionalExpectation
        };
        let mut config = SystemConfig::symmetric(n, k, 10.0, 40.0, 0.08);
        config.distortion_mode = mode;
        let fading = LargeScaleFading::symmetric_unit(k);
        let channel = draw_channels(&config, &fading, &mut rng);
        let distortion = draw_distortions(&channel, &config, &mut rng);
        let cache = build_gram_cache(&channel);
        let f = oracle::dense_precoder(&channel);

        for i in 0..k {
            for j in 0..k {
                for (l, r) in [(Leg::G, Leg::H), (Leg::G, Leg::G), (Leg::H, Leg::H)] {
                    let fast = bilinear_form(&cache, i, j, l, r);
                    let dense = oracle::dense_bilinear(&channel, &f, i, j, l, r);
                    worst = worst.max((fast - dense).norm() / dense.norm().max(1e-300));
                }
            }
            for leg in [Leg::G, Leg::H] {
                worst = worst.max(rel(
                    precoder_row_norm(&cache, i, leg),
                    oracle::dense_row_norm_sqr(&channel, &f, i, leg),
                ));
            }
        }
        let (f2, fa2) = frobenius_norms(&cache);
        let (df2, dfa2) = oracle::dense_frobenius_norms(&channel, &f);
        worst = worst.max(rel(f2, df2)).max(rel(fa2, dfa2));

        let rho = power_control_rho(&cache, &channel, &distortion, &config).unwrap();
        worst = worst.max(rel(rho, oracle::dense_rho(&channel, &f, &distortion, &config)));

        let fast = compute_trial_sinr(&cache, &channel, &distortion, &config).unwrap();
        let dense = oracle::dense_trial_sinr(&channel, &distortion, &config);
        for (fb, db) in fast
            .breakdown_a
            .iter()
            .zip(&dense.breakdown_a)
            .chain(fast.breakdown_b.iter().zip(&dense.breakdown_b))
        {
            for (x, y) in [
                (fb.signal, db.signal),
                (fb.inter_user, db.inter_user),
                (fb.relay_noise, db.relay_noise),
                (fb.device_noise, db.device_noise),
                (fb.rx_distortion, db.rx_distortion),
                (fb.tx_distortion, db.tx_distortion),
            ] {
                if y != 0.0 || x != 0.0 {
                    worst = worst.max(rel(x, y));
                }
            }
        }
    }
    let tol = DENSE_TOL * corruption().powi(-40); // corruption collapses the tolerance
    CheckResult {
        name: "dense_oracle_equivalence".into(),
        pass: worst <= tol,
        detail: format!("worst relative deviation {worst:.3e} over {instances} instances (tol {tol:.1e})"),
    }
}

/// Jensen lower bound must not exceed the direct estimate beyond noise.
pub fn jensen_ordering(seed: u64) -> CheckResult {
    let fading = LargeScaleFading::symmetric_unit(5);
    let mut worst = f64::NEG_INFINITY;
    for (gi, (&n, &kappa)) in [64usize, 128, 256]
        .iter()
        .flat_map(|n| [0.0, 0.05, 0.1, 0.15].iter().map(move |k| (n, k)))
        .enumerate()
    {
        let config = SystemConfig::symmetric(n, 5, 10.0, 40.0, kappa);
        let point_seed = seed.wrapping_add(gi as u64);
        let est = estimate_se(&config, &fading, 400, point_seed);
        let bound = estimate_jensen_bound(&config, &fading, 400, point_seed);
        for i in 0..5 {
            let margin =
                (bound[i] - est.per_device_se_a[i] * corruption()) / est.std_error_a[i];
            worst = worst.max(margin);
        }
    }
    CheckResult {
        name: "jensen_ordering".into(),
        pass: worst <= 3.0,
        detail: format!("largest (bound - estimate) margin {worst:.2} standard errors (limit 3)"),
    }
}

fn convergence_checks(report: &ConvergenceReport) -> Vec<CheckResult> {
    report
        .identities
        .iter()
        .map(|t| CheckResult {
            name: format!("identity_{}", t.name),
            pass: t.pass,
            detail: format!(
                "median residuals {:?} over N={:?}, log-log slope {:.3}",
                t.residual_medians, report.n_grid, t.slope
            ),
        })
        .collect()
}

/// Runs the full self-check suite.
pub fn run_validation(seed: u64) -> ValidationReport {
    let mut checks = vec![dense_equivalence(100, seed), jensen_ordering(seed ^ 0x5EED)];

    let template = SystemConfig::symmetric(256, 10, 10.0, 40.0, 0.05);
    let fading = LargeScaleFading::symmetric_unit(10);
    let report = lln_convergence_suite(&template, &fading, &[256, 1024, 4096], 120, seed);
    checks.extend(convergence_checks(&report));

    let all_pass = checks.iter().all(|c| c.pass);
    ValidationReport { checks, all_pass }
}
