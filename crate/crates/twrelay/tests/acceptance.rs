//! End-to-end acceptance checks. Each test prints one pass/fail line with
//! its pinned tolerance before asserting, so a full run reads as a short
//! checklist.

use std::fs;
use std::process::Command;

use twrelay::montecarlo::{estimate_se, lln_convergence_suite, IdentityKind};
use twrelay::sweep::run_sweep;
use twrelay::validate::{dense_equivalence, jensen_ordering};
use twrelay::ExperimentSpec;
use twrelay_core::analytics::{corollary1_limit, lemma1_se, substituted_kappa};
use twrelay_core::channel::{draw_channels, draw_distortions};
use twrelay_core::gram::{build_gram_cache, frobenius_norms, power_control_rho};
use twrelay_core::trial::{derive_trial_seed, trial_rng};
use twrelay_core::{LargeScaleFading, ScalingLaw, SystemConfig};

const SEED: u64 = 0xACCE;

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!("acceptance [{criterion}]: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

fn device_mean(est: &twrelay::SEEstimate) -> f64 {
    let k = est.per_device_se_a.len();
    est.per_device_se_a.iter().chain(&est.per_device_se_b).sum::<f64>() / (2 * k) as f64
}

fn mean_stderr(est: &twrelay::SEEstimate) -> f64 {
    // stderr of the device-averaged mean, treating devices of one trial as
    // correlated (conservative: average the per-device stderrs)
    let k = est.per_device_se_a.len();
    est.std_error_a.iter().chain(&est.std_error_b).sum::<f64>() / (2 * k) as f64
}

#[test]
fn criterion_1_closed_form_tightness() {
    let fading = LargeScaleFading::symmetric_unit(10);
    let cfg = SystemConfig::symmetric(512, 10, 10.0, 40.0, 0.1);
    let est = estimate_se(&cfg, &fading, 5000, SEED);
    let mc = device_mean(&est);
    let reference = 1.9457;
    let rel = (mc - reference).abs() / reference;

    let gap_at = |n: usize, trials: usize| {
        let cfg = SystemConfig::symmetric(n, 10, 10.0, 40.0, 0.1);
        let est = estimate_se(&cfg, &fading, trials, SEED + n as u64);
        let closed = lemma1_se(&fading, &cfg)[0];
        ((device_mean(&est) - closed).abs() / closed, mean_stderr(&est) / closed)
    };
    let (gap_small, sig_small) = gap_at(64, 2000);
    let (gap_large, sig_large) = gap_at(1024, 2000);
    let sigma = (sig_small.powi(2) + sig_large.powi(2)).sqrt();
    let shrinks = gap_large + 3.0 * sigma < gap_small;

    verdict(
        "1 closed-form tightness",
        rel < 0.05 && shrinks,
        &format!(
            "MC {mc:.4} vs {reference} ({:.2}% rel, tol 5%); gap {:.4} at N=64 → {:.4} at N=1024 (3σ = {:.4})",
            100.0 * rel,
            gap_small,
            gap_large,
            3.0 * sigma
        ),
    );
}

#[test]
fn criterion_2_ideal_hardware_baseline() {
    let fading = LargeScaleFading::symmetric_unit(10);
    let cfg = SystemConfig::symmetric(128, 10, 10.0, 40.0, 0.0);
    let mc = device_mean(&estimate_se(&cfg, &fading, 2000, SEED));
    let reference = 1.0845;
    let rel = (mc - reference).abs() / reference;
    verdict(
        "2 ideal-hardware baseline",
        rel < 0.05,
        &format!("MC {mc:.4} vs {reference} ({:.2}% rel, tol 5%)", 100.0 * rel),
    );
}

#[test]
fn criterion_3_scaling_law_regimes() {
    let mut spec = ExperimentSpec::scaling_sweep_defaults();
    spec.n_trials = 800;
    spec.master_seed = SEED;
    let rows = run_sweep(&spec);

    let curve = |z: f64| -> Vec<(usize, f64)> {
        rows.iter().filter(|r| r.z == Some(z)).map(|r| (r.n, r.sum_se)).collect()
    };

    let c075 = curve(0.75);
    let monotone = c075.windows(2).all(|w| w[1].1 > w[0].1);

    let c15 = curve(1.5);
    let (argmax_n, _) =
        c15.iter().copied().fold((0usize, f64::NEG_INFINITY), |best, (n, v)| {
            if v > best.1 {
                (n, v)
            } else {
                best
            }
        });
    let interior = argmax_n > c15.first().unwrap().0 && argmax_n < c15.last().unwrap().0;
    let in_window = (100..=600).contains(&argmax_n);

    let fading = LargeScaleFading::symmetric_unit(10);
    let kappa_z1 = spec.kappa_at(1.0, 1024);
    let cfg = SystemConfig::symmetric(1024, 10, 10.0, 40.0, kappa_z1);
    let law = ScalingLaw::new(0.05, 1.0).unwrap();
    let limit = corollary1_limit(&fading, &cfg, &law).unwrap()[0];
    let per_device = rows
        .iter()
        .find(|r| r.z == Some(1.0) && r.n == 1024)
        .map(|r| r.se_mc_mean)
        .unwrap();
    let rel = (per_device - limit).abs() / limit;

    verdict(
        "3 scaling-law regimes",
        monotone && interior && in_window && rel < 0.10,
        &format!(
            "z=0.75 monotone: {monotone}; z=1.5 argmax N={argmax_n} (interior {interior}, in [100,600] {in_window}); z=1 at N=1024: {per_device:.4} vs limit {limit:.4} ({:.2}% rel, tol 10%)",
            100.0 * rel
        ),
    );
}

#[test]
fn criterion_4_norm_expectation_oracles() {
    let fading = LargeScaleFading::symmetric_unit(10);
    let cfg = SystemConfig::symmetric(256, 10, 10.0, 40.0, 0.0);
    let trials = 2000u64;
    let (mut f2_sum, mut fa2_sum, mut rho2_sum) = (0.0, 0.0, 0.0);
    for t in 0..trials {
        let mut rng = trial_rng(derive_trial_seed(SEED, t));
        let channel = draw_channels(&cfg, &fading, &mut rng);
        let distortion = draw_distortions(&channel, &cfg, &mut rng);
        let cache = build_gram_cache(&channel);
        let (f2, fa2) = frobenius_norms(&cache);
        let rho = power_control_rho(&cache, &channel, &distortion, &cfg).unwrap();
        f2_sum += f2;
        fa2_sum += fa2;
        rho2_sum += rho * rho;
    }
    let nt = trials as f64;
    let refs = [
        ("E‖F‖²", f2_sum / nt, 1_310_720.0),
        ("E‖FA‖²", fa2_sum / nt, 256.0_f64.powi(3) * 20.0),
        ("Eρ²", rho2_sum / nt, 1.192e-8),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, got, expect) in refs {
        let rel = (got - expect).abs() / expect;
        pass &= rel < 0.05;
        details.push(format!("{name} {got:.4e} vs {expect:.4e} ({:+.2}% rel)", 100.0 * (got - expect) / expect));
    }
    verdict("4 norm expectation oracles", pass, &format!("tol 5%; {}", details.join("; ")));
}

#[test]
fn criterion_5_dense_oracle_equivalence() {
    let check = dense_equivalence(100, SEED);
    verdict("5 dense-oracle equivalence", check.pass, &check.detail);
}

#[test]
fn criterion_6_jensen_ordering() {
    let check = jensen_ordering(SEED);
    verdict("6 Jensen ordering", check.pass, &check.detail);
}

#[test]
fn criterion_7_lln_convergence_rates() {
    let template = SystemConfig::symmetric(256, 10, 10.0, 40.0, 0.05);
    let fading = LargeScaleFading::symmetric_unit(10);
    let report = lln_convergence_suite(&template, &fading, &[256, 1024, 4096], 120, SEED);
    let mut pass = true;
    let mut details = Vec::new();
    for track in report
        .identities
        .iter()
        .filter(|t| t.kind == IdentityKind::LawOfLargeNumbers)
    {
        let ok = track.slope >= -0.7 && track.slope <= -0.3;
        pass &= ok;
        details.push(format!("{} slope {:.3}", track.name, track.slope));
    }
    verdict(
        "7 LLN convergence rates",
        pass,
        &format!("band [-0.7, -0.3]; {}", details.join("; ")),
    );
}

#[test]
fn criterion_8_scaling_limit_consistency() {
    let fading = LargeScaleFading::symmetric_unit(10);
    let law = ScalingLaw::new(0.05, 0.75).unwrap();
    let n = 1usize << 16;
    let kappa = substituted_kappa(&law, n);
    let cfg = SystemConfig::symmetric(n, 10, 10.0, 40.0, kappa);
    let lemma = lemma1_se(&fading, &cfg)[0];
    let limit = corollary1_limit(&fading, &cfg, &law).unwrap()[0];
    let rel = (lemma - limit).abs() / limit;
    verdict(
        "8 scaling-limit consistency",
        rel < 0.02,
        &format!("z=0.75, N=2^16: {lemma:.4} vs {limit:.4} ({:.2}% rel, tol 2%)", 100.0 * rel),
    );
}

#[test]
fn criterion_9_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_twrelay"))
            .args(["fig1", "--seed", "17", "--threads", threads])
            .arg("--output")
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(&path).unwrap()
    };
    let a = run("1", "a.csv");
    let b = run("8", "b.csv");
    verdict(
        "9 reproducibility",
        a == b,
        &format!("fig1 CSV with --threads 1 vs 8: {} bytes each, identical {}", a.len(), a == b),
    );
}
