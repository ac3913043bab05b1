use twrelay::montecarlo::{
    collect_sinr_samples, estimate_jensen_bound, estimate_se, jensen_bound_from_samples,
    lln_convergence_suite, se_mean_from_samples,
};
use twrelay_core::analytics::{lemma1_se, lemma1_terms, se_from_sinr};
use twrelay_core::run_trial;
use twrelay_core::{LargeScaleFading, SystemConfig};

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

#[test]
fn estimate_identical_across_worker_counts() {
    let cfg = SystemConfig::symmetric(64, 4, 10.0, 40.0, 0.1);
    let fading = LargeScaleFading::symmetric_unit(4);
    let single = pool(1).install(|| estimate_se(&cfg, &fading, 200, 7));
    let many = pool(8).install(|| estimate_se(&cfg, &fading, 200, 7));
    assert_eq!(single, many);
}

#[test]
fn trial_reruns_are_identical() {
    let cfg = SystemConfig::symmetric(32, 3, 10.0, 40.0, 0.05);
    let fading = LargeScaleFading::symmetric_unit(3);
    let a = run_trial(&cfg, &fading, 99).unwrap();
    let b = run_trial(&cfg, &fading, 99).unwrap();
    assert_eq!(a.rho2, b.rho2);
    assert_eq!(a.sinr_a(), b.sinr_a());
    assert_eq!(a.sinr_b(), b.sinr_b());
}

#[test]
fn noise_free_sinr_approaches_interference_limit() {
    // with κ = 0 and huge powers only inter-user interference remains,
    // so SINR ≈ N / C_i
    let cfg = SystemConfig::symmetric(1024, 10, 1e6, 1e6, 0.0);
    let fading = LargeScaleFading::symmetric_unit(10);
    let c = lemma1_terms(&fading, &cfg, 0).c;
    let samples = collect_sinr_samples(&cfg, &fading, 40, 11);
    let mean: f64 = samples.iter().flat_map(|s| s.a.iter()).sum::<f64>()
        / (samples.len() * 10) as f64;
    let expect = 1024.0 / c;
    assert!((mean - expect).abs() / expect < 0.10, "mean {mean}, expected {expect}");
}

#[test]
fn stderr_shrinks_like_root_n() {
    let cfg = SystemConfig::symmetric(64, 4, 10.0, 40.0, 0.1);
    let fading = LargeScaleFading::symmetric_unit(4);
    let small = estimate_se(&cfg, &fading, 800, 5);
    let large = estimate_se(&cfg, &fading, 1600, 5);
    for i in 0..4 {
        let ratio = large.std_error_a[i] / small.std_error_a[i];
        assert!((0.6..=0.82).contains(&ratio), "ratio {ratio} for device {i}");
    }
}

#[test]
fn jensen_bound_never_exceeds_estimate() {
    let fading = LargeScaleFading::symmetric_unit(4);
    for (n, kappa) in [(64usize, 0.0), (128, 0.1), (256, 0.15)] {
        let cfg = SystemConfig::symmetric(n, 4, 10.0, 40.0, kappa);
        let est = estimate_se(&cfg, &fading, 500, 13);
        let bound = estimate_jensen_bound(&cfg, &fading, 500, 13);
        for i in 0..4 {
            assert!(
                bound[i] <= est.per_device_se_a[i] + 3.0 * est.std_error_a[i],
                "bound {} above estimate {} ± {}",
                bound[i],
                est.per_device_se_a[i],
                est.std_error_a[i]
            );
        }
    }
}

#[test]
fn jensen_equals_mean_for_constant_sinr() {
    let samples = vec![vec![3.0, 7.5]; 50];
    let bound = jensen_bound_from_samples(&samples);
    let (mean, stderr) = se_mean_from_samples(&samples);
    assert!((bound[0] - mean[0]).abs() < 1e-12);
    assert!((bound[1] - se_from_sinr(7.5)).abs() < 1e-12);
    assert!(stderr.iter().all(|&s| s.abs() < 1e-12));
}

#[test]
fn jensen_converges_to_closed_form() {
    let cfg = SystemConfig::symmetric(512, 10, 10.0, 40.0, 0.05);
    let fading = LargeScaleFading::symmetric_unit(10);
    let bound = estimate_jensen_bound(&cfg, &fading, 5000, 21);
    let closed = lemma1_se(&fading, &cfg);
    for i in 0..10 {
        let rel = (bound[i] - closed[i]).abs() / closed[i];
        assert!(rel < 0.05, "device {i}: bound {} vs closed form {}", bound[i], closed[i]);
    }
}

#[test]
fn side_labels_swap_with_the_legs() {
    // closed forms: exact swap
    let fading = LargeScaleFading::new(vec![0.8, 1.3], vec![1.4, 0.6]).unwrap();
    let cfg = SystemConfig::symmetric(128, 2, 10.0, 40.0, 0.1);
    let a = lemma1_se(&fading, &cfg);
    let b_of_swapped = lemma1_se(&fading.swapped().swapped(), &cfg);
    assert_eq!(a, b_of_swapped);

    // Monte Carlo: swapping the fading swaps the A and B estimates within
    // error bars (the draws differ, the distributions do not)
    let est = estimate_se(&cfg, &fading, 1500, 31);
    let est_swapped = estimate_se(&cfg, &fading.swapped(), 1500, 32);
    for i in 0..2 {
        let gap = (est.per_device_se_a[i] - est_swapped.per_device_se_b[i]).abs();
        let sigma = (est.std_error_a[i].powi(2) + est_swapped.std_error_b[i].powi(2)).sqrt();
        assert!(gap < 4.0 * sigma, "device {i}: gap {gap} vs sigma {sigma}");
    }
}

#[test]
fn estimate_gap_to_closed_form_shrinks_with_n() {
    let fading = LargeScaleFading::symmetric_unit(10);
    let gap_at = |n: usize| {
        let cfg = SystemConfig::symmetric(n, 10, 10.0, 40.0, 0.1);
        let est = estimate_se(&cfg, &fading, 2000, 41);
        let closed = lemma1_se(&fading, &cfg)[0];
        let mean: f64 = est.per_device_se_a.iter().sum::<f64>() / 10.0;
        ((mean - closed).abs() / closed, est.std_error_a[0] / closed)
    };
    let (gap_small, noise_small) = gap_at(64);
    let (gap_large, noise_large) = gap_at(1024);
    let sigma = (noise_small.powi(2) + noise_large.powi(2)).sqrt();
    assert!(
        gap_large + 3.0 * sigma < gap_small,
        "gap at N=1024 ({gap_large}) not below gap at N=64 ({gap_small}) at 3σ ({sigma})"
    );
}

#[test]
#[should_panic(expected = "strictly increasing")]
fn convergence_grid_must_increase() {
    let cfg = SystemConfig::symmetric(64, 2, 10.0, 40.0, 0.05);
    let fading = LargeScaleFading::symmetric_unit(2);
    lln_convergence_suite(&cfg, &fading, &[64, 64, 128], 10, 1);
}

#[test]
fn convergence_residuals_decay() {
    let cfg = SystemConfig::symmetric(256, 10, 10.0, 40.0, 0.05);
    let fading = LargeScaleFading::symmetric_unit(10);
    let report = lln_convergence_suite(&cfg, &fading, &[256, 1024, 4096], 60, 3);
    assert_eq!(report.identities.len(), 7);
    for track in &report.identities {
        let first = track.residual_medians.first().unwrap();
        let last = track.residual_medians.last().unwrap();
        assert!(last < first, "{}: residual did not decay", track.name);
        assert!(track.residual_medians.iter().all(|r| *r >= 0.0));
    }
}
