//! Seeded, scheduling-independent Monte Carlo estimation.
//!
//! Every trial's random stream is a pure function of `(master_seed, trial
//! index)`, trials are embarrassingly parallel, and aggregation walks the
//! results in trial-index order, so the numbers are bit-identical for any
//! worker count.

use rayon::prelude::*;
use serde::Serialize;

use twrelay_core::analytics::{appendix_expectations, se_from_sinr};
use twrelay_core::channel::{draw_channels, draw_distortions};
use twrelay_core::gram::{
    bilinear_form, build_gram_cache, frobenius_norms, power_control_rho, precoder_row_norm,
};
use twrelay_core::trial::{derive_trial_seed, run_trial, trial_rng};
use twrelay_core::{DistortionMode, LargeScaleFading, Leg, SystemConfig};

/// Per-device SINR samples of one trial, A side then B side.
#[derive(Debug, Clone)]
pub struct SinrSample {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Runs `n_trials` independent trials and returns their SINR samples in
/// trial-index order. Shared by the direct SE estimator and the Jensen
/// bound so both see the same draws for the same seed.
pub fn collect_sinr_samples(
    config: &SystemConfig,
    fading: &LargeScaleFading,
    n_trials: usize,
    master_seed: u64,
) -> Vec<SinrSample> {
    (0..n_trials as u64)
        .into_par_iter()
        .map(|idx| {
            let seed = derive_trial_seed(master_seed, idx);
            let result = run_trial(config, fading, seed)
                .expect("continuous channel draw cannot be degenerate");
            SinrSample { a: result.sinr_a(), b: result.sinr_b() }
        })
        .collect()
}

/// Monte Carlo SE estimate with per-device standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SEEstimate {
    pub per_device_se_a: Vec<f64>,
    pub per_device_se_b: Vec<f64>,
    pub std_error_a: Vec<f64>,
    pub std_error_b: Vec<f64>,
    /// Σ over all 2K devices of the mean SE.
    pub sum_se: f64,
    pub n_trials: usize,
    pub master_seed: u64,
    pub distortion_mode: DistortionMode,
    /// False when fading came from the fixed symmetric profile.
    pub fading_drawn: bool,
}

fn mean_and_stderr(samples_per_trial: &[Vec<f64>], device: usize) -> (f64, f64) {
    let n = samples_per_trial.len() as f64;
    let mean = samples_per_trial.iter().map(|t| t[device]).sum::<f64>() / n;
    let var = samples_per_trial.iter().map(|t| (t[device] - mean).powi(2)).sum::<f64>()
        / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean of ½log₂(1+SINR) per device over precomputed samples. Exposed so
/// degenerate sample sets can be fed directly in tests.
pub fn se_mean_from_samples(samples: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let k = samples[0].len();
    let per_trial: Vec<Vec<f64>> = samples
        .iter()
        .map(|t| t.iter().map(|&s| se_from_sinr(s)).collect())
        .collect();
    (0..k).map(|i| mean_and_stderr(&per_trial, i)).unzip()
}

/// ½log₂(1 + 1/mean(SINR⁻¹)) per device over precomputed samples.
pub fn jensen_bound_from_samples(samples: &[Vec<f64>]) -> Vec<f64> {
    let k = samples[0].len();
    let n = samples.len() as f64;
    (0..k)
        .map(|i| {
            let mean_inv = samples.iter().map(|t| 1.0 / t[i]).sum::<f64>() / n;
            se_from_sinr(1.0 / mean_inv)
        })
        .collect()
}

/// Direct SE estimate: per-device mean of ½log₂(1+SINR) over `n_trials`
/// seeded trials, with sample standard errors.
pub fn estimate_se(
    config: &SystemConfig,
    fading: &LargeScaleFading,
    n_trials: usize,
    master_seed: u64,
) -> SEEstimate {
    assert!(n_trials >= 2, "need at least two trials for a standard error");
    let samples = collect_sinr_samples(config, fading, n_trials, master_seed);
    let a_samples: Vec<Vec<f64>> = samples.iter().map(|s| s.a.clone()).collect();
    let b_samples: Vec<Vec<f64>> = samples.iter().map(|s| s.b.clone()).collect();
    let (per_device_se_a, std_error_a) = se_mean_from_samples(&a_samples);
    let (per_device_se_b, std_error_b) = se_mean_from_samples(&b_samples);
    let sum_se = per_device_se_a.iter().chain(&per_device_se_b).sum();
    SEEstimate {
        per_device_se_a,
        per_device_se_b,
        std_error_a,
        std_error_b,
        sum_se,
        n_trials,
        master_seed,
        distortion_mode: config.distortion_mode,
        fading_drawn: false,
    }
}

/// Jensen lower bound on the A-side SE, from the same trial stream as
/// [`estimate_se`] when given the same seed.
pub fn estimate_jensen_bound(
    config: &SystemConfig,
    fading: &LargeScaleFading,
    n_trials: usize,
    master_seed: u64,
) -> Vec<f64> {
    assert!(n_trials >= 2, "need at least two trials");
    let samples = collect_sinr_samples(config, fading, n_trials, master_seed);
    let a_samples: Vec<Vec<f64>> = samples.iter().map(|s| s.a.clone()).collect();
    jensen_bound_from_samples(&a_samples)
}

/// How an identity's pass flag is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdentityKind {
    /// Sample-level concentration; residuals shrink at the CLT rate √N, so
    /// the fitted log-log slope must sit near −1/2.
    LawOfLargeNumbers,
    /// Comparison of a sample mean against its asymptotic expectation; the
    /// finite-N bias decays like 1/N and dominates the fluctuation, so only
    /// monotone decay of the residual is asserted.
    Expectation,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityTrack {
    pub name: &'static str,
    pub kind: IdentityKind,
    /// Median absolute relative residual at each grid N.
    pub residual_medians: Vec<f64>,
    /// Least-squares slope of log(residual) against log(N).
    pub slope: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub n_grid: Vec<usize>,
    pub trials_per_n: usize,
    pub identities: Vec<IdentityTrack>,
}

impl ConvergenceReport {
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|t| t.pass)
    }
}

/// Slope band accepted as "rate N^(−1/2)" for the concentration identities.
pub const LLN_SLOPE_BAND: (f64, f64) = (-0.7, -0.3);

const N_IDENTITIES: usize = 7;

pub const IDENTITY_NAMES: [&str; N_IDENTITIES] = [
    "bilinear_diag_gfh",
    "bilinear_cross_gfh",
    "bilinear_cross_gfg",
    "precoded_row_norm",
    "precoder_frobenius_norm",
    "precoded_channel_norm",
    "power_normalization",
];

const IDENTITY_KINDS: [IdentityKind; N_IDENTITIES] = [
    IdentityKind::LawOfLargeNumbers,
    IdentityKind::LawOfLargeNumbers,
    IdentityKind::LawOfLargeNumbers,
    IdentityKind::LawOfLargeNumbers,
    IdentityKind::Expectation,
    IdentityKind::Expectation,
    IdentityKind::Expectation,
];

fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>();
    let var = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    cov / var
}

/// Per-trial residuals of the seven norm/concentration identities behind
/// the large-scale approximation, at one antenna count.
fn trial_residuals(
    config: &SystemConfig,
    fading: &LargeScaleFading,
    trial_seed: u64,
) -> [Vec<f64>; N_IDENTITIES] {
    let mut rng = trial_rng(trial_seed);
    let channel = draw_channels(config, fading, &mut rng);
    let distortion = draw_distortions(&channel, config, &mut rng);
    let cache = build_gram_cache(&channel);
    let n = config.n_antennas as f64;
    let k = config.n_pairs;

    let mut out: [Vec<f64>; N_IDENTITIES] = Default::default();

    // concentration of the quadratic forms around their deterministic
    // large-N limits, normalized by the limit of the diagonal form
    for i in 0..k {
        let (sg, sh) = (fading.sigma2_g[i], fading.sigma2_h[i]);
        let scale = sg * sh;
        let diag = bilinear_form(&cache, i, i, Leg::G, Leg::H);
        out[0].push((diag.norm() / (n * n) - scale).abs() / scale);

        let row = precoder_row_norm(&cache, i, Leg::G);
        let row_limit = sg * sg * sh;
        out[3].push((row / (n * n * n) - row_limit).abs() / row_limit);

        for j in 0..k {
            if j == i {
                continue;
            }
            let cross_gh = bilinear_form(&cache, i, j, Leg::G, Leg::H);
            out[1].push(cross_gh.norm() / (n * n) / scale);
            let cross_gg = bilinear_form(&cache, i, j, Leg::G, Leg::G);
            out[2].push(cross_gg.norm() / (n * n) / scale);
        }
    }

    // norm statistics against their asymptotic expectations
    let (e_f2, e_fa2, e_rho2) = appendix_expectations(fading, config);
    let (f2, fa2) = frobenius_norms(&cache);
    let rho = power_control_rho(&cache, &channel, &distortion, config)
        .expect("continuous channel draw cannot be degenerate");
    out[4].push((f2 - e_f2).abs() / e_f2);
    out[5].push((fa2 - e_fa2).abs() / e_fa2);
    out[6].push((rho * rho - e_rho2).abs() / e_rho2);
    out
}

/// Runs the convergence suite over an increasing antenna grid and fits the
/// decay rate of each identity's median residual.
pub fn lln_convergence_suite(
    template: &SystemConfig,
    fading: &LargeScaleFading,
    n_grid: &[usize],
    trials_per_n: usize,
    master_seed: u64,
) -> ConvergenceReport {
    assert!(n_grid.len() >= 3, "need at least three grid points to fit a rate");
    assert!(n_grid.windows(2).all(|w| w[0] < w[1]), "antenna grid must be strictly increasing");

    let mut medians = vec![Vec::new(); N_IDENTITIES];
    for (grid_pos, &n) in n_grid.iter().enumerate() {
        let mut config = template.clone();
        config.n_antennas = n;
        let pooled: Vec<[Vec<f64>; N_IDENTITIES]> = (0..trials_per_n as u64)
            .into_par_iter()
            .map(|idx| {
                // decorrelate grid points without depending on trial order
                let seed = derive_trial_seed(master_seed ^ ((grid_pos as u64) << 32), idx);
                trial_residuals(&config, fading, seed)
            })
            .collect();
        for ident in 0..N_IDENTITIES {
            let mut all: Vec<f64> =
                pooled.iter().flat_map(|r| r[ident].iter().copied()).collect();
            medians[ident].push(median(&mut all));
        }
    }

    let log_n: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let identities = (0..N_IDENTITIES)
        .map(|ident| {
            let res = &medians[ident];
            let log_r: Vec<f64> = res.iter().map(|r| r.ln()).collect();
            let slope = least_squares_slope(&log_n, &log_r);
            let kind = IDENTITY_KINDS[ident];
            let pass = match kind {
                IdentityKind::LawOfLargeNumbers => {
                    slope >= LLN_SLOPE_BAND.0 && slope <= LLN_SLOPE_BAND.1
                }
                IdentityKind::Expectation => res.windows(2).all(|w| w[1] < w[0]),
            };
            IdentityTrack {
                name: IDENTITY_NAMES[ident],
                kind,
                residual_medians: res.clone(),
                slope,
                pass,
            }
        })
        .collect();

    ConvergenceReport { n_grid: n_grid.to_vec(), trials_per_n, identities }
}
