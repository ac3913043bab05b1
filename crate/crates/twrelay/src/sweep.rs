//! Parameter sweeps over (N, κ) or (N, z) grids and their CSV serialization.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twrelay_core::analytics::{corollary1_limit, lemma1_se};
use twrelay_core::channel::{draw_large_scale_fading, FADING_VARIANCE};
use twrelay_core::{LargeScaleFading, ScalingLaw};

use crate::experiment::{ExperimentSpec, FadingMode, ParamGrid};
use crate::montecarlo::collect_sinr_samples;

/// One (N, parameter) grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    /// Effective impairment coefficient at this point.
    pub kappa: f64,
    /// Scaling exponent, present only for scaling-law sweeps.
    pub z: Option<f64>,
    /// Mean SE per device, averaged over all 2K devices.
    pub se_mc_mean: f64,
    /// Standard error of that device-averaged mean.
    pub se_mc_stderr: f64,
    /// Closed-form approximation, averaged over devices; absent when
    /// analytics are disabled.
    pub se_lemma1: Option<f64>,
    /// Scaling-law limit per device, present for z ≤ 1 only.
    pub se_corollary: Option<f64>,
    /// Sum SE over all 2K devices.
    pub sum_se: f64,
}

pub const CSV_HEADER: &str = "N,kappa,z,se_mc_mean,se_mc_stderr,se_lemma1,se_corollary,sum_se";

fn fading_for(spec: &ExperimentSpec) -> LargeScaleFading {
    match spec.fading {
        FadingMode::FixedSymmetric => LargeScaleFading::symmetric_unit(spec.n_pairs),
        FadingMode::Drawn { fading_seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(fading_seed);
            draw_large_scale_fading(spec.n_pairs, FADING_VARIANCE, &mut rng)
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Runs the full grid. Trial seeds depend only on (master_seed, grid point,
/// trial index), so the rows are reproducible for any worker count.
pub fn run_sweep(spec: &ExperimentSpec) -> Vec<SweepRow> {
    let fading = fading_for(spec);
    let fading_b = fading.swapped();
    let mut rows = Vec::new();
    for (pi, &param) in spec.param_values().iter().enumerate() {
        for (ni, &n) in spec.n_grid.iter().enumerate() {
            let kappa = spec.kappa_at(param, n);
            let config = spec.system_config(n, kappa);
            // decorrelate grid points deterministically
            let point_seed = spec
                .master_seed
                .wrapping_add(((pi as u64) << 40) | ((ni as u64) << 20));
            let samples = collect_sinr_samples(&config, &fading, spec.n_trials, point_seed);
            // device-averaged SE per trial; its spread gives the stderr of
            // the plotted mean
            let per_trial_se: Vec<Vec<f64>> = samples
                .iter()
                .map(|s| {
                    let se: f64 = s
                        .a
                        .iter()
                        .chain(&s.b)
                        .map(|&x| twrelay_core::analytics::se_from_sinr(x))
                        .sum();
                    vec![se / (s.a.len() + s.b.len()) as f64]
                })
                .collect();
            let (m, se) = se_mean_from_raw(&per_trial_se);
            let n_devices = 2 * spec.n_pairs;
            let (z, se_corollary) = match &spec.grid {
                ParamGrid::Kappa(_) => (None, None),
                ParamGrid::ScalingLaws { kappa0, .. } => {
                    let law = ScalingLaw::new(*kappa0, param).expect("grid was validated");
                    let limit = corollary1_limit(&fading, &config, &law)
                        .ok()
                        .map(|v| mean(&v));
                    (Some(param), limit)
                }
            };
            let se_lemma1 = spec.emit_analytics.then(|| {
                0.5 * (mean(&lemma1_se(&fading, &config)) + mean(&lemma1_se(&fading_b, &config)))
            });
            rows.push(SweepRow {
                n,
                kappa,
                z,
                se_mc_mean: m,
                se_mc_stderr: se,
                se_lemma1,
                se_corollary,
                sum_se: m * n_devices as f64,
            });
        }
    }
    rows
}

fn se_mean_from_raw(per_trial: &[Vec<f64>]) -> (f64, f64) {
    let n = per_trial.len() as f64;
    let mean = per_trial.iter().map(|t| t[0]).sum::<f64>() / n;
    let var = per_trial.iter().map(|t| (t[0] - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the rows with a fixed column order. Floats use the shortest
/// round-trip representation so emitted files parse back exactly.
pub fn write_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.kappa,
            opt(r.z),
            r.se_mc_mean,
            r.se_mc_stderr,
            opt(r.se_lemma1),
            opt(r.se_corollary),
            r.sum_se
        )?;
    }
    Ok(())
}
