//! Closed-form large-scale SE approximation, scaling-law limits and
//! asymptotic norm expectations.
//!
//! Everything here is a deterministic function of the large-scale fading
//! profile and the scalar system parameters; no channel draws are involved.
//! The analysis regime assumes a single impairment coefficient, so
//! operations reject configs with `kappa_r != kappa_t`.

use alloc::vec::Vec;

use crate::channel::LargeScaleFading;
use crate::config::SystemConfig;

fn log2(x: f64) -> f64 {
    libm::log2(x)
}

/// Half pre-log of two-way relaying: each direction uses half the channel
/// uses. Applied to both the closed forms and the Monte Carlo estimates so
/// the two share one convention.
pub fn se_from_sinr(sinr: f64) -> f64 {
    0.5 * log2(1.0 + sinr)
}

/// The five denominator terms of the large-scale SINR approximation plus
/// the shared constant J, for one device index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTerms {
    /// Inter-user interference C_i.
    pub c: f64,
    /// Relay-noise term D_i.
    pub d: f64,
    /// Device-noise term E_i.
    pub e: f64,
    /// Receiver-distortion term F_i.
    pub f: f64,
    /// Transmit-distortion term G_i.
    pub g: f64,
    /// J, shared by E_i and F_i.
    pub j_value: f64,
}

impl ClosedFormTerms {
    pub fn denominator(&self) -> f64 {
        self.c + self.d + self.e + self.f + self.g
    }
}

fn require_single_kappa(config: &SystemConfig) -> f64 {
    config
        .merged_kappa()
        .expect("closed-form analysis requires kappa_r == kappa_t")
}

/// J = Σ_j σ²_g σ²_h (σ²_g + σ²_h) + (2κ²/N) (Σ_j σ²_g σ²_h)(Σ_j (σ²_g + σ²_h)).
fn j_value(fading: &LargeScaleFading, kappa: f64, n_antennas: usize) -> f64 {
    let k = fading.n_pairs();
    let mut j0 = 0.0;
    let mut sum_gh = 0.0;
    let mut sum_g_plus_h = 0.0;
    for j in 0..k {
        let (g, h) = (fading.sigma2_g[j], fading.sigma2_h[j]);
        j0 += g * h * (g + h);
        sum_gh += g * h;
        sum_g_plus_h += g + h;
    }
    j0 + 2.0 * kappa * kappa / n_antennas as f64 * sum_gh * sum_g_plus_h
}

/// Large-scale approximation terms for device pair `i`.
pub fn lemma1_terms(fading: &LargeScaleFading, config: &SystemConfig, i: usize) -> ClosedFormTerms {
    let kappa = require_single_kappa(config);
    let kappa2 = kappa * kappa;
    let k = fading.n_pairs();
    assert!(i < k, "pair index out of range");
    let (gi, hi) = (fading.sigma2_g[i], fading.sigma2_h[i]);

    let mut c = 0.0;
    let mut sum_g_plus_h = 0.0;
    for j in 0..k {
        let (gj, hj) = (fading.sigma2_g[j], fading.sigma2_h[j]);
        sum_g_plus_h += gj + hj;
        if j != i {
            c += hj / hi + hj * hj * gj / (hi * hi * gi) + gj / hi + gj * gj * hj / (hi * hi * gi);
        }
    }
    let j_val = j_value(fading, kappa, config.n_antennas);
    ClosedFormTerms {
        c,
        d: config.noise_relay / (config.p_user * hi),
        e: config.noise_a[i] * j_val / (config.p_relay * gi * gi * hi * hi),
        f: kappa2 * j_val / (gi * hi * hi),
        g: kappa2 / hi * sum_g_plus_h,
        j_value: j_val,
    }
}

/// A-side per-device SE of the large-scale approximation,
/// ½ log₂(1 + N / (C_i + D_i + E_i + F_i + G_i)). The B side follows by
/// swapping the fading legs and noise vectors.
pub fn lemma1_se(fading: &LargeScaleFading, config: &SystemConfig) -> Vec<f64> {
    let n = config.n_antennas as f64;
    (0..fading.n_pairs())
        .map(|i| {
            let terms = lemma1_terms(fading, config, i);
            0.5 * log2(1.0 + n / terms.denominator())
        })
        .collect()
}

/// Hardware scaling law κ² = κ₀² N^z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLaw {
    pub kappa0: f64,
    pub z: f64,
}

impl ScalingLaw {
    pub fn new(kappa0: f64, z: f64) -> Result<Self, &'static str> {
        if !(kappa0 > 0.0) {
            return Err("kappa0 must be > 0");
        }
        if !(z > 0.0) {
            return Err("scaling exponent z must be > 0");
        }
        Ok(Self { kappa0, z })
    }
}

/// κ(N) = κ₀ N^(z/2). Any z > 0 is accepted, including law-violating
/// exponents used to demonstrate SE collapse.
pub fn substituted_kappa(law: &ScalingLaw, n_antennas: usize) -> f64 {
    law.kappa0 * libm::pow(n_antennas as f64, law.z / 2.0)
}

/// Fading aggregates μ₀, μ₁, μ₂ of the scaling-law limit.
fn mu_values(fading: &LargeScaleFading) -> (f64, f64, f64) {
    let mut mu0 = 0.0;
    let mut mu1 = 0.0;
    let mut sum_gh = 0.0;
    for j in 0..fading.n_pairs() {
        let (g, h) = (fading.sigma2_g[j], fading.sigma2_h[j]);
        mu0 += g + h;
        mu1 += g * h * (g + h);
        sum_gh += g * h;
    }
    (mu0, mu1, sum_gh * mu0)
}

/// Asymptotic per-device SE under the scaling law, valid for 0 < z ≤ 1.
pub fn corollary1_limit(
    fading: &LargeScaleFading,
    config: &SystemConfig,
    law: &ScalingLaw,
) -> Result<Vec<f64>, &'static str> {
    if !(law.z > 0.0 && law.z <= 1.0) {
        return Err("corollary limit only covers 0 < z <= 1");
    }
    let (mu0, mu1, mu2) = mu_values(fading);
    let k0sq = law.kappa0 * law.kappa0;
    let n = config.n_antennas as f64;
    Ok((0..fading.n_pairs())
        .map(|i| {
            let (g, h) = (fading.sigma2_g[i], fading.sigma2_h[i]);
            let sinr = if law.z < 1.0 {
                g * h * h * libm::pow(n, 1.0 - law.z) / (k0sq * (mu0 * g * h + mu1))
            } else {
                g * h * h / (k0sq * (mu0 * g * h + mu1 + 2.0 * k0sq * mu2))
            };
            se_from_sinr(sinr)
        })
        .collect())
}

/// Asymptotic expectations (E‖F‖², E‖FA‖², Eρ²) of the norm and power
/// normalization statistics.
pub fn appendix_expectations(fading: &LargeScaleFading, config: &SystemConfig) -> (f64, f64, f64) {
    let kappa = require_single_kappa(config);
    let n = config.n_antennas as f64;
    let mut sum_gh = 0.0;
    let mut mu1 = 0.0;
    for j in 0..fading.n_pairs() {
        let (g, h) = (fading.sigma2_g[j], fading.sigma2_h[j]);
        sum_gh += g * h;
        mu1 += g * h * (g + h);
    }
    let e_f2 = 2.0 * n * n * sum_gh;
    let e_fa2 = n * n * n * mu1;
    let j_val = j_value(fading, kappa, config.n_antennas);
    let e_rho2 = config.p_relay / (config.p_user * n * n * n * j_val);
    (e_f2, e_fa2, e_rho2)
}

/// Antenna count with equivalent SE when swapping hardware quality under
/// the z = 1 law: N scales with EVM².
pub fn evm_tradeoff(reference_evm: f64, replacement_evm: f64, reference_n: f64) -> f64 {
    assert!(reference_evm > 0.0 && replacement_evm > 0.0, "EVMs must be positive");
    let ratio = replacement_evm / reference_evm;
    reference_n * ratio * ratio
}
