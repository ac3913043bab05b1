//! Large-scale fading, channel and distortion draws.
//!
//! Channel columns are circularly-symmetric complex Gaussian with per-pair
//! variance taken from the large-scale fading coefficients; the variance is
//! split evenly between real and imaginary parts. All draws are pure
//! functions of the supplied random source.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{DistortionMode, SystemConfig};
use crate::C64;

/// Mean of the large-scale fading distribution.
pub const FADING_MEAN: f64 = 1.0;
/// Variance of the large-scale fading distribution. The source model states
/// N(1, 0.2) without saying whether 0.2 is a variance or a standard
/// deviation; it is treated as a variance here.
pub const FADING_VARIANCE: f64 = 0.2;

/// Per-pair variances of the two channel legs.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleFading {
    /// σ²_{g_i}, one per pair.
    pub sigma2_g: Vec<f64>,
    /// σ²_{h_i}, one per pair.
    pub sigma2_h: Vec<f64>,
}

impl LargeScaleFading {
    /// Builds a fading profile, rejecting non-positive entries.
    pub fn new(sigma2_g: Vec<f64>, sigma2_h: Vec<f64>) -> Result<Self, &'static str> {
        if sigma2_g.len() != sigma2_h.len() {
            return Err("sigma2_g and sigma2_h must have equal length");
        }
        if sigma2_g.is_empty() {
            return Err("fading vectors must be non-empty");
        }
        if sigma2_g.iter().chain(sigma2_h.iter()).any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err("all fading variances must be finite and > 0");
        }
        Ok(Self { sigma2_g, sigma2_h })
    }

    /// Test hook: accepts zero entries (used to exercise zero-variance
    /// channel columns).
    pub fn new_unchecked(sigma2_g: Vec<f64>, sigma2_h: Vec<f64>) -> Self {
        Self { sigma2_g, sigma2_h }
    }

    /// All coefficients equal to one.
    pub fn symmetric_unit(n_pairs: usize) -> Self {
        Self {
            sigma2_g: vec![1.0; n_pairs],
            sigma2_h: vec![1.0; n_pairs],
        }
    }

    pub fn n_pairs(&self) -> usize {
        self.sigma2_g.len()
    }

    /// Fading with the two legs exchanged; swaps the A and B sides at the
    /// distribution level.
    pub fn swapped(&self) -> Self {
        Self {
            sigma2_g: self.sigma2_h.clone(),
            sigma2_h: self.sigma2_g.clone(),
        }
    }
}

/// Draws per-pair fading coefficients from the real Gaussian
/// N(`FADING_MEAN`, `variance`), resampling until strictly positive.
pub fn draw_large_scale_fading<R: Rng + ?Sized>(n_pairs: usize, variance: f64, rng: &mut R) -> LargeScaleFading {
    assert!(n_pairs >= 1, "need at least one pair");
    assert!(variance >= 0.0, "variance must be non-negative");
    let std = libm::sqrt(variance);
    let draw = |rng: &mut R| loop {
        let x: f64 = rng.sample::<f64, _>(StandardNormal) * std + FADING_MEAN;
        if x > 0.0 {
            return x;
        }
    };
    let sigma2_g = (0..n_pairs).map(|_| draw(rng)).collect();
    let sigma2_h = (0..n_pairs).map(|_| draw(rng)).collect();
    LargeScaleFading { sigma2_g, sigma2_h }
}

/// One coherence-block draw of the uplink channels G (devices A) and H
/// (devices B), stored column-major as N×K complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub n_antennas: usize,
    pub n_pairs: usize,
    g: Vec<C64>,
    h: Vec<C64>,
}

impl ChannelRealization {
    pub fn from_columns(n_antennas: usize, g: Vec<C64>, h: Vec<C64>) -> Self {
        assert_eq!(g.len(), h.len());
        assert_eq!(g.len() % n_antennas, 0);
        let n_pairs = g.len() / n_antennas;
        Self { n_antennas, n_pairs, g, h }
    }

    /// Column g_i.
    pub fn g_col(&self, i: usize) -> &[C64] {
        &self.g[i * self.n_antennas..(i + 1) * self.n_antennas]
    }

    /// Column h_i.
    pub fn h_col(&self, i: usize) -> &[C64] {
        &self.h[i * self.n_antennas..(i + 1) * self.n_antennas]
    }

    pub fn g_data(&self) -> &[C64] {
        &self.g
    }

    pub fn h_data(&self) -> &[C64] {
        &self.h
    }

    /// Gᴴx for an N-vector x; output has length K.
    pub fn g_adjoint_apply(&self, x: &[C64]) -> Vec<C64> {
        adjoint_apply(&self.g, self.n_antennas, self.n_pairs, x)
    }

    /// Hᴴx for an N-vector x; output has length K.
    pub fn h_adjoint_apply(&self, x: &[C64]) -> Vec<C64> {
        adjoint_apply(&self.h, self.n_antennas, self.n_pairs, x)
    }
}

fn adjoint_apply(cols: &[C64], n: usize, k: usize, x: &[C64]) -> Vec<C64> {
    assert_eq!(x.len(), n, "dimension mismatch");
    (0..k)
        .map(|j| {
            let col = &cols[j * n..(j + 1) * n];
            col.iter().zip(x).map(|(c, xv)| c.conj() * xv).sum()
        })
        .collect()
}

fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    // CN(0,1): each part has variance 1/2.
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re * core::f64::consts::FRAC_1_SQRT_2, im * core::f64::consts::FRAC_1_SQRT_2)
}

/// Draws one channel realization.
pub fn draw_channels<R: Rng + ?Sized>(config: &SystemConfig, fading: &LargeScaleFading, rng: &mut R) -> ChannelRealization {
    let n = config.n_antennas;
    let k = config.n_pairs;
    assert_eq!(fading.n_pairs(), k, "fading length must match n_pairs");
    let draw_leg = |sigma2: &[f64], rng: &mut R| {
        let mut data = Vec::with_capacity(n * k);
        for &s2 in sigma2 {
            let scale = libm::sqrt(s2);
            for _ in 0..n {
                data.push(standard_complex(rng) * scale);
            }
        }
        data
    };
    let g = draw_leg(&fading.sigma2_g, rng);
    let h = draw_leg(&fading.sigma2_h, rng);
    ChannelRealization::from_columns(n, g, h)
}

/// Per-antenna conditional variances of the receiver distortion:
/// entry n equals κ_r² P_U W_nn with W_nn = Σ_j (|H[n,j]|² + |G[n,j]|²).
pub fn receiver_distortion_variances(channel: &ChannelRealization, config: &SystemConfig) -> Vec<f64> {
    let n = channel.n_antennas;
    let scale = config.kappa_r * config.kappa_r * config.p_user;
    let mut w = vec![0.0f64; n];
    for j in 0..channel.n_pairs {
        for (wn, (g, h)) in w.iter_mut().zip(channel.g_col(j).iter().zip(channel.h_col(j))) {
            *wn += g.norm_sqr() + h.norm_sqr();
        }
    }
    for wn in &mut w {
        *wn *= scale;
    }
    w
}

/// One draw (or conditional description) of the transceiver distortion.
#[derive(Debug, Clone, PartialEq)]
pub enum DistortionRealization {
    /// Explicit distortion vectors η_r, η_t, each of length N.
    Realization { eta_r: Vec<C64>, eta_t: Vec<C64> },
    /// Conditional variances given the channel: per-antenna receiver
    /// variances and the scalar transmit variance κ_t² P_R / N.
    ConditionalExpectation { var_r: Vec<f64>, var_t: f64 },
}

impl DistortionRealization {
    pub fn mode(&self) -> DistortionMode {
        match self {
            Self::Realization { .. } => DistortionMode::Realization,
            Self::ConditionalExpectation { .. } => DistortionMode::ConditionalExpectation,
        }
    }
}

/// Draws the distortion consistent with `config.distortion_mode`.
pub fn draw_distortions<R: Rng + ?Sized>(
    channel: &ChannelRealization,
    config: &SystemConfig,
    rng: &mut R,
) -> DistortionRealization {
    let var_r = receiver_distortion_variances(channel, config);
    let var_t = config.kappa_t * config.kappa_t * config.p_relay / channel.n_antennas as f64;
    match config.distortion_mode {
        DistortionMode::ConditionalExpectation => DistortionRealization::ConditionalExpectation { var_r, var_t },
        DistortionMode::Realization => {
            let t_scale = libm::sqrt(var_t);
            let eta_r = var_r.iter().map(|&v| standard_complex(rng) * libm::sqrt(v)).collect();
            let eta_t = (0..channel.n_antennas).map(|_| standard_complex(rng) * t_scale).collect();
            DistortionRealization::Realization { eta_r, eta_t }
        }
    }
}
