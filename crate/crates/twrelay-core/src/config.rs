//! System parameters and their validation.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

/// How distortion terms enter per-trial quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistortionMode {
    /// Draw explicit distortion vectors and use them literally.
    #[default]
    Realization,
    /// Replace squared distortion terms by their conditional expectation
    /// given the channel (variance reduction; never changes the mean).
    ConditionalExpectation,
}

/// All scalar model parameters of one simulated system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of relay antennas N.
    pub n_antennas: usize,
    /// Number of device pairs K.
    pub n_pairs: usize,
    /// Per-device transmit power P_U (linear).
    pub p_user: f64,
    /// Relay transmit power P_R (linear).
    pub p_relay: f64,
    /// Relay noise variance σ²_R.
    pub noise_relay: f64,
    /// Device noise variances σ²_{A_i}, length K.
    pub noise_a: Vec<f64>,
    /// Device noise variances σ²_{B_i}, length K.
    pub noise_b: Vec<f64>,
    /// Receiver impairment coefficient κ_r (EVM).
    pub kappa_r: f64,
    /// Transmit impairment coefficient κ_t (EVM).
    pub kappa_t: f64,
    pub distortion_mode: DistortionMode,
}

impl SystemConfig {
    /// Configuration with unit noise everywhere and a single impairment
    /// level κ on both sides.
    pub fn symmetric(n_antennas: usize, n_pairs: usize, p_user: f64, p_relay: f64, kappa: f64) -> Self {
        Self {
            n_antennas,
            n_pairs,
            p_user,
            p_relay,
            noise_relay: 1.0,
            noise_a: vec![1.0; n_pairs],
            noise_b: vec![1.0; n_pairs],
            kappa_r: kappa,
            kappa_t: kappa,
            distortion_mode: DistortionMode::Realization,
        }
    }

    /// Single κ shared by both transceiver sides, if the config has one.
    pub fn merged_kappa(&self) -> Option<f64> {
        (self.kappa_r == self.kappa_t).then_some(self.kappa_r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Name of the offending field.
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    fn new(field: &'static str, message: String) -> Self {
        Self { field, message }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl core::error::Error for ConfigError {}

/// Checks every model invariant and returns the config unchanged.
pub fn validate_config(config: SystemConfig) -> Result<SystemConfig, ConfigError> {
    if config.n_pairs == 0 {
        return Err(ConfigError::new("n_pairs", String::from("no device pairs (K = 0)")));
    }
    if config.n_antennas == 0 {
        return Err(ConfigError::new("n_antennas", String::from("no relay antennas (N = 0)")));
    }
    if config.n_pairs > config.n_antennas {
        return Err(ConfigError::new(
            "n_pairs",
            format!("K = {} exceeds N = {}", config.n_pairs, config.n_antennas),
        ));
    }
    check_positive("p_user", config.p_user)?;
    check_positive("p_relay", config.p_relay)?;
    check_positive("noise_relay", config.noise_relay)?;
    check_noise_vec("noise_a", &config.noise_a, config.n_pairs)?;
    check_noise_vec("noise_b", &config.noise_b, config.n_pairs)?;
    check_kappa("kappa_r", config.kappa_r)?;
    check_kappa("kappa_t", config.kappa_t)?;
    Ok(config)
}

fn check_positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(ConfigError::new(field, format!("must be finite and > 0, got {value}")));
    }
    Ok(())
}

fn check_kappa(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(ConfigError::new(field, format!("must be finite and >= 0, got {value}")));
    }
    Ok(())
}

fn check_noise_vec(field: &'static str, values: &[f64], k: usize) -> Result<(), ConfigError> {
    if values.len() != k {
        return Err(ConfigError::new(
            field,
            format!("expected {} entries (one per pair), got {}", k, values.len()),
        ));
    }
    for (i, &v) in values.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(ConfigError::new(field, format!("entry {i} must be finite and > 0, got {v}")));
        }
    }
    Ok(())
}
