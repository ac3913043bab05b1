//! Experiment description: flat `key = value` config files plus defaults.

use std::fmt;
use std::fs;
use std::path::Path;

use twrelay_core::{DistortionMode, ScalingLaw, SystemConfig};

/// Where the large-scale fading coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingMode {
    /// All σ² = 1: deterministic, used for acceptance baselines.
    FixedSymmetric,
    /// σ² drawn from a truncated N(1, 0.2) with a recorded seed.
    Drawn { fading_seed: u64 },
}

/// The parameter axis swept alongside the antenna grid.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamGrid {
    Kappa(Vec<f64>),
    ScalingLaws { kappa0: f64, z_values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub n_grid: Vec<usize>,
    pub grid: ParamGrid,
    pub n_pairs: usize,
    pub p_user: f64,
    pub p_relay: f64,
    pub noise_relay: f64,
    pub noise_device: f64,
    pub n_trials: usize,
    pub master_seed: u64,
    pub fading: FadingMode,
    pub distortion_mode: DistortionMode,
    pub emit_analytics: bool,
}

pub const DEFAULT_FIG1_N_GRID: [usize; 6] = [64, 128, 192, 256, 384, 512];
pub const DEFAULT_FIG1_KAPPAS: [f64; 4] = [0.0, 0.05, 0.1, 0.15];
pub const DEFAULT_FIG2_N_GRID: [usize; 8] = [64, 128, 192, 256, 384, 512, 768, 1024];
pub const DEFAULT_FIG2_ZS: [f64; 4] = [0.5, 0.75, 1.0, 1.5];
pub const DEFAULT_KAPPA0: f64 = 0.05;
pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_SEED: u64 = 20260826;

impl ExperimentSpec {
    /// Fig. 1-style defaults: κ sweep, P_U = 10, P_R = 40, K = 10, unit
    /// noise, fixed symmetric fading.
    pub fn kappa_sweep_defaults() -> Self {
        Self {
            n_grid: DEFAULT_FIG1_N_GRID.to_vec(),
            grid: ParamGrid::Kappa(DEFAULT_FIG1_KAPPAS.to_vec()),
            n_pairs: 10,
            p_user: 10.0,
            p_relay: 40.0,
            noise_relay: 1.0,
            noise_device: 1.0,
            n_trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            fading: FadingMode::FixedSymmetric,
            distortion_mode: DistortionMode::Realization,
            emit_analytics: true,
        }
    }

    /// Fig. 2-style defaults: scaling-law sweep with κ₀ = 0.05.
    pub fn scaling_sweep_defaults() -> Self {
        Self {
            n_grid: DEFAULT_FIG2_N_GRID.to_vec(),
            grid: ParamGrid::ScalingLaws {
                kappa0: DEFAULT_KAPPA0,
                z_values: DEFAULT_FIG2_ZS.to_vec(),
            },
            ..Self::kappa_sweep_defaults()
        }
    }

    /// The effective impairment coefficient at one grid point.
    pub fn kappa_at(&self, param: f64, n: usize) -> f64 {
        match &self.grid {
            ParamGrid::Kappa(_) => param,
            ParamGrid::ScalingLaws { kappa0, .. } => {
                let law = ScalingLaw::new(*kappa0, param).expect("grid was validated");
                twrelay_core::analytics::substituted_kappa(&law, n)
            }
        }
    }

    /// Values of the swept parameter (κ or z).
    pub fn param_values(&self) -> &[f64] {
        match &self.grid {
            ParamGrid::Kappa(v) => v,
            ParamGrid::ScalingLaws { z_values, .. } => z_values,
        }
    }

    pub fn system_config(&self, n: usize, kappa: f64) -> SystemConfig {
        let mut cfg =
            SystemConfig::symmetric(n, self.n_pairs, self.p_user, self.p_relay, kappa);
        cfg.noise_relay = self.noise_relay;
        cfg.noise_a = vec![self.noise_device; self.n_pairs];
        cfg.noise_b = vec![self.noise_device; self.n_pairs];
        cfg.distortion_mode = self.distortion_mode;
        cfg
    }

    fn validate(&self) -> Result<(), String> {
        if self.n_grid.is_empty() {
            return Err("antenna grid is empty".into());
        }
        for w in self.n_grid.windows(2) {
            if w[0] == w[1] {
                return Err(format!("duplicate antenna count {} in grid", w[0]));
            }
            if w[0] > w[1] {
                return Err("antenna grid must be strictly increasing".into());
            }
        }
        match &self.grid {
            ParamGrid::Kappa(v) => {
                if v.is_empty() {
                    return Err("kappa grid is empty".into());
                }
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("kappa grid must be strictly increasing".into());
                }
                if v.iter().any(|&k| k < 0.0) {
                    return Err("kappa values must be non-negative".into());
                }
            }
            ParamGrid::ScalingLaws { kappa0, z_values } => {
                if !(*kappa0 > 0.0) {
                    return Err("kappa0 must be positive".into());
                }
                if z_values.is_empty() {
                    return Err("z grid is empty".into());
                }
                if z_values.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("z grid must be strictly increasing".into());
                }
                if z_values.iter().any(|&z| z <= 0.0) {
                    return Err("z values must be positive".into());
                }
            }
        }
        if self.n_trials < 2 {
            return Err("trials must be at least 2".into());
        }
        if self.n_pairs == 0 {
            return Err("pairs must be positive".into());
        }
        for (name, v) in [
            ("p_user", self.p_user),
            ("p_relay", self.p_relay),
            ("noise_relay", self.noise_relay),
            ("noise_device", self.noise_device),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("{name} must be a positive finite number"));
            }
        }
        Ok(())
    }
}

/// Config-file parse or validation failure, with the offending line when
/// one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {}: {}", line, self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line: Some(line), message: message.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T, ParseError> {
    raw.trim()
        .parse()
        .map_err(|_| err(line, format!("malformed value {:?} for key {key}", raw.trim())))
}

fn parse_list<T: std::str::FromStr>(
    line: usize,
    key: &str,
    raw: &str,
) -> Result<Vec<T>, ParseError> {
    raw.split(',').map(|item| parse_num(line, key, item)).collect()
}

/// Parses a flat `key = value` experiment file over the given defaults.
/// Lists are comma-separated; `#` starts a comment; an empty file yields
/// the defaults unchanged.
pub fn parse_experiment(path: &Path, defaults: ExperimentSpec) -> Result<ExperimentSpec, ParseError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ParseError { line: None, message: format!("{}: {e}", path.display()) })?;
    parse_experiment_str(&text, defaults)
}

pub fn parse_experiment_str(
    text: &str,
    defaults: ExperimentSpec,
) -> Result<ExperimentSpec, ParseError> {
    let mut spec = defaults;
    let mut kappa_grid: Option<Vec<f64>> = None;
    let mut kappa0: Option<f64> = None;
    let mut z_grid: Option<Vec<f64>> = None;
    let mut fading_seed: Option<u64> = None;
    let mut fading_kind: Option<&str> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "n_grid" => spec.n_grid = parse_list(line_no, key, value)?,
            "kappa_grid" => kappa_grid = Some(parse_list(line_no, key, value)?),
            "kappa0" => kappa0 = Some(parse_num(line_no, key, value)?),
            "z_grid" => z_grid = Some(parse_list(line_no, key, value)?),
            "pairs" => spec.n_pairs = parse_num(line_no, key, value)?,
            "p_user" => spec.p_user = parse_num(line_no, key, value)?,
            "p_relay" => spec.p_relay = parse_num(line_no, key, value)?,
            "noise_relay" => spec.noise_relay = parse_num(line_no, key, value)?,
            "noise_device" => spec.noise_device = parse_num(line_no, key, value)?,
            "trials" => spec.n_trials = parse_num(line_no, key, value)?,
            "seed" => spec.master_seed = parse_num(line_no, key, value)?,
            "fading" => match value {
                "fixed" | "drawn" => fading_kind = Some(if value == "fixed" { "fixed" } else { "drawn" }),
                _ => return Err(err(line_no, format!("fading must be fixed or drawn, got {value:?}"))),
            },
            "fading_seed" => fading_seed = Some(parse_num(line_no, key, value)?),
            "distortion_mode" => {
                spec.distortion_mode = match value {
                    "realization" => DistortionMode::Realization,
                    "expectation" => DistortionMode::ConditionalExpectation,
                    _ => {
                        return Err(err(
                            line_no,
                            format!("distortion_mode must be realization or expectation, got {value:?}"),
                        ))
                    }
                }
            }
            "emit_analytics" => {
                spec.emit_analytics = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(err(line_no, format!("emit_analytics must be true or false, got {value:?}"))),
                }
            }
            _ => return Err(err(line_no, format!("unknown key {key:?}"))),
        }
    }

    if z_grid.is_some() && kappa0.is_none() {
        return Err(ParseError { line: None, message: "z_grid requires kappa0".into() });
    }
    if kappa_grid.is_some() && (z_grid.is_some() || kappa0.is_some()) {
        return Err(ParseError {
            line: None,
            message: "kappa_grid and scaling-law keys are mutually exclusive".into(),
        });
    }
    if let Some(v) = kappa_grid {
        spec.grid = ParamGrid::Kappa(v);
    } else if let Some(z_values) = z_grid {
        spec.grid = ParamGrid::ScalingLaws { kappa0: kappa0.unwrap(), z_values };
    } else if let Some(k0) = kappa0 {
        if let ParamGrid::ScalingLaws { kappa0, .. } = &mut spec.grid {
            *kappa0 = k0;
        } else {
            return Err(ParseError { line: None, message: "kappa0 requires z_grid".into() });
        }
    }
    match (fading_kind, fading_seed) {
        (Some("drawn"), seed) => spec.fading = FadingMode::Drawn { fading_seed: seed.unwrap_or(spec.master_seed) },
        (Some(_), _) => spec.fading = FadingMode::FixedSymmetric,
        (None, Some(seed)) => spec.fading = FadingMode::Drawn { fading_seed: seed },
        (None, None) => {}
    }

    spec.validate().map_err(|message| ParseError { line: None, message })?;
    Ok(spec)
}
