//! MR-precoder quantities expanded through K×K Gram matrices.
//!
//! The relay precoder is `F = B* Aᴴ` with `A = [G, H]`, `B = [H, G]`,
//! which expands to `F = H* Gᴴ + G* Hᴴ`. Every bilinear form, row norm and
//! Frobenius norm needed by the SINR therefore reduces to entries of
//! `P = GᴴG`, `Q = HᴴH` and `R = HᴴG`, so the N×N precoder is never formed
//! and a trial costs O(NK²) instead of O(N²K).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex;

use crate::channel::{ChannelRealization, DistortionRealization};
use crate::config::SystemConfig;
use crate::C64;

/// Selects one channel leg of a device pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    /// g_i, the A-side channel.
    G,
    /// h_i, the B-side channel.
    H,
}

/// K×K Gram matrices of one channel realization.
#[derive(Debug, Clone)]
pub struct GramCache {
    k: usize,
    /// P = GᴴG, row-major, Hermitian.
    p: Vec<C64>,
    /// Q = HᴴH, row-major, Hermitian.
    q: Vec<C64>,
    /// R = HᴴG, row-major.
    r: Vec<C64>,
}

/// All zero channel columns; the power normalization is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegenerateChannel;

impl fmt::Display for DegenerateChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "power normalization is degenerate: received signal power is zero")
    }
}

impl core::error::Error for DegenerateChannel {}

/// Computes P, Q, R in O(NK²), enforcing Hermitian symmetry of P and Q.
pub fn build_gram_cache(channel: &ChannelRealization) -> GramCache {
    let k = channel.n_pairs;
    let inner = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let mut p = vec![C64::ZERO; k * k];
    let mut q = vec![C64::ZERO; k * k];
    let mut r = vec![C64::ZERO; k * k];
    for i in 0..k {
        for j in 0..=i {
            let pij = inner(channel.g_col(i), channel.g_col(j));
            let qij = inner(channel.h_col(i), channel.h_col(j));
            if i == j {
                p[i * k + i] = Complex::new(pij.re, 0.0);
                q[i * k + i] = Complex::new(qij.re, 0.0);
            } else {
                p[i * k + j] = pij;
                p[j * k + i] = pij.conj();
                q[i * k + j] = qij;
                q[j * k + i] = qij.conj();
            }
        }
        for j in 0..k {
            r[i * k + j] = inner(channel.h_col(i), channel.g_col(j));
        }
    }
    GramCache { k, p, q, r }
}

impl GramCache {
    pub fn n_pairs(&self) -> usize {
        self.k
    }

    /// g_iᴴ g_j.
    #[inline]
    pub fn gg(&self, i: usize, j: usize) -> C64 {
        self.p[i * self.k + j]
    }

    /// h_iᴴ h_j.
    #[inline]
    pub fn hh(&self, i: usize, j: usize) -> C64 {
        self.q[i * self.k + j]
    }

    /// h_iᴴ g_j.
    #[inline]
    pub fn hg(&self, i: usize, j: usize) -> C64 {
        self.r[i * self.k + j]
    }

    /// g_iᴴ h_j.
    #[inline]
    pub fn gh(&self, i: usize, j: usize) -> C64 {
        self.r[j * self.k + i].conj()
    }

    /// ‖g_i‖².
    pub fn g_norm_sqr(&self, i: usize) -> f64 {
        self.gg(i, i).re
    }

    /// ‖h_i‖².
    pub fn h_norm_sqr(&self, i: usize) -> f64 {
        self.hh(i, i).re
    }

    /// x_kᴴ y_j where x is the `left` leg and y the `right` leg.
    #[inline]
    fn inner(&self, left: Leg, k: usize, right: Leg, j: usize) -> C64 {
        match (left, right) {
            (Leg::G, Leg::G) => self.gg(k, j),
            (Leg::H, Leg::H) => self.hh(k, j),
            (Leg::H, Leg::G) => self.hg(k, j),
            (Leg::G, Leg::H) => self.gh(k, j),
        }
    }

    /// Coefficients (u, v) of the row vector x_iᵀF = Σ_k u_k g_kᴴ + v_k h_kᴴ,
    /// with u_k = h_kᴴ x_i and v_k = g_kᴴ x_i.
    pub fn row_coefficients(&self, i: usize, leg: Leg) -> (Vec<C64>, Vec<C64>) {
        let u = (0..self.k).map(|k| self.inner(Leg::H, k, leg, i)).collect();
        let v = (0..self.k).map(|k| self.inner(Leg::G, k, leg, i)).collect();
        (u, v)
    }
}

/// x_iᵀ F y_j through the Gram identity
/// x_iᵀ F y_j = Σ_k (h_kᴴ x_i)(g_kᴴ y_j) + (g_kᴴ x_i)(h_kᴴ y_j), in O(K).
pub fn bilinear_form(cache: &GramCache, i: usize, j: usize, left: Leg, right: Leg) -> C64 {
    assert!(i < cache.k && j < cache.k, "pair index out of range");
    (0..cache.k)
        .map(|k| {
            cache.inner(Leg::H, k, left, i) * cache.inner(Leg::G, k, right, j)
                + cache.inner(Leg::G, k, left, i) * cache.inner(Leg::H, k, right, j)
        })
        .sum()
}

/// ‖Σ_k u_k g_kᴴ + v_k h_kᴴ‖², the squared norm of a row vector given in
/// the channel-column basis. O(K²).
fn row_norm_from_coefficients(cache: &GramCache, u: &[C64], v: &[C64]) -> f64 {
    let k = cache.k;
    let mut acc = C64::ZERO;
    for a in 0..k {
        for b in 0..k {
            acc += u[a] * u[b].conj() * cache.gg(a, b)
                + u[a] * v[b].conj() * cache.gh(a, b)
                + v[a] * u[b].conj() * cache.hg(a, b)
                + v[a] * v[b].conj() * cache.hh(a, b);
        }
    }
    acc.re.max(0.0)
}

/// ‖x_iᵀ F‖² expanded through P, Q, R in O(K²).
pub fn precoder_row_norm(cache: &GramCache, i: usize, leg: Leg) -> f64 {
    let (u, v) = cache.row_coefficients(i, leg);
    row_norm_from_coefficients(cache, &u, &v)
}

/// F·x = H*(Gᴴx) + G*(Hᴴx), in O(NK).
pub fn apply_precoder(channel: &ChannelRealization, x: &[C64]) -> Vec<C64> {
    assert_eq!(x.len(), channel.n_antennas, "dimension mismatch");
    let a = channel.g_adjoint_apply(x);
    let b = channel.h_adjoint_apply(x);
    let mut out = vec![C64::ZERO; channel.n_antennas];
    for j in 0..channel.n_pairs {
        let (aj, bj) = (a[j], b[j]);
        for (o, (h, g)) in out.iter_mut().zip(channel.h_col(j).iter().zip(channel.g_col(j))) {
            *o += h.conj() * aj + g.conj() * bj;
        }
    }
    out
}

fn mat_mul(k: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::ZERO; k * k];
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == C64::ZERO {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += ail * b[l * k + j];
            }
        }
    }
    out
}

fn mat_conj(m: &[C64]) -> Vec<C64> {
    m.iter().map(|z| z.conj()).collect()
}

fn mat_herm(k: usize, m: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::ZERO; k * k];
    for i in 0..k {
        for j in 0..k {
            out[i * k + j] = m[j * k + i].conj();
        }
    }
    out
}

fn trace(k: usize, m: &[C64]) -> C64 {
    (0..k).map(|i| m[i * k + i]).sum()
}

/// (‖F‖², ‖FA‖²) computed exactly from Gram-matrix traces in O(K³).
pub fn frobenius_norms(cache: &GramCache) -> (f64, f64) {
    let k = cache.k;
    let (p, q, r) = (&cache.p, &cache.q, &cache.r);
    let (pc, qc, rc) = (mat_conj(p), mat_conj(q), mat_conj(r));
    let rh = mat_herm(k, r);
    let rt = mat_conj(&rh); // Rᵀ

    // ‖F‖² = 2 Re tr(P Q̄) + 2 Re tr(R̄ R)
    let f2 = 2.0 * trace(k, &mat_mul(k, p, &qc)).re + 2.0 * trace(k, &mat_mul(k, &rc, r)).re;

    // FG = H*P + G*R, FH = H*Rᴴ + G*Q
    let fg2 = trace(k, &mat_mul(k, &mat_mul(k, p, &qc), p)).re
        + trace(k, &mat_mul(k, &mat_mul(k, p, &rc), r)).re
        + trace(k, &mat_mul(k, &mat_mul(k, &rh, &rt), p)).re
        + trace(k, &mat_mul(k, &mat_mul(k, &rh, &pc), r)).re;
    let fh2 = trace(k, &mat_mul(k, &mat_mul(k, r, &qc), &rh)).re
        + trace(k, &mat_mul(k, &mat_mul(k, r, &rc), q)).re
        + trace(k, &mat_mul(k, &mat_mul(k, q, &rt), &rh)).re
        + trace(k, &mat_mul(k, &mat_mul(k, q, &pc), q)).re;

    (f2.max(0.0), (fg2 + fh2).max(0.0))
}

/// ‖Fη_r‖², or its conditional expectation given the channel.
fn precoded_rx_distortion_power(
    cache: &GramCache,
    channel: &ChannelRealization,
    distortion: &DistortionRealization,
) -> f64 {
    match distortion {
        DistortionRealization::Realization { eta_r, .. } => {
            apply_precoder(channel, eta_r).iter().map(|z| z.norm_sqr()).sum()
        }
        DistortionRealization::ConditionalExpectation { var_r, .. } => {
            // F is complex-symmetric, so the n-th column norm equals the
            // n-th row norm: e_nᵀF = Σ_k conj(H[n,k]) g_kᴴ + conj(G[n,k]) h_kᴴ.
            let k = cache.k;
            let mut u = vec![C64::ZERO; k];
            let mut v = vec![C64::ZERO; k];
            let mut total = 0.0;
            for (row, &d) in var_r.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                for kk in 0..k {
                    u[kk] = channel.h_col(kk)[row].conj();
                    v[kk] = channel.g_col(kk)[row].conj();
                }
                total += d * row_norm_from_coefficients(cache, &u, &v);
            }
            total
        }
    }
}

/// Power-control coefficient ρ of the amplify-and-forward stage:
/// ρ = sqrt(P_R / (P_U ‖FA‖² + ‖Fη_r‖² + σ²_R ‖F‖²)).
pub fn power_control_rho(
    cache: &GramCache,
    channel: &ChannelRealization,
    distortion: &DistortionRealization,
    config: &SystemConfig,
) -> Result<f64, DegenerateChannel> {
    let (f2, fa2) = frobenius_norms(cache);
    let rx = precoded_rx_distortion_power(cache, channel, distortion);
    let denom = config.p_user * fa2 + rx + config.noise_relay * f2;
    if !(denom > 0.0) {
        return Err(DegenerateChannel);
    }
    Ok(libm::sqrt(config.p_relay / denom))
}

/// One device's SINR decomposition: the numerator and every denominator
/// term, all non-negative powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBreakdown {
    /// P_U |x_iᵀ F y_i|².
    pub signal: f64,
    /// Inter-user interference C′.
    pub inter_user: f64,
    /// Relay noise D′ = σ²_R ‖x_iᵀF‖².
    pub relay_noise: f64,
    /// Device noise E′ = σ²_i / ρ².
    pub device_noise: f64,
    /// Receiver-distortion power |x_iᵀ F η_r|².
    pub rx_distortion: f64,
    /// Transmit-distortion power |x_iᵀ η_t|² / ρ².
    pub tx_distortion: f64,
}

impl SinrBreakdown {
    pub fn denominator(&self) -> f64 {
        self.inter_user + self.relay_noise + self.device_noise + self.rx_distortion + self.tx_distortion
    }

    pub fn sinr(&self) -> f64 {
        self.signal / self.denominator()
    }
}

/// All per-device SINRs of one realization, with the term breakdown kept
/// for diagnostics and unit-level checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub rho2: f64,
    pub breakdown_a: Vec<SinrBreakdown>,
    pub breakdown_b: Vec<SinrBreakdown>,
}

impl TrialResult {
    pub fn sinr_a(&self) -> Vec<f64> {
        self.breakdown_a.iter().map(SinrBreakdown::sinr).collect()
    }

    pub fn sinr_b(&self) -> Vec<f64> {
        self.breakdown_b.iter().map(SinrBreakdown::sinr).collect()
    }
}

/// Per-device SINRs for both sides. Self-interference is excluded
/// (cancelled exactly); the B side uses the A-side formulas with the legs
/// and noise variances exchanged.
pub fn compute_trial_sinr(
    cache: &GramCache,
    channel: &ChannelRealization,
    distortion: &DistortionRealization,
    config: &SystemConfig,
) -> Result<TrialResult, DegenerateChannel> {
    let rho = power_control_rho(cache, channel, distortion, config)?;
    let rho2 = rho * rho;
    let k = cache.k;

    // Distortion projections shared by all devices.
    let projections = match distortion {
        DistortionRealization::Realization { eta_r, eta_t } => DistortionProjections::Realized {
            g_eta_r: channel.g_adjoint_apply(eta_r),
            h_eta_r: channel.h_adjoint_apply(eta_r),
            eta_t: eta_t.clone(),
        },
        DistortionRealization::ConditionalExpectation { var_r, var_t } => DistortionProjections::Conditional {
            var_r: var_r.clone(),
            var_t: *var_t,
        },
    };

    let side = |leg: Leg, partner: Leg, noise: &[f64]| -> Vec<SinrBreakdown> {
        (0..k)
            .map(|i| {
                let signal = config.p_user * bilinear_form(cache, i, i, leg, partner).norm_sqr();
                let inter_user: f64 = config.p_user
                    * (0..k)
                        .filter(|&j| j != i)
                        .map(|j| {
                            bilinear_form(cache, i, j, leg, leg).norm_sqr()
                                + bilinear_form(cache, i, j, leg, partner).norm_sqr()
                        })
                        .sum::<f64>();
                let relay_noise = config.noise_relay * precoder_row_norm(cache, i, leg);
                let device_noise = noise[i] / rho2;
                let (rx, tx) = projections.device_terms(cache, channel, i, leg);
                SinrBreakdown {
                    signal,
                    inter_user,
                    relay_noise,
                    device_noise,
                    rx_distortion: rx,
                    tx_distortion: tx / rho2,
                }
            })
            .collect()
    };

    Ok(TrialResult {
        rho2,
        breakdown_a: side(Leg::G, Leg::H, &config.noise_a),
        breakdown_b: side(Leg::H, Leg::G, &config.noise_b),
    })
}

enum DistortionProjections {
    Realized {
        /// Gᴴη_r.
        g_eta_r: Vec<C64>,
        /// Hᴴη_r.
        h_eta_r: Vec<C64>,
        eta_t: Vec<C64>,
    },
    Conditional {
        var_r: Vec<f64>,
        var_t: f64,
    },
}

impl DistortionProjections {
    /// (|x_iᵀFη_r|², |x_iᵀη_t|²) or their conditional expectations.
    fn device_terms(&self, cache: &GramCache, channel: &ChannelRealization, i: usize, leg: Leg) -> (f64, f64) {
        let x_col = |j: usize| match leg {
            Leg::G => channel.g_col(j),
            Leg::H => channel.h_col(j),
        };
        match self {
            Self::Realized { g_eta_r, h_eta_r, eta_t } => {
                let (u, v) = cache.row_coefficients(i, leg);
                // x_iᵀFη = Σ_k u_k (g_kᴴη) + v_k (h_kᴴη)
                let rx: C64 = (0..cache.k).map(|k| u[k] * g_eta_r[k] + v[k] * h_eta_r[k]).sum();
                let tx: C64 = x_col(i).iter().zip(eta_t).map(|(x, e)| x * e).sum();
                (rx.norm_sqr(), tx.norm_sqr())
            }
            Self::Conditional { var_r, var_t } => {
                let (u, v) = cache.row_coefficients(i, leg);
                // x_iᵀF = conj(G u* + H v*)ᵀ, so E|x_iᵀFη_r|² = Σ_n var_r[n] |(G u* + H v*)_n|².
                let n = channel.n_antennas;
                let mut t = vec![C64::ZERO; n];
                for k in 0..cache.k {
                    let (uk, vk) = (u[k].conj(), v[k].conj());
                    for (tn, (g, h)) in t.iter_mut().zip(channel.g_col(k).iter().zip(channel.h_col(k))) {
                        *tn += g * uk + h * vk;
                    }
                }
                let rx = t.iter().zip(var_r).map(|(tn, &d)| d * tn.norm_sqr()).sum();
                let x_norm: f64 = x_col(i).iter().map(|z| z.norm_sqr()).sum();
                (rx, var_t * x_norm)
            }
        }
    }
}
