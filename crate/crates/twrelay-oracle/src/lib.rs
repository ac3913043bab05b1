//! Dense reference route for every precoder-dependent quantity.
//!
//! The precoder `F = B* Aᴴ` is formed explicitly as an N×N matrix and all
//! SINR ingredients are computed by direct matrix arithmetic. This is the
//! independent oracle the Gram-matrix fast path is checked against; it must
//! never call into `twrelay_core::gram`. Complexity is O(N²K) per trial, so
//! keep N small.

use twrelay_core::{
    ChannelRealization, DistortionRealization, Leg, SinrBreakdown, SystemConfig, TrialResult, C64,
};

/// Dense N×N precoder F = H*Gᴴ + G*Hᴴ, row-major.
pub fn dense_precoder(channel: &ChannelRealization) -> Vec<C64> {
    let n = channel.n_antennas;
    let mut f = vec![C64::ZERO; n * n];
    for k in 0..channel.n_pairs {
        let g = channel.g_col(k);
        let h = channel.h_col(k);
        for r in 0..n {
            let (hr, gr) = (h[r].conj(), g[r].conj());
            for c in 0..n {
                f[r * n + c] += hr * g[c].conj() + gr * h[c].conj();
            }
        }
    }
    f
}

fn leg_col<'a>(channel: &'a ChannelRealization, leg: Leg, i: usize) -> &'a [C64] {
    match leg {
        Leg::G => channel.g_col(i),
        Leg::H => channel.h_col(i),
    }
}

/// F·x by dense matrix-vector product.
pub fn dense_apply(f: &[C64], n: usize, x: &[C64]) -> Vec<C64> {
    assert_eq!(x.len(), n);
    (0..n)
        .map(|r| f[r * n..(r + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Row vector x_iᵀF, where x_i is the selected channel column.
pub fn dense_row(channel: &ChannelRealization, f: &[C64], i: usize, leg: Leg) -> Vec<C64> {
    let n = channel.n_antennas;
    let x = leg_col(channel, leg, i);
    (0..n)
        .map(|c| (0..n).map(|r| x[r] * f[r * n + c]).sum())
        .collect()
}

/// x_iᵀ F y_j.
pub fn dense_bilinear(channel: &ChannelRealization, f: &[C64], i: usize, j: usize, left: Leg, right: Leg) -> C64 {
    let row = dense_row(channel, f, i, left);
    row.iter().zip(leg_col(channel, right, j)).map(|(a, b)| a * b).sum()
}

/// ‖x_iᵀF‖².
pub fn dense_row_norm_sqr(channel: &ChannelRealization, f: &[C64], i: usize, leg: Leg) -> f64 {
    dense_row(channel, f, i, leg).iter().map(|z| z.norm_sqr()).sum()
}

/// (‖F‖², ‖FA‖²) with A = [G, H].
pub fn dense_frobenius_norms(channel: &ChannelRealization, f: &[C64]) -> (f64, f64) {
    let n = channel.n_antennas;
    let f2 = f.iter().map(|z| z.norm_sqr()).sum();
    let mut fa2 = 0.0;
    for k in 0..channel.n_pairs {
        fa2 += dense_apply(f, n, channel.g_col(k)).iter().map(|z| z.norm_sqr()).sum::<f64>();
        fa2 += dense_apply(f, n, channel.h_col(k)).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    (f2, fa2)
}

fn dense_rx_power(channel: &ChannelRealization, f: &[C64], distortion: &DistortionRealization) -> f64 {
    let n = channel.n_antennas;
    match distortion {
        DistortionRealization::Realization { eta_r, .. } => {
            dense_apply(f, n, eta_r).iter().map(|z| z.norm_sqr()).sum()
        }
        DistortionRealization::ConditionalExpectation { var_r, .. } => {
            // E‖Fη_r‖² = Σ_c var_r[c] Σ_r |F[r,c]|²
            (0..n)
                .map(|c| var_r[c] * (0..n).map(|r| f[r * n + c].norm_sqr()).sum::<f64>())
                .sum()
        }
    }
}

/// ρ from the dense norms.
pub fn dense_rho(
    channel: &ChannelRealization,
    f: &[C64],
    distortion: &DistortionRealization,
    config: &SystemConfig,
) -> f64 {
    let (f2, fa2) = dense_frobenius_norms(channel, f);
    let denom = config.p_user * fa2 + dense_rx_power(channel, f, distortion) + config.noise_relay * f2;
    (config.p_relay / denom).sqrt()
}

/// Full SINR decomposition of one realization, all terms dense.
pub fn dense_trial_sinr(
    channel: &ChannelRealization,
    distortion: &DistortionRealization,
    config: &SystemConfig,
) -> TrialResult {
    let f = dense_precoder(channel);
    let rho = dense_rho(channel, &f, distortion, config);
    let rho2 = rho * rho;
    let k = channel.n_pairs;

    let side = |leg: Leg, partner: Leg, noise: &[f64]| -> Vec<SinrBreakdown> {
        (0..k)
            .map(|i| {
                let row = dense_row(channel, &f, i, leg);
                let bil = |target: Leg, j: usize| -> C64 {
                    row.iter().zip(leg_col(channel, target, j)).map(|(a, b)| a * b).sum()
                };
                let signal = config.p_user * bil(partner, i).norm_sqr();
                let inter_user: f64 = config.p_user
                    * (0..k)
                        .filter(|&j| j != i)
                        .map(|j| bil(leg, j).norm_sqr() + bil(partner, j).norm_sqr())
                        .sum::<f64>();
                let relay_noise = config.noise_relay * row.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let x = leg_col(channel, leg, i);
                let (rx, tx) = match distortion {
                    DistortionRealization::Realization { eta_r, eta_t } => {
                        let rx: C64 = row.iter().zip(eta_r).map(|(a, b)| a * b).sum();
                        let tx: C64 = x.iter().zip(eta_t).map(|(a, b)| a * b).sum();
                        (rx.norm_sqr(), tx.norm_sqr())
                    }
                    DistortionRealization::ConditionalExpectation { var_r, var_t } => {
                        let rx = row.iter().zip(var_r).map(|(a, &d)| d * a.norm_sqr()).sum();
                        let tx = var_t * x.iter().map(|z| z.norm_sqr()).sum::<f64>();
                        (rx, tx)
                    }
                };
                SinrBreakdown {
                    signal,
                    inter_user,
                    relay_noise,
                    device_noise: noise[i] / rho2,
                    rx_distortion: rx,
                    tx_distortion: tx / rho2,
                }
            })
            .collect()
    };

    TrialResult {
        rho2,
        breakdown_a: side(Leg::G, Leg::H, &config.noise_a),
        breakdown_b: side(Leg::H, Leg::G, &config.noise_b),
    }
}
