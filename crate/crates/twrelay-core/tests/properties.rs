//! Randomized structural invariants of the Gram-matrix fast path.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twrelay_core::channel::draw_channels;
use twrelay_core::gram::{apply_precoder, bilinear_form, build_gram_cache, frobenius_norms};
use twrelay_core::{ChannelRealization, LargeScaleFading, Leg, SystemConfig, C64};

fn instance(n: usize, k: usize, seed: u64) -> ChannelRealization {
    let cfg = SystemConfig::symmetric(n, k, 10.0, 40.0, 0.0);
    let fading = LargeScaleFading::symmetric_unit(k);
    draw_channels(&cfg, &fading, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // the precoder is complex symmetric, so every bilinear form commutes
    #[test]
    fn bilinear_forms_are_symmetric(n in 1usize..12, k in 1usize..5, seed: u64) {
        let ch = instance(n, k, seed);
        let cache = build_gram_cache(&ch);
        for i in 0..k {
            for j in 0..k {
                let gh = bilinear_form(&cache, i, j, Leg::G, Leg::H);
                let hg = bilinear_form(&cache, j, i, Leg::H, Leg::G);
                prop_assert!((gh - hg).norm() <= 1e-9 * gh.norm().max(1.0));
            }
        }
    }

    // ‖F‖² equals the sum of ‖F e_n‖² over a standard basis
    #[test]
    fn frobenius_norm_matches_columns(n in 1usize..10, k in 1usize..4, seed: u64) {
        let ch = instance(n, k, seed);
        let cache = build_gram_cache(&ch);
        let (f_sqr, _fa_sqr) = frobenius_norms(&cache);
        let mut total = 0.0;
        for col in 0..n {
            let mut e = vec![C64::ZERO; n];
            e[col] = C64::new(1.0, 0.0);
            let fe = apply_precoder(&ch, &e);
            total += fe.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        prop_assert!((total - f_sqr).abs() <= 1e-8 * f_sqr.max(1.0));
    }

    // applying F to the stacked columns of [G, H] reproduces ‖FA‖²
    #[test]
    fn fa_norm_matches_applied_columns(n in 1usize..10, k in 1usize..4, seed: u64) {
        let ch = instance(n, k, seed);
        let cache = build_gram_cache(&ch);
        let (_f_sqr, fa_sqr) = frobenius_norms(&cache);
        let mut total = 0.0;
        for i in 0..k {
            total += apply_precoder(&ch, ch.g_col(i)).iter().map(|v| v.norm_sqr()).sum::<f64>();
            total += apply_precoder(&ch, ch.h_col(i)).iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        prop_assert!((total - fa_sqr).abs() <= 1e-8 * fa_sqr.max(1.0));
    }
}
