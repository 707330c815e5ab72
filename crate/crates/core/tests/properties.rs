//! Randomized invariant checks over the public numeric kernels.

use proptest::prelude::*;

use lws_core::align::{dtw_align, dtw_cost, dtw_distance, mean_sd, zero_pad, zscore};
use lws_core::evaluate::kfold_split;
use lws_core::types::GestureLabel;
use lws_core::wavelet::{
    apply_threshold, dwt_forward, dwt_inverse, threshold_value, ThresholdMode, ThresholdRule,
    WaveletId,
};

fn signal(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, len)
}

proptest! {
    #[test]
    fn dwt_round_trip_reconstructs(
        x in signal(32..400),
        levels in 1usize..=3,
        haar in any::<bool>(),
    ) {
        let wavelet = if haar { WaveletId::Haar } else { WaveletId::Db4 };
        let decomp = dwt_forward(&x, wavelet, levels).unwrap();
        let back = dwt_inverse(&decomp).unwrap();
        prop_assert_eq!(back.len(), x.len());
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn dwt_total_coefficient_count_is_bounded(
        x in signal(32..256),
        levels in 1usize..=3,
    ) {
        // Symmetric extension grows each band by at most the filter span.
        let decomp = dwt_forward(&x, WaveletId::Db4, levels).unwrap();
        let total: usize = decomp.approx.len()
            + decomp.details.iter().map(Vec::len).sum::<usize>();
        prop_assert!(total >= x.len());
        prop_assert!(total <= x.len() + (levels + 1) * WaveletId::Db4.filter_len());
    }

    #[test]
    fn threshold_rules_are_scale_covariant(
        coeffs in signal(1..64),
        sigma in 1e-3..10.0f64,
        c in 1e-2..1e2f64,
        rule_idx in 0usize..4,
    ) {
        let rule = [
            ThresholdRule::Sqtwolog,
            ThresholdRule::Minimaxi,
            ThresholdRule::Rigrsure,
            ThresholdRule::Heursure,
        ][rule_idx];
        let n = coeffs.len();
        let lam = threshold_value(&coeffs, rule, sigma, n).unwrap();
        let scaled: Vec<f64> = coeffs.iter().map(|v| v * c).collect();
        let lam_scaled = threshold_value(&scaled, rule, sigma * c, n).unwrap();
        prop_assert!(
            (lam_scaled - c * lam).abs() <= 1e-9 * (1.0 + c * lam),
            "rule {rule:?}: {lam_scaled} vs {} (c={c})", c * lam
        );
    }

    #[test]
    fn soft_threshold_shrinks_toward_zero(
        coeffs in signal(1..128),
        lambda in 0.0..50.0f64,
    ) {
        let soft = apply_threshold(&coeffs, lambda, ThresholdMode::Soft);
        let hard = apply_threshold(&coeffs, lambda, ThresholdMode::Hard);
        for ((&x, &s), &h) in coeffs.iter().zip(&soft).zip(&hard) {
            prop_assert_eq!(s, x.signum() * (x.abs() - lambda).max(0.0));
            prop_assert_eq!(h, if x.abs() > lambda { x } else { 0.0 });
            prop_assert!(s.abs() <= x.abs());
        }
    }

    #[test]
    fn zscore_postconditions_and_affine_invariance(
        x in signal(2..300),
        a in 0.1..10.0f64,
        b in -100.0..100.0f64,
    ) {
        let (_, sd) = mean_sd(&x);
        prop_assume!(sd > 1e-9);
        let z = zscore(&x).unwrap();
        let (zm, zsd) = mean_sd(&z);
        prop_assert!(zm.abs() <= 1e-12 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
        prop_assert!((zsd - 1.0).abs() <= 1e-9);

        let affine: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let za = zscore(&affine).unwrap();
        for (p, q) in z.iter().zip(&za) {
            prop_assert!((p - q).abs() <= 1e-8 * (1.0 + p.abs()), "{p} vs {q}");
        }
    }

    #[test]
    fn zero_pad_preserves_prefix(
        x in signal(1..50),
        extra in 0usize..40,
    ) {
        let padded = zero_pad(&x, x.len() + extra).unwrap();
        prop_assert_eq!(padded.len(), x.len() + extra);
        prop_assert_eq!(&padded[..x.len()], &x[..]);
        prop_assert!(padded[x.len()..].iter().all(|&v| v == 0.0));
        if x.len() > 1 {
            prop_assert!(zero_pad(&x, x.len() - 1).is_err());
        }
    }

    #[test]
    fn dtw_path_is_valid_and_cost_consistent(
        a in signal(1..30),
        b in signal(1..30),
    ) {
        let r = dtw_distance(&a, &b).unwrap();
        let (n, m) = (a.len(), b.len());
        prop_assert_eq!(r.path[0], (0, 0));
        prop_assert_eq!(*r.path.last().unwrap(), (n - 1, m - 1));
        for w in r.path.windows(2) {
            let (di, dj) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            prop_assert!((di, dj) == (1, 0) || (di, dj) == (0, 1) || (di, dj) == (1, 1));
        }
        prop_assert!(r.path.len() <= n + m - 1);

        // The DP accumulates costs in forward path order, so recomputing the
        // sum along the path reproduces the distance bit for bit.
        let mut along = 0.0;
        for &(i, j) in &r.path {
            along += (a[i] - b[j]).abs();
        }
        prop_assert_eq!(along, r.distance);
        prop_assert_eq!(dtw_cost(&a, &b).unwrap(), r.distance);
        prop_assert_eq!(dtw_cost(&b, &a).unwrap(), r.distance);
        prop_assert_eq!(dtw_distance(&a, &a).unwrap().distance, 0.0);

        let (wa, wb) = dtw_align(&a, &b).unwrap();
        prop_assert_eq!(wa.len(), r.path.len());
        prop_assert_eq!(wb.len(), r.path.len());
        for (k, &(i, j)) in r.path.iter().enumerate() {
            prop_assert_eq!(wa[k], a[i]);
            prop_assert_eq!(wb[k], b[j]);
        }
    }

    #[test]
    fn kfold_split_partitions_indices(
        labels in prop::collection::vec(0usize..8, 10..200),
        k in 2usize..=10,
        seed in any::<u64>(),
        stratified in any::<bool>(),
    ) {
        prop_assume!(labels.len() >= k);
        let labels: Vec<GestureLabel> = labels
            .iter()
            .map(|&i| GestureLabel::from_index(i).unwrap())
            .collect();
        let folds = kfold_split(&labels, k, seed, stratified).unwrap();
        prop_assert_eq!(folds.len(), k);

        let mut seen = vec![false; labels.len()];
        for fold in &folds {
            for &i in fold {
                prop_assert!(!seen[i], "index {} assigned twice", i);
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));

        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        prop_assert!(hi - lo <= 1, "fold sizes {sizes:?}");

        let again = kfold_split(&labels, k, seed, stratified).unwrap();
        prop_assert_eq!(folds, again);
    }
}
