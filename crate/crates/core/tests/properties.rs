//! Property tests over randomized inputs: parser round trips, accumulator
//! laws, and state-level invariants that must hold for every seed.

use proptest::prelude::*;

use qent_core::entanglement::{concurrence, eof_from_concurrence, is_ppt};
use qent_core::entropy::{EntropicOrder, renyi_spectrum, spectrum_of};
use qent_core::sampler::{EnsembleKind, SeededStream, sample_state};
use qent_core::stats::{BinnedAccumulator, derivative_profile};

proptest! {
    #[test]
    fn entropic_order_display_parse_roundtrip(q in prop_oneof![
        (1u32..10_000u32).prop_map(|n| n as f64 / 16.0),
        Just(1.0),
        Just(f64::INFINITY),
    ]) {
        let order = if q.is_infinite() {
            EntropicOrder::MaxLimit
        } else {
            EntropicOrder::new(q).unwrap()
        };
        let reparsed: EntropicOrder = order.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, order);
    }

    #[test]
    fn sampled_state_measurements_stay_in_range(seed in any::<u64>(), stream_idx in 0u64..16) {
        let mut stream = SeededStream::new(seed, stream_idx);
        let rho = sample_state(&mut stream, EnsembleKind::Full);
        let c = concurrence(&rho).unwrap().concurrence;
        prop_assert!((0.0..=1.0).contains(&c));
        let e = eof_from_concurrence(c);
        prop_assert!((0.0..=1.0).contains(&e));
        let spec = spectrum_of(&rho).unwrap();
        prop_assert!((spec.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Peres: PPT exactly where the concurrence vanishes
        let (ppt, _) = is_ppt(&rho).unwrap();
        prop_assert_eq!(ppt, c <= 1e-10);
        // band order survives any draw
        let r = |o| renyi_spectrum(&spec, o);
        prop_assert!(r(EntropicOrder::Finite(0.5)) >= r(EntropicOrder::Shannon) - 1e-10);
        prop_assert!(r(EntropicOrder::Shannon) >= r(EntropicOrder::Finite(2.0)) - 1e-10);
        prop_assert!(r(EntropicOrder::Finite(2.0)) >= r(EntropicOrder::MaxLimit) - 1e-10);
    }

    #[test]
    fn accumulator_merge_matches_sequential_fold_on_dyadic_data(
        records in prop::collection::vec((0u8..=32, -64i32..=64), 1..200),
        split in 0usize..200,
    ) {
        // dyadic payloads keep f64 addition exact, so the merge law is an
        // equality, not an approximation
        let records: Vec<(f64, f64)> = records
            .into_iter()
            .map(|(c, v)| (c as f64 / 32.0, v as f64 / 8.0))
            .collect();
        let split = split.min(records.len());
        let mut whole = BinnedAccumulator::new(8, 1);
        for &(c2, v) in &records {
            whole.accumulate(c2, &[v]).unwrap();
        }
        let mut left = BinnedAccumulator::new(8, 1);
        let mut right = BinnedAccumulator::new(8, 1);
        for &(c2, v) in &records[..split] {
            left.accumulate(c2, &[v]).unwrap();
        }
        for &(c2, v) in &records[split..] {
            right.accumulate(c2, &[v]).unwrap();
        }
        left.merge(&right);
        for bin in 0..8 {
            prop_assert_eq!(left.count(bin), whole.count(bin));
            prop_assert_eq!(left.mean(bin, 0), whole.mean(bin, 0));
            prop_assert_eq!(left.dispersion(bin, 0), whole.dispersion(bin, 0));
        }
    }

    #[test]
    fn derivative_is_exact_on_linear_profiles(
        slope in -8i32..=8,
        intercept in -8i32..=8,
        bins in 3usize..40,
    ) {
        let slope = slope as f64;
        let intercept = intercept as f64;
        let h = 1.0 / bins as f64;
        let means: Vec<Option<f64>> = (0..bins)
            .map(|b| Some(intercept + slope * (b as f64 + 0.5) * h))
            .collect();
        let d = derivative_profile(&means, h).unwrap();
        for v in d {
            prop_assert!((v.unwrap() - slope).abs() < 1e-9);
        }
    }

    #[test]
    fn binary_entropy_symmetry_and_range(x in 0.0f64..=1.0) {
        let h = qent_core::entanglement::binary_entropy_bits(x);
        let h_mirror = qent_core::entanglement::binary_entropy_bits(1.0 - x);
        prop_assert!((h - h_mirror).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&h));
    }
}
