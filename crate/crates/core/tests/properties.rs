use ginoe_core::density::rho_real;
use ginoe_core::moments::*;
use ginoe_core::montecarlo::{real_eigenvalues, sample_ginoe, RealnessMode};
use ginoe_core::numerics::{Ball, CBall, PrecisionContext};
use ginoe_core::transforms::{mgf_value, stieltjes_value};
use proptest::prelude::*;

fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

fn tight(a: &CBall, b: &CBall, bits: f64) -> bool {
    a.overlaps(b) && a.rad().log2() < -bits && b.rad().log2() < -bits
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn density_is_even(n in 2u32..16, x in 0.0f64..6.0) {
        let c = ctx(96);
        let a = rho_real(n, &Ball::from_f64(x, 96), &c).unwrap();
        let b = rho_real(n, &Ball::from_f64(-x, 96), &c).unwrap();
        prop_assert!(a.overlaps(&b));
        prop_assert!(a.is_positive());
    }

    #[test]
    fn mgf_is_even(n in 2u32..10, t in 0.05f64..2.0) {
        let c = ctx(80);
        let a = mgf_value(n, &Ball::from_f64(t, 80), 0, &c).unwrap().value;
        let b = mgf_value(n, &Ball::from_f64(-t, 80), 0, &c).unwrap().value;
        prop_assert!(tight(&a, &b, 60.0));
    }

    #[test]
    fn stieltjes_symmetries(n in 2u32..6, re in -2.0f64..2.0, im in 0.3f64..2.0) {
        let c = ctx(64);
        let t = CBall::from_f64(re, im, 64);
        let s = stieltjes_value(n, &t, 0, &c).unwrap().value;
        let s_conj = stieltjes_value(n, &t.conj(), 0, &c).unwrap().value;
        let s_neg = stieltjes_value(n, &t.neg(), 0, &c).unwrap().value;
        prop_assert!(tight(&s_conj, &s.conj(), 40.0));
        prop_assert!(tight(&s_neg, &s.neg(), 40.0));
    }

    #[test]
    fn real_and_complex_sum_to_trace(n in 1u32..14, p in 1u32..7) {
        let c = ctx(128);
        let total = moment_real_int(n, p, &c).unwrap().value.add(&moment_complex_eigs(n, p, &c).unwrap().value);
        let t = CBall::from_real(Ball::from_biguint(&trace_moment(n, p).unwrap(), 256));
        prop_assert!(tight(&total, &t, 100.0));
    }

    #[test]
    fn exact_recurrence_matches_numeric(n in 2u32..16, p in 2u32..12) {
        let m0 = m0_exact(n).unwrap();
        let m2 = m2_recognized(n).unwrap().expect("M2 recognised");
        let seq = moment_sequence_exact(n, p, &m0, &m2).unwrap();
        let c = ctx(128);
        let num = moment_real_int(n, p, &c).unwrap().value;
        let exact = CBall::from_real(seq[p as usize].to_ball(256));
        prop_assert!(tight(&num, &exact, 90.0));
    }

    #[test]
    fn negated_matrix_negates_real_spectrum(n in 1usize..12, seed in 0u64..1000, sample in 0u64..1000) {
        let g = sample_ginoe(n, seed, sample);
        let mut a = real_eigenvalues(&g, RealnessMode::SchurBlocks).unwrap();
        let mut b: Vec<f64> = real_eigenvalues(&(-&g), RealnessMode::SchurBlocks).unwrap().into_iter().map(|x| -x).collect();
        prop_assert_eq!(a.len(), b.len());
        prop_assert_eq!(a.len() % 2, n % 2);
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
    }
}
