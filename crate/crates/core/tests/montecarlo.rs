use ginoe_core::density::rho_real;
use ginoe_core::montecarlo::*;
use ginoe_core::numerics::{Ball, PrecisionContext};
use nalgebra::DMatrix;

fn m0(n: u32) -> f64 {
    ginoe_core::moments::m0_hyp(n, &PrecisionContext::new(64).unwrap())
        .unwrap()
        .value
        .re
        .to_f64()
}

#[test]
fn expected_count_n2() {
    let cfg = MCConfig::new(2, 100_000, 7);
    let s = empirical_real_moments(&cfg, &[0], None).unwrap();
    let z = (s.means[0] - 2f64.sqrt()) / s.std_errors[0];
    assert!(z.abs() < 4.0, "z = {z}");
    assert_eq!(s.failures, 0);
    assert_eq!(s.count_histogram.iter().sum::<u64>(), 100_000);
}

#[test]
fn second_moment_n10() {
    let ctx = PrecisionContext::new(64).unwrap();
    let exact = ginoe_core::moments::moment_real_int(10, 1, &ctx).unwrap().value.re.to_f64();
    let cfg = MCConfig { workers: 4, ..MCConfig::new(10, 20_000, 3) };
    let s = empirical_real_moments(&cfg, &[0, 1], None).unwrap();
    assert!(((s.means[0] - m0(10)) / s.std_errors[0]).abs() < 4.0);
    assert!(((s.means[1] - exact) / s.std_errors[1]).abs() < 4.0);
}

#[test]
fn trace_moments() {
    // E Tr G^2p: N, 2N^2+N, ...
    for (n, p, exact) in [(2usize, 1u32, 2.0), (4, 2, 24.0), (3, 3, 105.0)] {
        let cfg = MCConfig::new(n, 40_000, 11);
        let s = empirical_trace_moments(&cfg, &[p]).unwrap();
        let z = (s.means[0] - exact) / s.std_errors[0];
        assert!(z.abs() < 4.0, "N={n} p={p} mean {} z {z}", s.means[0]);
    }
}

#[test]
fn binned_density_matches_rho() {
    let n = 8;
    let cfg = MCConfig { workers: 4, ..MCConfig::new(n, 100_000, 5) };
    let s = empirical_real_moments(&cfg, &[0], Some((-4.0, 4.0, 40))).unwrap();
    let d = s.density.unwrap();
    let ctx = PrecisionContext::new(64).unwrap();
    let mut worst: f64 = 0.0;
    for ((c, v), se) in d.centers.iter().zip(&d.density).zip(&d.std_errors) {
        // average of rho over the bin by Simpson's rule
        let h = (d.hi - d.lo) / d.density.len() as f64;
        let r = |x: f64| rho_real(n as u32, &Ball::from_f64(x, 64), &ctx).unwrap().to_f64();
        let avg = (r(c - h / 2.0) + 4.0 * r(*c) + r(c + h / 2.0)) / 6.0;
        let z = (v - avg) / se.max(1e-12);
        worst = worst.max(z.abs());
    }
    assert!(worst < 5.0, "worst z {worst}");
}

fn companion(roots: &[f64], pairs: &[(f64, f64)]) -> DMatrix<f64> {
    // monic polynomial coefficients, highest degree first
    let mut c = vec![1.0];
    let mut mul = |f: &[f64]| {
        let mut out = vec![0.0; c.len() + f.len() - 1];
        for (i, a) in c.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        c = out;
    };
    for r in roots {
        mul(&[1.0, -r]);
    }
    for (re, im) in pairs {
        mul(&[1.0, -2.0 * re, re * re + im * im]);
    }
    let n = c.len() - 1;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -c[j + 1];
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m
}

#[test]
fn planted_spectra() {
    let cases: Vec<(Vec<f64>, Vec<(f64, f64)>)> = vec![
        (vec![0.5], vec![]),
        (vec![-1.0, 0.25], vec![(0.3, 0.8)]),
        (vec![-0.7, 0.1, 0.9], vec![(0.0, 1.0), (-0.4, 0.5)]),
        (vec![], vec![(0.2, 0.6), (-0.5, 0.3), (0.8, 0.9)]),
        (vec![-0.9, -0.3, 0.2, 0.6], vec![(0.1, 0.4), (-0.2, 0.7), (0.5, 0.5), (0.0, 0.9)]),
    ];
    for (roots, pairs) in cases {
        let m = companion(&roots, &pairs);
        assert!(m.nrows() <= 12);
        for mode in [RealnessMode::SchurBlocks, RealnessMode::ImagThreshold(1e-9)] {
            let mut got = real_eigenvalues(&m, mode).unwrap();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut want = roots.clone();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(got.len(), want.len(), "{mode:?} {roots:?} {pairs:?}");
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "{g} vs {w}");
            }
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let base = MCConfig::new(6, 3_000, 42);
    let ref_s = empirical_real_moments(&base, &[0, 1, 2], Some((-3.0, 3.0, 12))).unwrap();
    for workers in [4, 16] {
        let cfg = MCConfig { workers, ..base.clone() };
        let s = empirical_real_moments(&cfg, &[0, 1, 2], Some((-3.0, 3.0, 12))).unwrap();
        assert_eq!(s, ref_s);
    }
}

#[test]
fn samples_are_addressable() {
    let a = sample_ginoe(5, 1, 17);
    let b = sample_ginoe(5, 1, 17);
    let c = sample_ginoe(5, 1, 18);
    assert_eq!(a, b);
    assert_ne!(a, c);
}
