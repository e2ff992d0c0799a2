use std::f64::consts::PI;

use orlab::adversary::{
    build_witness, entry_exponents, quadrature_crosscheck, verify, witness_report, TOL_CONSTRAINT,
    TOL_PSD,
};
use orlab::numerics::{integrate_split, min_eigenvalue};
use orlab::Error;
use proptest::prelude::*;

#[test]
fn witness_invariants_up_to_eight() {
    for n in 1..=8 {
        let w = build_witness(n).unwrap();
        let r = verify(&w, TOL_PSD, TOL_CONSTRAINT).unwrap();
        assert!(r.psd_ok, "n={n}: λ_min/‖X‖ = {:e}", r.min_eig_relative);
        assert!(r.constraint_ok, "n={n}: {:e}", r.max_constraint_dev);
        assert!(r.objective <= PI * (n as f64).sqrt() + 1e-8);
        assert!(r.diagonal_dev <= 1e-8, "n={n}: {:e}", r.diagonal_dev);
        let ratio = r.objective / (n as f64).sqrt();
        assert!((PI / 2.0..=PI + 1e-9).contains(&ratio));
    }
}

#[test]
fn constraints_from_dense_matrices() {
    // Rebuilds the feasibility sums from the full matrices rather than the
    // support blocks.
    for n in 1..=4 {
        let w = build_witness(n).unwrap();
        let dim = w.dim();
        let dense: Vec<_> = (0..dim).map(|s| w.dense(s)).collect();
        for m in &dense {
            assert!((m - m.transpose()).abs().max() < 1e-14);
            assert!(min_eigenvalue(m).unwrap() >= -1e-10);
        }
        for x in 0..dim {
            for y in 0..dim {
                if x == y {
                    continue;
                }
                let sum: f64 = (0..dim)
                    .filter(|s| (s & x).count_ones() + (s & y).count_ones() == 1)
                    .map(|s| dense[s][(x, y)])
                    .sum();
                assert!((sum - 1.0).abs() <= 1e-9, "n={n} x={x} y={y}: {sum}");
            }
        }
    }
}

#[test]
fn one_variable_entries() {
    let e = entry_exponents(1, 1, 0, 0).unwrap();
    assert!((e.integral().unwrap() - PI / 4.0).abs() < 1e-14);
    // x = 0 and x′ = 1 are separated only by S = {1}: ∫ (1−p)^{−1/2} / 2 = 1.
    let w = build_witness(1).unwrap();
    assert!((w.entry(1, 0, 1) - 1.0).abs() < 1e-12);
    assert_eq!(w.entry(0, 0, 1), w.entry(0, 1, 0));
}

#[test]
fn quadrature_agrees_with_closed_form() {
    let w = build_witness(1).unwrap();
    assert!(quadrature_crosscheck(&w, usize::MAX, 0).unwrap() <= 1e-7);
    let w = build_witness(3).unwrap();
    assert!(quadrature_crosscheck(&w, 100, 9).unwrap() <= 1e-7);
    let r = witness_report(2, 64, 1).unwrap();
    assert!(r.quadrature_dev.unwrap() <= 1e-7);
    assert!(witness_report(7, 10, 1).unwrap().quadrature_dev.is_none());
    let w = build_witness(7).unwrap();
    assert!(matches!(quadrature_crosscheck(&w, 10, 0), Err(Error::Resource(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beta_integrals_match_quadrature(n in 1usize..7, s in any::<u64>(), x in any::<u64>(), y in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (s, x, y) = ((s & mask) as usize, (x & mask) as usize, (y & mask) as usize);
        if let Some(e) = entry_exponents(n, s, x, y) {
            let closed = e.integral().unwrap();
            let numeric = integrate_split(|p, q| e.eval_split(p, q), 1e-12).unwrap();
            prop_assert!((closed - numeric).abs() <= 1e-7 * closed.abs().max(1.0));
        }
    }
}
