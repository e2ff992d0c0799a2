use orlab::interp::{
    bounded_corpus, build_basis, build_p, check_bounded, check_coeff_bounds, eval_p, grid,
    grid_kronecker_deviation, random_poly, MAX_GRID,
};
use orlab::poly::MultiPoly;
use orlab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binom(n: usize, k: usize) -> usize {
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn grid_sizes_and_guards() {
    for n in 1..=5 {
        for d in 1..=5 {
            let g = grid(n, d).unwrap();
            assert_eq!(g.len(), binom(n + d, d), "n={n} d={d}");
            assert!(g.iter().all(|p| p.level() as usize <= d));
            assert!(g.windows(2).all(|w| w[0].level() <= w[1].level()));
        }
    }
    assert!(matches!(grid(0, 3), Err(Error::Input(_))));
    assert!(matches!(grid(3, 0), Err(Error::Input(_))));
    assert!(binom(8 + 8, 8) > MAX_GRID);
    assert!(matches!(grid(8, 8), Err(Error::Resource(_))));
}

#[test]
fn factored_matches_expanded() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, d) in [(1, 4), (2, 3), (3, 3), (4, 2)] {
        let basis = build_basis(n, d).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..1.5)).collect();
            for (alpha, p) in basis.points.iter().zip(&basis.basis) {
                let a = eval_p(alpha, &x).unwrap();
                let b = p.evaluate(&x).unwrap();
                assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "n={n} d={d} α={alpha:?}");
            }
        }
    }
    let alpha = &grid(2, 2).unwrap()[0];
    assert!(matches!(eval_p(alpha, &[0.1]), Err(Error::Input(_))));
}

#[test]
fn basis_is_a_partition_of_unity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, d) in [(1, 6), (2, 4), (3, 3), (5, 2)] {
        let basis = build_basis(n, d).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = basis.basis.iter().map(|p| p.evaluate(&x).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn kronecker_on_small_grids() {
    // Both evaluation routes while the expanded coefficients are exact enough.
    for n in 1..=6 {
        for d in 1..=9 {
            if binom(n + d, d) > 500 {
                break;
            }
            assert!(grid_kronecker_deviation(n, d).unwrap() <= 1e-9, "n={n} d={d}");
            let dev = build_basis(n, d).unwrap().kronecker_deviation();
            assert!(dev <= 1e-9, "expanded n={n} d={d}: {dev:e}");
        }
    }
    // The product formula keeps working where the expansion cannot.
    assert_eq!(grid_kronecker_deviation(1, 499).unwrap(), 0.0);
    assert_eq!(grid_kronecker_deviation(2, 30).unwrap(), 0.0);
    assert!(matches!(build_basis(1, 40), Err(Error::Resource(_))));
}

#[test]
fn interpolation_reproduces_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shapes = [(1, 5), (2, 3), (3, 2), (2, 4), (4, 2)];
    for i in 0..50 {
        let (n, d) = shapes[i % shapes.len()];
        let basis = build_basis(n, d).unwrap();
        let r = random_poly(n, d, &mut rng);
        let back = basis.interpolate(&r).unwrap();
        let diff = back.sub(&r).unwrap();
        assert!(diff.coeff_max() <= 1e-7, "n={n} d={d}: {}", diff.coeff_max());
    }
}

#[test]
fn corpus_satisfies_every_bound() {
    let mut total = 0;
    for n in 1..=6usize {
        for d in 1..=(8 - n).min(4) {
            let corpus = bounded_corpus(n, d, 10, 17 + (n * 10 + d) as u64).unwrap();
            for p in &corpus {
                let r = check_coeff_bounds(p, n, d).unwrap();
                assert!(r.violations.is_empty(), "n={n} d={d}: {:?}", r.violations);
                assert!(r.max_coordinate <= 1.0 + 1e-7);
                assert!(r.bound_prop <= r.bound_grid);
                total += 1;
            }
        }
    }
    assert!(total >= 100);
}

#[test]
fn unbounded_input_is_rejected() {
    let p = MultiPoly::var(2, 0).scale(3.0);
    assert!(matches!(check_bounded(&p), Err(Error::Precondition(_))));
    assert!(matches!(check_coeff_bounds(&p, 2, 1), Err(Error::Precondition(_))));
    // T_2(2x−1) stays in [−1, 1].
    let x = MultiPoly::var(1, 0);
    let t2 = MultiPoly::from_terms(1, [(vec![2], 8.0), (vec![1], -8.0), (vec![0], 1.0)]).unwrap();
    check_bounded(&t2).unwrap();
    assert!(matches!(check_coeff_bounds(&x, 1, 0), Err(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interpolator_vanishes_off_its_point(n in 1usize..4, d in 1usize..5, pick in any::<u64>()) {
        let pts = grid(n, d).unwrap();
        let a = (pick as usize) % pts.len();
        let p = build_p(&pts[a], n, d).unwrap();
        prop_assert!(p.degree().unwrap_or(0) as usize <= d);
        for (b, beta) in pts.iter().enumerate() {
            let v = p.evaluate(&beta.to_f64()).unwrap();
            let target = if a == b { 1.0 } else { 0.0 };
            prop_assert!((v - target).abs() <= 1e-10);
        }
    }
}
