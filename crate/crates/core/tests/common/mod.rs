//! Random instances and property checks shared by the integration tests and
//! the acceptance battery.
#![allow(dead_code)]

use orlab::gamma2::{gamma2_exact, max_abs, numerical_rank};
use orlab::numerics::DenseMatrix;
use rand::Rng;

pub fn random_matrix(rng: &mut impl Rng, max_side: usize) -> DenseMatrix {
    let (r, c) = (rng.random_range(1..=max_side), rng.random_range(1..=max_side));
    DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn random_signs(rng: &mut impl Rng, max_side: usize) -> DenseMatrix {
    let (r, c) = (rng.random_range(1..=max_side), rng.random_range(1..=max_side));
    DenseMatrix::from_fn(r, c, |_, _| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
}

pub fn g2(a: &DenseMatrix) -> f64 {
    gamma2_exact(a).unwrap().value
}

/// Worst violation of each γ2 axiom over `count` random instances, in the
/// order subadditivity, scaling, submatrix, Hadamard, tensor.
pub fn axiom_violations(rng: &mut impl Rng, count: usize) -> [f64; 5] {
    let mut worst = [0.0f64; 5];
    for _ in 0..count {
        let a = random_matrix(rng, 6);
        let b = DenseMatrix::from_fn(a.nrows(), a.ncols(), |_, _| rng.random_range(-1.0..=1.0));
        let (ga, gb) = (g2(&a), g2(&b));

        worst[0] = worst[0].max(g2(&(&a + &b)) - ga - gb);

        let lambda = rng.random_range(-3.0..3.0);
        worst[1] = worst[1].max((g2(&(&a * lambda)) - lambda.abs() * ga).abs());

        let rows: Vec<usize> = (0..a.nrows()).filter(|_| rng.random_bool(0.6)).collect();
        let cols: Vec<usize> = (0..a.ncols()).filter(|_| rng.random_bool(0.6)).collect();
        if !rows.is_empty() && !cols.is_empty() {
            let sub = DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])]);
            worst[2] = worst[2].max(g2(&sub) - ga);
        }

        worst[3] = worst[3].max(g2(&a.component_mul(&b)) - ga * gb);

        let small_a = random_matrix(rng, 3);
        let small_b = random_matrix(rng, 3);
        let t = small_a.kronecker(&small_b);
        let expect = g2(&small_a) * g2(&small_b);
        worst[4] = worst[4].max((g2(&t) - expect).abs());
    }
    worst
}

/// Worst violation of `‖A‖_∞ ≤ γ2(A) ≤ ‖A‖_∞ √rank(A)` over random sign
/// matrices up to 8×8.
pub fn sandwich_violation(rng: &mut impl Rng, count: usize) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..count {
        let a = random_signs(rng, 8);
        let g = g2(&a);
        let m = max_abs(&a);
        let rank = numerical_rank(&a, 1e-8) as f64;
        worst = worst.max(m - g).max(g - m * rank.sqrt());
    }
    worst
}
