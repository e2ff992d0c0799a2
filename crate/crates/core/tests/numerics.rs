use nalgebra::DMatrix;
use orlab::numerics::{
    eig_tol, integrate, integrate_split, jacobi_eigenvalues, log_beta, min_eigenvalue, solve_lp, spectrum,
    LpProblem, LpStatus, Relation,
};
use orlab::Error;
use proptest::prelude::*;

#[test]
fn lp_bound_constrained_singleton() {
    let mut p = LpProblem::new(vec![1.0]);
    p.set_bounds(0, 0.0, 1.0);
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!(s.point[0].abs() < 1e-12);
    assert!(s.objective.abs() < 1e-12);
}

#[test]
fn lp_symmetric_cover() {
    let mut p = LpProblem::new(vec![1.0, 1.0]);
    p.add(vec![1.0, 1.0], Relation::Ge, 1.0);
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.objective - 1.0).abs() < 1e-9);
    assert!(p.max_violation(&s.point) <= 1e-9);
}

#[test]
fn lp_contradiction_has_certificate() {
    let mut p = LpProblem::new(vec![0.0]);
    p.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
    p.add(vec![1.0], Relation::Ge, 1.0);
    p.add(vec![1.0], Relation::Le, 0.0);
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Infeasible);
    let y = s.farkas.expect("certificate");
    assert!(p.farkas_holds(&y));
}

#[test]
fn lp_unbounded_is_reported() {
    let mut p = LpProblem::new(vec![-1.0]);
    p.add(vec![1.0], Relation::Ge, 0.0);
    assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn lp_dimension_mismatch_is_input_error() {
    let mut p = LpProblem::new(vec![1.0, 1.0]);
    p.add(vec![1.0], Relation::Ge, 1.0);
    assert!(matches!(solve_lp(&p), Err(Error::Input(_))));
}

#[test]
fn eigen_examples() {
    assert!((min_eigenvalue(&DMatrix::identity(3, 3)).unwrap() - 1.0).abs() < 1e-12);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
    assert!((min_eigenvalue(&d).unwrap() - 1.0).abs() < 1e-12);
    let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    assert!((min_eigenvalue(&swap).unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn eigen_rejects_asymmetric() {
    let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    assert!(matches!(min_eigenvalue(&m), Err(Error::Input(_))));
}

#[test]
fn log_beta_examples() {
    assert!(log_beta(1.0, 1.0).unwrap().abs() < 1e-15);
    for t in [0.25, 1.0, 3.5, 17.0] {
        assert!((log_beta(1.0, t).unwrap() + t.ln()).abs() < 1e-12);
    }
    let quad = integrate(|p| 1.0 / (p * (1.0 - p)).sqrt(), 1e-12).unwrap();
    assert!((log_beta(0.5, 0.5).unwrap() - quad.ln()).abs() < 1e-11);
    assert!((quad - std::f64::consts::PI).abs() < 1e-11);
    assert!(matches!(log_beta(0.0, 1.0), Err(Error::Domain(_))));
    assert!(matches!(log_beta(1.0, -2.0), Err(Error::Domain(_))));
}

#[test]
fn log_beta_integer_factorials() {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    for a in 1..=10u32 {
        for b in 1..=10u32 {
            let exact = fact(a - 1) * fact(b - 1) / fact(a + b - 1);
            let got = log_beta(f64::from(a), f64::from(b)).unwrap().exp();
            assert!((got - exact).abs() <= 1e-10, "B({a},{b})");
        }
    }
}

#[test]
fn quadrature_examples() {
    assert!((integrate(|_| 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    assert!((integrate(|p| 2.0 * (1.0 - p), 1e-12).unwrap() - 1.0).abs() < 1e-12);
    let v = integrate(|p| p.powf(-0.5) * (1.0 - p).powf(-0.5), 1e-10).unwrap();
    assert!((v - log_beta(0.5, 0.5).unwrap().exp()).abs() < 1e-10);
}

fn symmetric(n: usize, vals: &[f64]) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |i, j| vals[i * n + j]);
    (&g + g.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_weak_duality(
        m in 1usize..6,
        n in 1usize..6,
        seed in proptest::collection::vec(0.0f64..1.0, 72),
    ) {
        // minimize cᵀx s.t. Ax ≥ b, x ≥ 0 with A, c > 0 so the problem is
        // feasible and bounded.
        let c: Vec<f64> = (0..n).map(|j| 0.1 + seed[j]).collect();
        let mut p = LpProblem::new(c.clone());
        let mut rows = Vec::new();
        for i in 0..m {
            let row: Vec<f64> = (0..n).map(|j| 0.05 + seed[6 + i * 6 + j]).collect();
            let rhs = seed[42 + i] * 2.0 - 0.5;
            p.add(row.clone(), Relation::Ge, rhs);
            rows.push((row, rhs));
        }
        let s = solve_lp(&p).unwrap();
        prop_assert_eq!(s.status, LpStatus::Optimal);
        prop_assert!(p.max_violation(&s.point) <= 1e-9);
        let y = &s.duals;
        prop_assert!(y.iter().all(|&v| v >= -1e-12));
        for j in 0..n {
            let aty: f64 = rows.iter().zip(y).map(|((r, _), yi)| r[j] * yi).sum();
            prop_assert!(c[j] - aty >= -1e-8);
        }
        let dual: f64 = rows.iter().zip(y).map(|((_, b), yi)| b * yi).sum();
        prop_assert!(s.objective >= dual - 1e-8);
        prop_assert!((s.objective - dual).abs() <= 1e-7);
    }

    #[test]
    fn gram_matrices_are_psd(
        n in 1usize..12,
        k in 1usize..6,
        vals in proptest::collection::vec(-3.0f64..3.0, 72),
    ) {
        let g = DMatrix::from_fn(k, n, |i, j| vals[(i * 12 + j) % 72]);
        let gram = g.transpose() * &g;
        prop_assert!(min_eigenvalue(&gram).unwrap() >= -eig_tol(&gram));
    }

    #[test]
    fn log_beta_symmetric(a in 1e-3f64..50.0, b in 1e-3f64..50.0) {
        prop_assert_eq!(log_beta(a, b).unwrap(), log_beta(b, a).unwrap());
    }

    #[test]
    fn jacobi_agrees_with_library(
        n in 1usize..9,
        vals in proptest::collection::vec(-5.0f64..5.0, 64),
    ) {
        let m = symmetric(n, &vals);
        let lib = spectrum(&m).unwrap().eigenvalues;
        let mut jac = jacobi_eigenvalues(&m).unwrap();
        jac.sort_by(f64::total_cmp);
        prop_assert_eq!(lib.len(), n);
        for (a, b) in lib.iter().zip(&jac) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn beta_integral_matches_closed_form(a in 1.0f64..6.0, b in 1.0f64..6.0) {
        let q = integrate(|p| p.powf(a - 1.0) * (1.0 - p).powf(b - 1.0), 1e-12).unwrap();
        let exact = log_beta(a, b).unwrap().exp();
        prop_assert!((q - exact).abs() <= 1e-10);
    }

    #[test]
    fn singular_beta_integral(a in 0.5f64..1.0, b in 0.5f64..1.0) {
        let q = integrate_split(|p, q| p.powf(a - 1.0) * q.powf(b - 1.0), 1e-12).unwrap();
        let exact = log_beta(a, b).unwrap().exp();
        prop_assert!((q - exact).abs() <= 1e-10);
        // The one-argument form only sees `p`, so `1 − p` keeps absolute
        // precision near 1 and the reachable accuracy is about ε^b.
        let coarse = integrate(|p| p.powf(a - 1.0) * (1.0 - p).powf(b - 1.0), 1e-7).unwrap();
        prop_assert!((coarse - exact).abs() <= 1e-6);
    }
}
