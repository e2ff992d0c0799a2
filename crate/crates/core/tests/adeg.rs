use orlab::adeg::{
    approx_degree, approx_degree_with, best_error, best_error_with, composition_sweep,
    cube_values, dual_witness, AdegOptions, FnSpec, SweepEntry, DEFAULT_EPSILON, TIE_TOL,
};
use orlab::boolfn::{build_named, compose, restrict_block, Named, PartialFn};
use orlab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = DEFAULT_EPSILON;

fn named(name: Named, n: usize) -> PartialFn {
    build_named(name, n).unwrap()
}

fn adeg(f: &PartialFn) -> usize {
    approx_degree(f, EPS).unwrap().degree
}

/// Checks the result invariants and returns the degree.
fn checked_adeg(f: &PartialFn, eps: f64, opts: &AdegOptions) -> usize {
    let r = approx_degree_with(f, eps, opts).unwrap();
    assert!(r.witness.is_multilinear());
    assert!(r.witness.degree().unwrap_or(0) as usize <= r.degree);
    let vals = cube_values(&r.witness, f.arity());
    for x in f.domain() {
        let target = if f.value(x) == Some(true) { 1.0 } else { 0.0 };
        assert!((vals[x] - target).abs() <= eps + TIE_TOL + 1e-9, "{}", f.name());
    }
    if opts.bounded {
        assert!(vals.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)), "{}", f.name());
    }
    for w in r.errors_by_degree.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{}: ε* not monotone", f.name());
    }
    r.degree
}

#[test]
fn best_error_examples() {
    let zero = PartialFn::from_table(2, vec![Some(false); 4], "ZERO").unwrap();
    assert!(best_error(&zero, 0).unwrap().epsilon.abs() < 1e-9);

    // Bounded: the (x₁+x₂)/2 − 1/4 line dips below 0 at 00, so the bounded
    // program settles at 1/3; without the box it is 1/4.
    let and2 = named(Named::And, 2);
    assert!((best_error(&and2, 1).unwrap().epsilon - 1.0 / 3.0).abs() < 1e-9);
    let free = best_error_with(&and2, 1, &AdegOptions::unbounded()).unwrap();
    assert!((free.epsilon - 0.25).abs() < 1e-9);

    let xor2 = named(Named::Xor, 2);
    assert!((best_error(&xor2, 1).unwrap().epsilon - 0.5).abs() < 1e-9);
}

#[test]
fn approx_degree_examples() {
    assert_eq!(adeg(&named(Named::Id, 1)), 1);
    assert_eq!(adeg(&named(Named::Or, 1)), 1);
    assert_eq!(adeg(&named(Named::And, 2)), 1);
    let pr4 = named(Named::PrOr, 4);
    let bounded = approx_degree(&pr4, EPS).unwrap().degree;
    let free = approx_degree_with(&pr4, EPS, &AdegOptions::unbounded()).unwrap();
    assert_eq!(free.degree, 1);
    assert!(bounded > free.degree);
}

#[test]
fn or_golden_values() {
    let golden = [1, 1, 2, 2, 2, 2, 3, 3, 3, 3];
    for (n, &want) in (1..=10).zip(&golden) {
        assert_eq!(adeg(&named(Named::Or, n)), want, "OR_{n}");
    }
}

#[test]
fn dual_witness_examples() {
    let xor2 = named(Named::Xor, 2);
    let c = dual_witness(&xor2, 1, EPS).unwrap();
    assert!(c.pure_high_degree());
    // Parity character up to sign: ±1/4 alternating with weight parity.
    let s = c.phi[0].signum();
    for (x, &w) in c.phi.iter().enumerate() {
        let sign = if x.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        assert!((w - s * sign * 0.25).abs() < 1e-8, "φ = {:?}", c.phi);
    }

    let zero = PartialFn::from_table(3, vec![Some(false); 8], "ZERO").unwrap();
    assert!(matches!(dual_witness(&zero, 2, EPS), Err(Error::Logic(_))));

    let or4 = named(Named::Or, 4);
    let c = dual_witness(&or4, 1, EPS).unwrap();
    assert!(c.max_moment <= 1e-8);
    let total: f64 = c.phi.iter().map(|v| v.abs()).sum();
    assert!(c.bound > EPS * total - 1e-8);
}

#[test]
fn duality_gap_is_closed() {
    let fs = [
        named(Named::Or, 5),
        named(Named::Maj, 5),
        named(Named::PrOr, 6),
        named(Named::PrTh(2), 6),
        compose(&named(Named::Or, 2), &[named(Named::And, 2), named(Named::And, 2)]).unwrap(),
    ];
    for f in &fs {
        for d in 0..f.arity() {
            for opts in [AdegOptions::default(), AdegOptions::unbounded()] {
                let b = best_error_with(f, d, &opts).unwrap();
                assert!(
                    (b.certificate.bound - b.epsilon).abs() <= 1e-6,
                    "{} d={d} bounded={}: {} vs {}",
                    f.name(),
                    opts.bounded,
                    b.certificate.bound,
                    b.epsilon
                );
                assert!((b.achieved_error - b.epsilon).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn degree_is_monotone_in_epsilon() {
    for f in [named(Named::Or, 6), named(Named::Maj, 5), named(Named::PrTh(1), 5)] {
        let mut prev = usize::MAX;
        for eps in [0.05, 0.1, 0.2, 1.0 / 3.0, 0.45] {
            let d = checked_adeg(&f, eps, &AdegOptions::default());
            assert!(d <= prev, "{} at ε = {eps}", f.name());
            prev = d;
        }
    }
}

fn negation_invariant(f: &PartialFn) {
    let d = adeg(f);
    assert_eq!(adeg(&f.negate_output()), d, "{} negated output", f.name());
    for i in 0..f.arity() {
        assert_eq!(adeg(&f.flip_input(i).unwrap()), d, "{} flipped input {i}", f.name());
    }
}

#[test]
fn negation_invariance_exhaustive_small() {
    // Every partial function on up to 2 bits, every total function on 3.
    for m in 1..=2usize {
        let size = 1usize << m;
        for code in 0..3usize.pow(size as u32) {
            let table: Vec<Option<bool>> = (0..size)
                .map(|x| match code / 3usize.pow(x as u32) % 3 {
                    0 => Some(false),
                    1 => Some(true),
                    _ => None,
                })
                .collect();
            if let Ok(f) = PartialFn::from_table(m, table, "f") {
                negation_invariant(&f);
            }
        }
    }
    for bits in 0..256u32 {
        let f = PartialFn::from_fn(3, "f", |x| Some(bits >> x & 1 == 1)).unwrap();
        negation_invariant(&f);
    }
}

#[test]
fn negation_invariance_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in 4..=6usize {
        for _ in 0..6 {
            let table: Vec<Option<bool>> = (0..1usize << m)
                .map(|_| match rng.random_range(0..4) {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                })
                .collect();
            let mut table = table;
            table[0] = Some(false);
            let f = PartialFn::from_table(m, table, "f").unwrap();
            negation_invariant(&f);
        }
    }
    for f in [named(Named::PrOr, 6), named(Named::PrTh(2), 5), named(Named::Maj, 6)] {
        negation_invariant(&f);
    }
}

#[test]
fn sub_function_monotonicity() {
    // PrTH^k_n restricts to PrTH^{k-1}_{n-1} by fixing one bit to 1 and to
    // PrTH^k_{n-1} by fixing one bit to 0.
    for n in 2..=8usize {
        for k in 0..n {
            let f = named(Named::PrTh(k), n);
            let d = adeg(&f);
            if k + 1 < n {
                let fixed0 = PartialFn::from_fn(n - 1, "r0", |y| f.value(y)).unwrap();
                assert_eq!(fixed0.table(), named(Named::PrTh(k), n - 1).table());
                assert!(adeg(&fixed0) <= d, "PrTH{k}_{n} vs PrTH{k}_{}", n - 1);
            }
            if k >= 1 {
                let fixed1 =
                    PartialFn::from_fn(n - 1, "r1", |y| f.value(y | 1 << (n - 1))).unwrap();
                assert_eq!(fixed1.table(), named(Named::PrTh(k - 1), n - 1).table());
                assert!(adeg(&fixed1) <= d);
            }
        }
    }
    // PrOR_n contains PrOR_{n-1}, and block restrictions of compositions are
    // sub-functions.
    for n in 2..=8 {
        assert!(adeg(&named(Named::PrOr, n - 1)) <= adeg(&named(Named::PrOr, n)));
    }
    let and2 = named(Named::And, 2);
    let f = compose(&named(Named::PrOr, 3), &[and2.clone(), and2.clone(), and2]).unwrap();
    let r = restrict_block(&f, 2, 0).unwrap();
    assert!(adeg(&r) <= adeg(&f));
}

#[test]
fn symmetric_reduction_matches_general_lp() {
    let general = AdegOptions {
        no_symmetry: true,
        ..Default::default()
    };
    let mut fs = vec![];
    for n in 1..=8 {
        fs.push(named(Named::Or, n));
        fs.push(named(Named::Maj, n));
        fs.push(named(Named::Xor, n.min(6)));
    }
    fs.push(named(Named::Or, 10));
    fs.push(named(Named::Maj, 9));
    for f in &fs {
        for bounded in [true, false] {
            let sym = AdegOptions {
                bounded,
                no_symmetry: false,
            };
            let gen = AdegOptions { bounded, ..general };
            assert_eq!(
                approx_degree_with(f, EPS, &sym).unwrap().degree,
                approx_degree_with(f, EPS, &gen).unwrap().degree,
                "{} bounded={bounded}",
                f.name()
            );
        }
    }
}

#[test]
fn parity_needs_full_degree() {
    for n in 1..=8 {
        let f = named(Named::Xor, n);
        assert_eq!(checked_adeg(&f, EPS, &AdegOptions::default()), n);
        let c = dual_witness(&f, n - 1, EPS).unwrap();
        assert!(c.pure_high_degree());
    }
}

#[test]
fn sweep_rows_are_ordered_and_complete() {
    let label = |s: &str| FnSpec::Label(s.into());
    let entries = vec![
        SweepEntry {
            outer: label("OR_2"),
            inner: vec![label("AND_2"), label("XOR_2")],
            epsilon: EPS,
        },
        SweepEntry {
            outer: label("XOR_3"),
            inner: vec![label("AND_2"); 3],
            epsilon: EPS,
        },
        SweepEntry {
            outer: label("OR_8"),
            inner: vec![label("AND_2"); 8],
            epsilon: EPS,
        },
    ];
    let rows = composition_sweep(&entries).unwrap();
    assert_eq!(rows.len(), 3);
    let direct = compose(
        &named(Named::Or, 2),
        &[named(Named::And, 2), named(Named::Xor, 2)],
    )
    .unwrap();
    assert_eq!(rows[0].adeg_composed, Some(adeg(&direct)));
    assert_eq!(rows[0].adeg_inner, vec![Some(1), Some(2)]);
    assert_eq!(rows[1].adeg_composed, Some(4));
    // Arity 16 exceeds the budget and is reported, not solved.
    assert_eq!(rows[2].adeg_composed, None);
    assert!(rows[2].notice.is_some());
}
