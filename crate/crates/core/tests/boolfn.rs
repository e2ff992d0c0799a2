use orlab::boolfn::{
    build_named, compose, named_profile, paturi_break, restrict_block, Named, PartialFn,
    SymmetricSpec,
};
use orlab::Error;
use proptest::prelude::*;

fn table(s: &str) -> Vec<Option<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

fn named(name: Named, n: usize) -> PartialFn {
    build_named(name, n).unwrap()
}

#[test]
fn named_examples() {
    assert_eq!(named(Named::Or, 2).table(), table("0111").as_slice());
    assert_eq!(named(Named::PrOr, 2).table(), table("011*").as_slice());
    let th = named(Named::PrTh(1), 3);
    for x in 0..8usize {
        let expect = match x.count_ones() {
            1 => Some(false),
            2 => Some(true),
            _ => None,
        };
        assert_eq!(th.value(x), expect, "input {x:03b}");
    }
    assert!(matches!(build_named(Named::PrTh(3), 3), Err(Error::Input(_))));
    assert!(build_named(Named::Or, 0).is_err());
}

#[test]
fn every_named_function_is_well_formed() {
    let names = [
        Named::Or,
        Named::And,
        Named::Xor,
        Named::Nand,
        Named::Maj,
        Named::PrOr,
    ];
    for n in 1..=10 {
        for name in names {
            let f = named(name, n);
            assert_eq!(f.table().len(), 1 << n);
            assert!(f.domain_size() > 0);
        }
        for k in 0..n {
            let f = named(Named::PrTh(k), n);
            assert_eq!(f.table().len(), 1 << n);
            assert!(f.domain_size() > 0);
        }
    }
}

#[test]
fn compose_examples() {
    let id = named(Named::Id, 1);
    let or2 = named(Named::Or, 2);
    assert_eq!(compose(&or2, &[id.clone(), id]).unwrap().table(), or2.table());

    let x2 = named(Named::Xor, 2);
    let x4 = compose(&x2, &[x2.clone(), x2.clone()]).unwrap();
    assert_eq!(x4.table(), named(Named::Xor, 4).table());

    let and2 = named(Named::And, 2);
    let pr = compose(&named(Named::PrOr, 2), &[and2.clone(), and2]).unwrap();
    assert_eq!(pr.value(0b0000), Some(false));
    assert_eq!(pr.value(0b1111), None);
}

#[test]
fn compose_guards_arity() {
    let or3 = named(Named::Or, 3);
    let big = named(Named::Or, 7);
    assert!(matches!(
        compose(&or3, &[big.clone(), big.clone(), big]),
        Err(Error::Resource(_))
    ));
}

#[test]
fn restrict_examples() {
    let and2 = named(Named::And, 2);
    let f = compose(&named(Named::Or, 2), &[and2.clone(), and2.clone()]).unwrap();
    assert_eq!(restrict_block(&f, 1, 0b00).unwrap().table(), and2.table());

    let maj3 = named(Named::Maj, 3);
    let g = compose(&named(Named::Xor, 2), &[maj3.clone(), maj3.clone()]).unwrap();
    let r = restrict_block(&g, 1, 0b111).unwrap();
    assert_eq!(r.table(), maj3.negate_output().table());

    let p = compose(&named(Named::PrOr, 2), &[and2.clone(), and2.clone()]).unwrap();
    let r = restrict_block(&p, 1, 0b00).unwrap();
    let pr1 = compose(&named(Named::PrOr, 1), &[and2.clone()]).unwrap();
    assert_eq!(r.table(), pr1.table());
    assert_eq!(r.table(), and2.table());

    assert!(matches!(restrict_block(&f, 2, 0), Err(Error::Input(_))));
    assert!(matches!(restrict_block(&f, 0, 4), Err(Error::Input(_))));
}

#[test]
fn paturi_examples() {
    let spec = |name, n| named_profile(name, n).unwrap();
    assert_eq!(paturi_break(&spec(Named::Maj, 5)).unwrap(), 2);
    assert_eq!(paturi_break(&spec(Named::Or, 6)).unwrap(), 1);
    assert_eq!(paturi_break(&spec(Named::Xor, 4)).unwrap(), 2);
    let constant = SymmetricSpec::new(vec![Some(true); 4]).unwrap();
    assert!(matches!(paturi_break(&constant), Err(Error::Domain(_))));
}

#[test]
fn text_round_trip() {
    for f in [
        named(Named::PrTh(2), 5),
        named(Named::Maj, 4),
        compose(&named(Named::PrOr, 2), &[named(Named::And, 2), named(Named::Xor, 2)]).unwrap(),
    ] {
        let back = PartialFn::from_text(&f.to_text()).unwrap();
        assert_eq!(back.table(), f.table());
        assert_eq!(back.arity(), f.arity());
    }
    assert!(PartialFn::from_text("arity=2\n01\n").is_err());
    assert!(PartialFn::from_text("arity=1\n0x\n").is_err());
}

fn total_fn(arity: usize, bits: u64) -> PartialFn {
    PartialFn::from_fn(arity, "r", |x| Some(bits >> x & 1 == 1)).unwrap()
}

fn partial_fn(arity: usize, bits: u64, mask: u64) -> PartialFn {
    let mut t: Vec<Option<bool>> = (0..1usize << arity)
        .map(|x| (mask >> x & 1 == 1).then_some(bits >> x & 1 == 1))
        .collect();
    t[0] = Some(bits & 1 == 1);
    PartialFn::from_table(arity, t, "r").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn or_composition_is_associative(
        a in 1usize..4,
        b in 1usize..3,
        m in 1usize..3,
        bits in any::<u64>(),
    ) {
        prop_assume!(a * b * m <= 12);
        let f = total_fn(m, bits);
        let fs = vec![f.clone(); b];
        let inner = compose(&named(Named::Or, b), &fs).unwrap();
        let nested = compose(&named(Named::Or, a), &vec![inner; a]).unwrap();
        let flat = compose(&named(Named::Or, a * b), &vec![f; a * b]).unwrap();
        prop_assert_eq!(nested.table(), flat.table());
    }

    #[test]
    fn compose_is_pointwise(
        n in 1usize..4,
        arities in proptest::collection::vec(1usize..5, 3),
        bits in proptest::collection::vec(any::<u64>(), 4),
        masks in proptest::collection::vec(any::<u64>(), 4),
    ) {
        let arities = &arities[..n];
        prop_assume!(arities.iter().sum::<usize>() <= 12);
        let g = partial_fn(n, bits[3], masks[3]);
        let fs: Vec<PartialFn> = arities
            .iter()
            .enumerate()
            .map(|(i, &m)| partial_fn(m, bits[i], masks[i]))
            .collect();
        let Ok(h) = compose(&g, &fs) else {
            // Only an everywhere-undefined result may be rejected.
            return Ok(());
        };
        let total: usize = arities.iter().sum();
        for x in 0..1usize << total {
            let mut shift = total;
            let mut outer = Some(0usize);
            for (f, &m) in fs.iter().zip(arities) {
                shift -= m;
                let part = (x >> shift) & ((1 << m) - 1);
                outer = match (outer, f.value(part)) {
                    (Some(o), Some(v)) => Some(o << 1 | v as usize),
                    _ => None,
                };
            }
            let expect = outer.and_then(|o| g.value(o));
            prop_assert_eq!(h.value(x), expect);
        }
    }

    #[test]
    fn text_format_round_trips(arity in 1usize..7, bits in any::<u64>(), mask in any::<u64>()) {
        let f = partial_fn(arity, bits, mask);
        let back = PartialFn::from_text(&f.to_text()).unwrap();
        prop_assert_eq!(back.table(), f.table());
    }
}
