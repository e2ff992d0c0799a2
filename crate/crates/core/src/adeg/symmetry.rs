//! Orbits of points and monomials under block symmetries.
//!
//! A symmetry is a list of contiguous blocks; variables may be permuted
//! freely within a block and, when the blocks are interchangeable, whole
//! blocks may be swapped. Both points `x ∈ {0,1}^m` and monomials `x^T` are
//! classified by the per-block weights of `x` (resp. `T`), sorted when the
//! blocks are interchangeable.

use std::collections::HashMap;

use crate::boolfn::{PartialFn, Symmetry};
use crate::error::{input, Result};

pub(crate) type Key = Vec<u8>;

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Checks that `sym` describes `m` variables and is internally consistent.
pub fn validate_layout(sym: &Symmetry, m: usize) -> Result<()> {
    if sym.blocks.iter().sum::<usize>() != m || sym.blocks.contains(&0) {
        return input(format!("block layout {:?} does not cover {m} variables", sym.blocks));
    }
    if sym.interchangeable && sym.blocks.windows(2).any(|w| w[0] != w[1]) {
        return input("interchangeable blocks must have equal sizes");
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub m: usize,
    pub sym: Symmetry,
    /// `(shift, mask)` per block for extracting its bits from an index.
    spans: Vec<(usize, usize)>,
}

impl Layout {
    pub fn new(sym: Symmetry, m: usize) -> Result<Layout> {
        validate_layout(&sym, m)?;
        let mut spans = Vec::with_capacity(sym.blocks.len());
        let mut used = 0;
        for &b in &sym.blocks {
            used += b;
            spans.push((m - used, (1usize << b) - 1));
        }
        Ok(Layout { m, sym, spans })
    }

    /// Unsorted per-block weights of `x`.
    pub fn weights(&self, x: usize) -> Key {
        self.spans
            .iter()
            .map(|&(shift, mask)| ((x >> shift) & mask).count_ones() as u8)
            .collect()
    }

    pub fn key(&self, x: usize) -> Key {
        let mut w = self.weights(x);
        if self.sym.interchangeable {
            w.sort_unstable_by(|a, b| b.cmp(a));
        }
        w
    }

    /// Monomial orbit keys of total degree ≤ d, in a fixed order (by degree,
    /// then lexicographically).
    pub fn monomial_keys(&self, d: usize) -> Vec<Key> {
        let blocks = &self.sym.blocks;
        let mut out = Vec::new();
        let mut cur = vec![0u8; blocks.len()];
        fn rec(
            i: usize,
            left: usize,
            cap: u8,
            blocks: &[usize],
            interchangeable: bool,
            cur: &mut Vec<u8>,
            out: &mut Vec<Key>,
        ) {
            if i == blocks.len() {
                out.push(cur.clone());
                return;
            }
            let hi = blocks[i].min(left).min(cap as usize);
            for t in 0..=hi {
                cur[i] = t as u8;
                let next_cap = if interchangeable { t as u8 } else { u8::MAX };
                rec(i + 1, left - t, next_cap, blocks, interchangeable, cur, out);
            }
        }
        rec(0, d, u8::MAX, blocks, self.sym.interchangeable, &mut cur, &mut out);
        out.sort_by(|a, b| {
            let da: u32 = a.iter().map(|&v| v as u32).sum();
            let db: u32 = b.iter().map(|&v| v as u32).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        out
    }

    /// Number of monomials of orbit `t` that divide a point with unsorted
    /// block weights `w`.
    pub fn incidence(&self, t: &Key, w: &Key) -> f64 {
        let blocks_prod = |perm: &[u8]| -> f64 {
            perm.iter()
                .zip(w)
                .map(|(&ti, &wi)| binom(wi as usize, ti as usize))
                .product()
        };
        if !self.sym.interchangeable {
            return blocks_prod(t);
        }
        // Sum over distinct arrangements of the multiset t.
        let mut perm = t.clone();
        perm.sort_unstable();
        let mut total = 0.0;
        loop {
            total += blocks_prod(&perm);
            if !next_permutation(&mut perm) {
                break;
            }
        }
        total
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The point orbits of a function under a validated symmetry.
#[derive(Clone, Debug)]
pub(crate) struct PointOrbits {
    pub layout: Layout,
    /// Orbit id of every input.
    pub id_of: Vec<u32>,
    pub keys: Vec<Key>,
    /// Unsorted block weights of a representative.
    pub rep_weights: Vec<Key>,
    pub sizes: Vec<usize>,
    pub values: Vec<Option<bool>>,
}

impl PointOrbits {
    /// Builds the orbits, or returns `None` if `f` is not invariant.
    pub fn build(f: &PartialFn, sym: Symmetry) -> Result<Option<PointOrbits>> {
        let layout = Layout::new(sym, f.arity())?;
        let n = 1usize << f.arity();
        let mut index: HashMap<Key, u32> = HashMap::new();
        let mut id_of = Vec::with_capacity(n);
        let mut keys = Vec::new();
        let mut rep_weights = Vec::new();
        let mut sizes = Vec::new();
        let mut values = Vec::new();
        for x in 0..n {
            let key = layout.key(x);
            let id = match index.get(&key) {
                Some(&id) => {
                    if values[id as usize] != f.value(x) {
                        return Ok(None);
                    }
                    sizes[id as usize] += 1;
                    id
                }
                None => {
                    let id = keys.len() as u32;
                    index.insert(key.clone(), id);
                    keys.push(key);
                    rep_weights.push(layout.weights(x));
                    sizes.push(1);
                    values.push(f.value(x));
                    id
                }
            };
            id_of.push(id);
        }
        Ok(Some(PointOrbits {
            layout,
            id_of,
            keys,
            rep_weights,
            sizes,
            values,
        }))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    /// Picks the coarsest symmetry that `f` provably has: the hint if valid,
    /// else full symmetry if the table depends on weight only, else none.
    pub fn for_function(f: &PartialFn) -> Result<PointOrbits> {
        let m = f.arity();
        if let Some(hint) = f.symmetry_hint() {
            if validate_layout(hint, m).is_ok() {
                if let Some(o) = Self::build(f, hint.clone())? {
                    return Ok(o);
                }
            }
        }
        if m > 0 {
            if let Some(o) = Self::build(f, Symmetry::full(m))? {
                return Ok(o);
            }
        }
        Ok(Self::build(f, Symmetry::trivial(m))?.expect("trivial symmetry always holds"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{build_named, compose, Named};

    #[test]
    fn full_symmetry_counts() {
        let l = Layout::new(Symmetry::full(4), 4).unwrap();
        let keys = l.monomial_keys(2);
        assert_eq!(keys, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(l.incidence(&vec![2], &vec![3]), 3.0);
    }

    #[test]
    fn interchangeable_incidence() {
        let sym = Symmetry {
            blocks: vec![2, 2],
            interchangeable: true,
        };
        let l = Layout::new(sym, 4).unwrap();
        // Monomials with one variable in one block and none in the other: 4.
        // A point with weights (2, 1) is divisible by 3 of them.
        assert_eq!(l.incidence(&vec![1, 0], &vec![2, 1]), 3.0);
        assert_eq!(l.incidence(&vec![1, 1], &vec![2, 1]), 2.0);
        let keys = l.monomial_keys(4);
        assert_eq!(keys.len(), 6);
    }

    #[test]
    fn orbit_sizes_sum() {
        let or2 = build_named(Named::Or, 2).unwrap();
        let and3 = build_named(Named::And, 3).unwrap();
        let f = compose(&or2, &[and3.clone(), and3]).unwrap();
        let o = PointOrbits::for_function(&f).unwrap();
        assert_eq!(o.sizes.iter().sum::<usize>(), 64);
        assert_eq!(o.len(), 10);
    }

    #[test]
    fn invalid_hint_falls_back() {
        let f = build_named(Named::Or, 3).unwrap().flip_input(0).unwrap();
        let f = f.with_symmetry(Symmetry::full(3));
        let o = PointOrbits::for_function(&f).unwrap();
        assert_eq!(o.len(), 8);
    }
}
