//! Total and partial Boolean functions as truth tables.
//!
//! Inputs are ordered lexicographically with the leftmost bit most
//! significant: input index `idx` has `x_i = (idx >> (m - 1 - i)) & 1`.
//! Composition concatenates blocks left to right, so block 0 occupies the
//! most significant bits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Largest arity accepted anywhere in this module.
pub const MAX_ARITY: usize = 20;

/// Block layout and symmetry hint carried by composed or named functions.
///
/// The hint claims that the function is invariant under permuting variables
/// within each block, and, when `interchangeable` is set, under permuting
/// whole blocks of equal size. Consumers validate it before relying on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetry {
    pub blocks: Vec<usize>,
    pub interchangeable: bool,
}

impl Symmetry {
    pub fn trivial(m: usize) -> Self {
        Symmetry {
            blocks: vec![1; m],
            interchangeable: false,
        }
    }

    pub fn full(m: usize) -> Self {
        Symmetry {
            blocks: vec![m],
            interchangeable: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFn {
    arity: usize,
    table: Vec<Option<bool>>,
    name: String,
    /// Arities of the inner blocks when produced by [`compose`].
    blocks: Option<Vec<usize>>,
    symmetry: Option<Symmetry>,
}

/// Bit `i` (0 = leftmost) of input `idx` in an `m`-bit space.
#[inline]
pub fn bit(idx: usize, m: usize, i: usize) -> bool {
    (idx >> (m - 1 - i)) & 1 == 1
}

impl PartialFn {
    /// Builds a function from a full table. Rejects wrong lengths, arity above
    /// [`MAX_ARITY`] and the everywhere-undefined function.
    pub fn from_table(arity: usize, table: Vec<Option<bool>>, name: impl Into<String>) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(Error::Resource(format!("arity {arity} exceeds {MAX_ARITY}")));
        }
        if table.len() != 1usize << arity {
            return input(format!(
                "table has {} entries, arity {arity} needs {}",
                table.len(),
                1usize << arity
            ));
        }
        if table.iter().all(|v| v.is_none()) {
            return input("function is undefined everywhere");
        }
        Ok(PartialFn {
            arity,
            table,
            name: name.into(),
            blocks: None,
            symmetry: None,
        })
    }

    /// Builds a function from its value on each input.
    pub fn from_fn(arity: usize, name: impl Into<String>, f: impl Fn(usize) -> Option<bool>) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(Error::Resource(format!("arity {arity} exceeds {MAX_ARITY}")));
        }
        Self::from_table(arity, (0..1usize << arity).map(f).collect(), name)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Option<bool>] {
        &self.table
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn blocks(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    pub fn symmetry_hint(&self) -> Option<&Symmetry> {
        self.symmetry.as_ref()
    }

    pub fn with_symmetry(mut self, sym: Symmetry) -> Self {
        self.symmetry = Some(sym);
        self
    }

    pub fn value(&self, idx: usize) -> Option<bool> {
        self.table[idx]
    }

    /// Indices of inputs in the domain.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.table.len()).filter(|&i| self.table[i].is_some())
    }

    pub fn domain_size(&self) -> usize {
        self.table.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(|v| v.is_some())
    }

    /// True when the value depends only on the Hamming weight.
    pub fn is_symmetric(&self) -> bool {
        let mut by_weight: Vec<Option<Option<bool>>> = vec![None; self.arity + 1];
        for (idx, v) in self.table.iter().enumerate() {
            let w = idx.count_ones() as usize;
            match by_weight[w] {
                None => by_weight[w] = Some(*v),
                Some(prev) if prev != *v => return false,
                _ => {}
            }
        }
        true
    }

    pub fn negate_output(&self) -> PartialFn {
        PartialFn {
            table: self.table.iter().map(|v| v.map(|b| !b)).collect(),
            name: format!("NOT({})", self.name),
            ..self.clone()
        }
    }

    /// Flips input variable `i` (0 = leftmost).
    pub fn flip_input(&self, i: usize) -> Result<PartialFn> {
        if i >= self.arity {
            return input(format!("variable {i} out of range for arity {}", self.arity));
        }
        let mask = 1usize << (self.arity - 1 - i);
        let table = (0..self.table.len()).map(|x| self.table[x ^ mask]).collect();
        Ok(PartialFn {
            arity: self.arity,
            table,
            name: format!("{}[flip {i}]", self.name),
            blocks: self.blocks.clone(),
            symmetry: None,
        })
    }

    /// Serializes to the two-line text format.
    pub fn to_text(&self) -> String {
        let body: String = self
            .table
            .iter()
            .map(|v| match v {
                Some(false) => '0',
                Some(true) => '1',
                None => '*',
            })
            .collect();
        format!("arity={}\n{}\n", self.arity, body)
    }

    /// Parses the two-line text format.
    pub fn from_text(text: &str) -> Result<PartialFn> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Input("empty truth table".into()))?;
        let arity: usize = header
            .strip_prefix("arity=")
            .ok_or_else(|| Error::Input(format!("expected 'arity=m', got '{header}'")))?
            .trim()
            .parse()
            .map_err(|e| Error::Input(format!("bad arity: {e}")))?;
        let body = lines.next().ok_or_else(|| Error::Input("missing table line".into()))?;
        if lines.next().is_some() {
            return input("trailing content after table line");
        }
        let table = body
            .chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(Error::Input(format!("bad table character '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PartialFn::from_table(arity, table, "table")
    }
}

impl fmt::Display for PartialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Value per Hamming weight `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricSpec {
    pub n: usize,
    pub predicate: Vec<Option<bool>>,
}

impl SymmetricSpec {
    pub fn new(predicate: Vec<Option<bool>>) -> Result<Self> {
        if predicate.is_empty() {
            return input("symmetric predicate needs at least one weight");
        }
        Ok(SymmetricSpec {
            n: predicate.len() - 1,
            predicate,
        })
    }

    /// Reads the weight profile of a symmetric function.
    pub fn from_fn(f: &PartialFn) -> Result<Self> {
        if !f.is_symmetric() {
            return input(format!("{} is not symmetric", f.name()));
        }
        let n = f.arity();
        let predicate = (0..=n).map(|w| f.value((1usize << w) - 1)).collect();
        Ok(SymmetricSpec { n, predicate })
    }

    pub fn to_fn(&self, name: impl Into<String>) -> Result<PartialFn> {
        let p = &self.predicate;
        Ok(PartialFn::from_fn(self.n, name, |x| p[x.count_ones() as usize])?
            .with_symmetry(Symmetry::full(self.n)))
    }
}

/// The named families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Named {
    Or,
    And,
    Xor,
    Nand,
    Maj,
    PrOr,
    PrTh(usize),
    Id,
}

impl Named {
    fn label(&self) -> String {
        match self {
            Named::Or => "OR".into(),
            Named::And => "AND".into(),
            Named::Xor => "XOR".into(),
            Named::Nand => "NAND".into(),
            Named::Maj => "MAJ".into(),
            Named::PrOr => "PrOR".into(),
            Named::PrTh(k) => format!("PrTH{k}"),
            Named::Id => "ID".into(),
        }
    }
}

impl FromStr for Named {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        Ok(match upper.as_str() {
            "OR" => Named::Or,
            "AND" => Named::And,
            "XOR" | "PARITY" => Named::Xor,
            "NAND" => Named::Nand,
            "MAJ" | "MAJORITY" => Named::Maj,
            "PROR" => Named::PrOr,
            "ID" | "IDENTITY" => Named::Id,
            _ => {
                let rest = upper
                    .strip_prefix("PRTH")
                    .ok_or_else(|| Error::Input(format!("unknown function name '{s}'")))?;
                let k = rest.trim_start_matches('(').trim_end_matches(')');
                Named::PrTh(
                    k.parse()
                        .map_err(|_| Error::Input(format!("bad threshold in '{s}'")))?,
                )
            }
        })
    }
}

/// Weight profile of a named family on `n` bits.
pub fn named_profile(name: Named, n: usize) -> Result<SymmetricSpec> {
    if n == 0 {
        return input("arity must be at least 1");
    }
    if name == Named::Id && n != 1 {
        return input("identity has arity 1");
    }
    if let Named::PrTh(k) = name {
        if k >= n {
            return input(format!("PrTH threshold {k} must be below n = {n}"));
        }
    }
    let predicate = (0..=n)
        .map(|w| match name {
            Named::Or => Some(w > 0),
            Named::And => Some(w == n),
            Named::Xor => Some(w % 2 == 1),
            Named::Nand => Some(w < n),
            Named::Maj => Some(2 * w > n),
            Named::PrOr => match w {
                0 => Some(false),
                1 => Some(true),
                _ => None,
            },
            Named::PrTh(k) => {
                if w == k {
                    Some(false)
                } else if w == k + 1 {
                    Some(true)
                } else {
                    None
                }
            }
            Named::Id => Some(w == 1),
        })
        .collect();
    SymmetricSpec::new(predicate)
}

/// Builds a named function on `n` bits.
pub fn build_named(name: Named, n: usize) -> Result<PartialFn> {
    if n > MAX_ARITY {
        return Err(Error::Resource(format!("arity {n} exceeds {MAX_ARITY}")));
    }
    named_profile(name, n)?.to_fn(format!("{}_{n}", name.label()))
}

/// Parses labels such as `OR_3`, `PrTH1_4`, `PrTH(1)_4` or `ID`.
pub fn parse_named(label: &str) -> Result<PartialFn> {
    let label = label.trim();
    match label.rsplit_once('_') {
        Some((name, n)) => {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Input(format!("bad arity in '{label}'")))?;
            build_named(name.parse()?, n)
        }
        None if label.eq_ignore_ascii_case("id") => build_named(Named::Id, 1),
        None => input(format!("expected NAME_n, got '{label}'")),
    }
}

/// `g ∘ (f_1, …, f_n)`.
pub fn compose(g: &PartialFn, fs: &[PartialFn]) -> Result<PartialFn> {
    if fs.len() != g.arity() {
        return input(format!(
            "outer function has arity {}, got {} inner functions",
            g.arity(),
            fs.len()
        ));
    }
    let arities: Vec<usize> = fs.iter().map(|f| f.arity()).collect();
    let total: usize = arities.iter().sum();
    if total > MAX_ARITY {
        return Err(Error::Resource(format!(
            "composed arity {total} exceeds {MAX_ARITY}"
        )));
    }
    let shifts: Vec<usize> = (0..fs.len())
        .map(|i| arities[i + 1..].iter().sum())
        .collect();
    let n = fs.len();
    let table: Vec<Option<bool>> = (0..1usize << total)
        .map(|x| {
            let mut outer = 0usize;
            for (i, f) in fs.iter().enumerate() {
                let part = (x >> shifts[i]) & ((1usize << arities[i]) - 1);
                match f.value(part) {
                    Some(b) => outer |= (b as usize) << (n - 1 - i),
                    None => return None,
                }
            }
            g.value(outer)
        })
        .collect();
    let name = if fs.windows(2).all(|w| w[0].name == w[1].name) && !fs.is_empty() {
        format!("{}∘{}", g.name(), fs[0].name())
    } else {
        let inner: Vec<&str> = fs.iter().map(|f| f.name()).collect();
        format!("{}∘({})", g.name(), inner.join(","))
    };
    if table.iter().all(|v| v.is_none()) {
        return input(format!("composition {name} is undefined everywhere"));
    }
    let all_sym = fs.iter().all(|f| f.is_symmetric());
    let symmetry = if all_sym {
        Symmetry {
            blocks: arities.clone(),
            interchangeable: g.is_symmetric() && fs.windows(2).all(|w| w[0].table == w[1].table),
        }
    } else {
        Symmetry::trivial(total)
    };
    Ok(PartialFn {
        arity: total,
        table,
        name,
        blocks: Some(arities),
        symmetry: Some(symmetry),
    })
}

/// Fixes block `block` (0-based) of a composed function to the inner input
/// `w` and returns the function of the remaining blocks.
pub fn restrict_block(f: &PartialFn, block: usize, w: usize) -> Result<PartialFn> {
    let blocks = f
        .blocks()
        .ok_or_else(|| Error::Input(format!("{} carries no block structure", f.name())))?;
    if block >= blocks.len() {
        return input(format!("block {block} out of range ({} blocks)", blocks.len()));
    }
    let width = blocks[block];
    if w >= 1usize << width {
        return input(format!("input {w} does not fit block of arity {width}"));
    }
    let after: usize = blocks[block + 1..].iter().sum();
    let rest = f.arity() - width;
    let low_mask = (1usize << after) - 1;
    let table: Vec<Option<bool>> = (0..1usize << rest)
        .map(|y| {
            let high = y >> after;
            let low = y & low_mask;
            let x = (high << (width + after)) | (w << after) | low;
            f.value(x)
        })
        .collect();
    let mut remaining = blocks.to_vec();
    remaining.remove(block);
    let mut out = PartialFn::from_table(rest, table, format!("{}|block{block}={w}", f.name()))?;
    out.symmetry = f.symmetry.as_ref().map(|s| {
        if s.blocks == blocks {
            Symmetry {
                blocks: remaining.clone(),
                interchangeable: s.interchangeable,
            }
        } else {
            Symmetry::trivial(rest)
        }
    });
    out.blocks = Some(remaining);
    Ok(out)
}

/// Paturi break point: the flip `g(k) ≠ g(k+1)` closest to `n/2` (ties to
/// the lower weight), folded to `k ≤ n/2`, floored at 1.
pub fn paturi_break(g: &SymmetricSpec) -> Result<usize> {
    if g.predicate.iter().any(|v| v.is_none()) {
        return input("paturi_break needs a total symmetric function");
    }
    let n = g.n;
    let flips: Vec<usize> = (0..n)
        .filter(|&k| g.predicate[k] != g.predicate[k + 1])
        .collect();
    let k = flips
        .iter()
        .copied()
        .min_by_key(|&k| ((2 * k as i64 - n as i64).abs(), k))
        .ok_or_else(|| Error::Domain("constant function has no break point".into()))?;
    let folded = if 2 * k > n { n - k } else { k };
    Ok(folded.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Vec<Option<bool>> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn named_tables() {
        assert_eq!(build_named(Named::Or, 2).unwrap().table(), t("0111").as_slice());
        assert_eq!(build_named(Named::PrOr, 2).unwrap().table(), t("011*").as_slice());
        let th = build_named(Named::PrTh(1), 3).unwrap();
        for x in 0..8usize {
            let expect = match x.count_ones() {
                1 => Some(false),
                2 => Some(true),
                _ => None,
            };
            assert_eq!(th.value(x), expect);
        }
        assert!(build_named(Named::PrTh(3), 3).is_err());
        assert_eq!(build_named(Named::Maj, 3).unwrap().table(), t("00010111").as_slice());
    }

    #[test]
    fn parse_labels() {
        assert_eq!(parse_named("PrTH(1)_3").unwrap(), parse_named("PrTH1_3").unwrap());
        assert_eq!(parse_named("or_4").unwrap().arity(), 4);
        assert!(parse_named("FOO_2").is_err());
    }

    #[test]
    fn compose_examples() {
        let id = build_named(Named::Id, 1).unwrap();
        let or2 = build_named(Named::Or, 2).unwrap();
        assert_eq!(compose(&or2, &[id.clone(), id]).unwrap().table(), or2.table());
        let x2 = build_named(Named::Xor, 2).unwrap();
        let x4 = build_named(Named::Xor, 4).unwrap();
        assert_eq!(compose(&x2, &[x2.clone(), x2.clone()]).unwrap().table(), x4.table());
        let pr = build_named(Named::PrOr, 2).unwrap();
        let and2 = build_named(Named::And, 2).unwrap();
        let c = compose(&pr, &[and2.clone(), and2]).unwrap();
        assert_eq!(c.value(0), Some(false));
        assert_eq!(c.value(15), None);
    }

    #[test]
    fn restrict_examples() {
        let or2 = build_named(Named::Or, 2).unwrap();
        let and2 = build_named(Named::And, 2).unwrap();
        let f = compose(&or2, &[and2.clone(), and2.clone()]).unwrap();
        assert_eq!(restrict_block(&f, 1, 0).unwrap().table(), and2.table());
        let pr = build_named(Named::PrOr, 2).unwrap();
        let g = compose(&pr, &[and2.clone(), and2.clone()]).unwrap();
        assert_eq!(restrict_block(&g, 1, 0).unwrap().table(), and2.table());
        let x2 = build_named(Named::Xor, 2).unwrap();
        let h = compose(&x2, &[and2.clone(), and2.clone()]).unwrap();
        assert_eq!(restrict_block(&h, 1, 3).unwrap().table(), and2.negate_output().table());
        assert!(restrict_block(&h, 2, 0).is_err());
    }

    #[test]
    fn paturi_examples() {
        let p = |name, n| paturi_break(&named_profile(name, n).unwrap()).unwrap();
        assert_eq!(p(Named::Maj, 5), 2);
        assert_eq!(p(Named::Or, 6), 1);
        assert_eq!(p(Named::Xor, 4), 2);
        assert!(matches!(
            paturi_break(&SymmetricSpec::new(vec![Some(true); 4]).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let f = build_named(Named::PrOr, 3).unwrap();
        let back = PartialFn::from_text(&f.to_text()).unwrap();
        assert_eq!(back.table(), f.table());
        assert_eq!(back.to_text(), f.to_text());
        assert!(PartialFn::from_text("arity=2\n01*").is_err());
        assert!(PartialFn::from_text("arity=1\n**").is_err());
    }

    #[test]
    fn symmetry_hints() {
        let or2 = build_named(Named::Or, 2).unwrap();
        let and3 = build_named(Named::And, 3).unwrap();
        let f = compose(&or2, &[and3.clone(), and3.clone()]).unwrap();
        assert_eq!(
            f.symmetry_hint().unwrap(),
            &Symmetry {
                blocks: vec![3, 3],
                interchangeable: true
            }
        );
    }
}
