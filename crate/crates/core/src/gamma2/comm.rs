//! Sign matrices of communication problems.
//!
//! Entry `(x, y)` is `(−1)^{1−F(x,y)}`: `+1` where `F = 1`, `−1` where
//! `F = 0`, undefined outside the promise.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::boolfn::PartialFn;
use crate::error::{input, Error, Result};
use crate::numerics::DenseMatrix;

/// Largest side length of a built sign matrix.
pub const MAX_SIDE: usize = 64;
/// Largest per-side input length for gadget compositions.
pub const MAX_GADGET_BITS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    /// Row-major; `None` marks an entry outside the promise.
    entries: Vec<Option<i8>>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Option<i8>>) -> Result<SignMatrix> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return input(format!("sign matrix needs {rows}×{cols} entries, got {}", entries.len()));
        }
        if entries.iter().flatten().any(|&s| s != 1 && s != -1) {
            return input("sign matrix entries must be ±1");
        }
        if entries.iter().all(Option::is_none) {
            return input("sign matrix has no defined entry");
        }
        Ok(SignMatrix { rows, cols, entries })
    }

    /// Sign matrix of a (partial) predicate on `rows × cols`.
    pub fn from_predicate(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> Option<bool>,
    ) -> Result<SignMatrix> {
        let entries = (0..rows * cols)
            .map(|k| f(k / cols, k % cols).map(|v| if v { 1 } else { -1 }))
            .collect();
        SignMatrix::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> Option<i8> {
        self.entries[x * self.cols + y]
    }

    pub fn is_total(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    /// Dense `±1` matrix with undefined entries set to 0.
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).map_or(0.0, f64::from)
        })
    }

    /// `rows cols` header, then one line of `+`, `-`, `*` per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(match self.get(i, j) {
                    Some(1) => '+',
                    Some(_) => '-',
                    None => '*',
                });
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<SignMatrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Input("empty sign matrix".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Input(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return input(format!("header must be `rows cols`, got {header:?}"));
        };
        let mut entries = Vec::with_capacity(rows * cols);
        for (r, line) in lines.enumerate() {
            if line.chars().count() != cols {
                return input(format!("row {r} has {} symbols, expected {cols}", line.chars().count()));
            }
            for ch in line.chars() {
                entries.push(match ch {
                    '+' => Some(1),
                    '-' => Some(-1),
                    '*' => None,
                    other => return input(format!("unexpected symbol {other:?}")),
                });
            }
        }
        if entries.len() != rows * cols {
            return input(format!("expected {rows} rows"));
        }
        SignMatrix::new(rows, cols, entries)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<SignMatrix> {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        SignMatrix::new(rows.len(), cols.len(), entries)
    }
}

impl std::fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let _ = write!(s, "{}", match self.get(i, j) {
                    Some(1) => '+',
                    Some(_) => '-',
                    None => '*',
                });
            }
            s.push('\n');
        }
        f.write_str(&s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommName {
    /// `⋁_i (x_i ∧ y_i)` on `n`-bit inputs.
    Disj,
    /// `⊕_i (x_i ∧ y_i)` on `n`-bit inputs.
    Ip,
    /// `x ≠ y` on a `k`-element set.
    NotEq,
    /// `x = y` on a `k`-element set.
    Eq,
}

impl FromStr for CommName {
    type Err = Error;

    fn from_str(s: &str) -> Result<CommName> {
        match s.to_ascii_uppercase().as_str() {
            "DISJ" => Ok(CommName::Disj),
            "IP" => Ok(CommName::Ip),
            "NOTEQ" | "NEQ" => Ok(CommName::NotEq),
            "EQ" => Ok(CommName::Eq),
            _ => input(format!("unknown communication problem {s:?}")),
        }
    }
}

/// Two-party gadget applied coordinatewise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gadget {
    And,
    Xor,
}

impl FromStr for Gadget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gadget> {
        match s.to_ascii_uppercase().trim_end_matches("^CC").trim_end_matches("CC") {
            "AND" => Ok(Gadget::And),
            "XOR" => Ok(Gadget::Xor),
            _ => input(format!("unknown gadget {s:?}")),
        }
    }
}

/// `DISJ` and `IP` take the input length `n` (matrix side `2^n`); `NOTEQ`
/// and `EQ` take the matrix side `k` directly.
pub fn build_comm(name: CommName, n: usize) -> Result<SignMatrix> {
    match name {
        CommName::Disj | CommName::Ip => {
            if n == 0 || n > MAX_GADGET_BITS {
                return Err(Error::Resource(format!(
                    "input length must lie in 1..={MAX_GADGET_BITS}, got {n}"
                )));
            }
            let side = 1usize << n;
            let parity = name == CommName::Ip;
            SignMatrix::from_predicate(side, side, |x, y| {
                let w = (x & y).count_ones();
                Some(if parity { w % 2 == 1 } else { w > 0 })
            })
        }
        CommName::NotEq | CommName::Eq => {
            if n == 0 || n > MAX_SIDE {
                return Err(Error::Resource(format!("matrix side must lie in 1..={MAX_SIDE}, got {n}")));
            }
            let neq = name == CommName::NotEq;
            SignMatrix::from_predicate(n, n, |x, y| Some((x != y) == neq))
        }
    }
}

/// `g(x_1 • y_1, …, x_n • y_n)` where `•` is the gadget. Inputs are indexed
/// like the truth table of `g`, so the gadget acts bitwise on indices.
pub fn build_gadget(g: &PartialFn, gadget: Gadget) -> Result<SignMatrix> {
    let n = g.arity();
    if n == 0 || n > MAX_GADGET_BITS {
        return Err(Error::Resource(format!(
            "gadget composition supports arity 1..={MAX_GADGET_BITS}, got {n}"
        )));
    }
    let side = 1usize << n;
    SignMatrix::from_predicate(side, side, |x, y| {
        g.value(match gadget {
            Gadget::And => x & y,
            Gadget::Xor => x ^ y,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{build_named, Named};

    #[test]
    fn disjointness_one_bit() {
        let m = build_comm(CommName::Disj, 1).unwrap();
        // The convention makes this the negated AND pattern.
        assert_eq!(m.to_text(), "2 2\n--\n-+\n");
    }

    #[test]
    fn noteq_is_j_minus_2i() {
        let m = build_comm(CommName::NotEq, 4).unwrap().to_dense();
        let j = DenseMatrix::from_element(4, 4, 1.0);
        assert_eq!(m, j - DenseMatrix::identity(4, 4) * 2.0);
    }

    #[test]
    fn promise_propagates() {
        let pror = build_named(Named::PrOr, 2).unwrap();
        let m = build_gadget(&pror, Gadget::And).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(m.get(x, y).is_none(), x & y == 3);
            }
        }
        let disj = build_gadget(&build_named(Named::Or, 3).unwrap(), Gadget::And).unwrap();
        assert_eq!(disj, build_comm(CommName::Disj, 3).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let m = build_gadget(&build_named(Named::PrOr, 2).unwrap(), Gadget::Xor).unwrap();
        assert_eq!(SignMatrix::from_text(&m.to_text()).unwrap(), m);
        assert!(SignMatrix::from_text("1 2\n+\n").is_err());
    }
}
