//! Composition sweeps: exact degrees of `g ∘ (f_1, …, f_n)` next to the
//! degrees of the parts, with the ratio suggested by the shape of `g`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{approx_degree, MAX_ADEG_ARITY};
use crate::boolfn::{compose, parse_named, PartialFn};
use crate::error::{input, Error, Result};

/// A function named in a sweep file: `"OR_3"`, `{"name": "OR", "n": 3}` or
/// `{"arity": 2, "table": "0111"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FnSpec {
    Label(String),
    Named { name: String, n: usize },
    Table { arity: usize, table: String },
}

impl FnSpec {
    pub fn build(&self) -> Result<PartialFn> {
        match self {
            FnSpec::Label(s) => parse_named(s),
            FnSpec::Named { name, n } => parse_named(&format!("{name}_{n}")),
            FnSpec::Table { arity, table } => {
                PartialFn::from_text(&format!("arity={arity}\n{table}\n"))
            }
        }
    }
}

fn default_epsilon() -> f64 {
    super::DEFAULT_EPSILON
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub outer: FnSpec,
    pub inner: Vec<FnSpec>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

/// Which composition bound a row is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// OR outer, identical inner: `adeg / (√n · adeg(f))`.
    Or,
    /// Parity outer: `adeg / Σ adeg(f_i)`.
    Xor,
    /// OR outer, distinct inner: `adeg / √(Σ adeg(f_i)²)`.
    OrUnbalanced,
    /// Other symmetric outer, identical inner: `adeg / (adeg(g) · adeg(f))`.
    Symmetric,
    /// Anything else: `adeg / (adeg(g)² · max adeg(f_i) / n)`.
    General,
}

impl Shape {
    pub fn tag(&self) -> &'static str {
        match self {
            Shape::Or => "or",
            Shape::Xor => "xor",
            Shape::OrUnbalanced => "or_unbalanced",
            Shape::Symmetric => "symmetric",
            Shape::General => "general",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub instance: String,
    pub arity: usize,
    pub adeg_outer: Option<usize>,
    pub adeg_inner: Vec<Option<usize>>,
    pub adeg_composed: Option<usize>,
    pub ratio: Option<f64>,
    pub shape: Shape,
    /// Why the composed degree is missing, if it is.
    pub notice: Option<String>,
}

fn classify(g: &PartialFn, fs: &[PartialFn]) -> Shape {
    let base = g.name().split('_').next().unwrap_or("");
    let identical = fs.windows(2).all(|w| w[0].table() == w[1].table());
    let or_like = g.is_total() && g.is_symmetric() && {
        // OR: 0 at weight 0, 1 elsewhere.
        g.table().iter().enumerate().all(|(x, v)| *v == Some(x != 0))
    };
    let xor_like = g.is_total()
        && g.table()
            .iter()
            .enumerate()
            .all(|(x, v)| *v == Some(x.count_ones() % 2 == 1));
    // A one-input OR is also a parity; the name decides.
    let named_xor = base.eq_ignore_ascii_case("XOR");
    if base.eq_ignore_ascii_case("OR") || (or_like && !named_xor && g.arity() > 1) {
        if identical {
            Shape::Or
        } else {
            Shape::OrUnbalanced
        }
    } else if xor_like {
        Shape::Xor
    } else if g.is_symmetric() && identical {
        Shape::Symmetric
    } else {
        Shape::General
    }
}

fn ratio(shape: Shape, composed: usize, outer: usize, inner: &[usize]) -> Option<f64> {
    let n = inner.len() as f64;
    let denom = match shape {
        Shape::Or => n.sqrt() * inner[0] as f64,
        Shape::Xor => inner.iter().sum::<usize>() as f64,
        Shape::OrUnbalanced => inner.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt(),
        Shape::Symmetric => (outer * inner[0]) as f64,
        Shape::General => {
            (outer * outer) as f64 * inner.iter().copied().max().unwrap_or(0) as f64 / n
        }
    };
    (denom > 0.0).then(|| composed as f64 / denom)
}

/// Runs every entry, in parallel on the current rayon pool; rows come back
/// in entry order.
pub fn composition_sweep(entries: &[SweepEntry]) -> Result<Vec<SweepRow>> {
    struct Prepared {
        outer: PartialFn,
        inner: Vec<PartialFn>,
        epsilon: f64,
    }
    let prepared: Vec<Prepared> = entries
        .iter()
        .map(|e| {
            if e.inner.is_empty() {
                return input("sweep entry has no inner functions");
            }
            Ok(Prepared {
                outer: e.outer.build()?,
                inner: e.inner.iter().map(FnSpec::build).collect::<Result<_>>()?,
                epsilon: e.epsilon,
            })
        })
        .collect::<Result<_>>()?;

    // Degrees of the parts, computed once per distinct (table, ε).
    let mut parts: Vec<(&PartialFn, f64)> = Vec::new();
    let mut seen: HashMap<(String, u64), usize> = HashMap::new();
    let key = |f: &PartialFn, eps: f64| (f.to_text(), eps.to_bits());
    for p in &prepared {
        for f in std::iter::once(&p.outer).chain(&p.inner) {
            let k = key(f, p.epsilon);
            if !seen.contains_key(&k) {
                seen.insert(k, parts.len());
                parts.push((f, p.epsilon));
            }
        }
    }
    let part_degrees: Vec<Option<usize>> = parts
        .par_iter()
        .map(|(f, eps)| {
            if f.arity() > MAX_ADEG_ARITY {
                None
            } else {
                approx_degree(f, *eps).ok().map(|r| r.degree)
            }
        })
        .collect();
    let lookup = |f: &PartialFn, eps: f64| part_degrees[seen[&key(f, eps)]];

    prepared
        .par_iter()
        .map(|p| -> Result<SweepRow> {
            let shape = classify(&p.outer, &p.inner);
            let adeg_outer = lookup(&p.outer, p.epsilon);
            let adeg_inner: Vec<Option<usize>> =
                p.inner.iter().map(|f| lookup(f, p.epsilon)).collect();
            let arity: usize = p.inner.iter().map(|f| f.arity()).sum();
            let mut row = SweepRow {
                instance: String::new(),
                arity,
                adeg_outer,
                adeg_inner,
                adeg_composed: None,
                ratio: None,
                shape,
                notice: None,
            };
            if arity > MAX_ADEG_ARITY {
                row.instance = describe(&p.outer, &p.inner);
                row.notice = Some(format!("skipped: arity {arity} exceeds {MAX_ADEG_ARITY}"));
                return Ok(row);
            }
            let composed = compose(&p.outer, &p.inner)?;
            row.instance = composed.name().to_string();
            match approx_degree(&composed, p.epsilon) {
                Ok(r) => {
                    row.adeg_composed = Some(r.degree);
                    if let (Some(o), Some(inner)) = (
                        row.adeg_outer,
                        row.adeg_inner.iter().copied().collect::<Option<Vec<_>>>(),
                    ) {
                        row.ratio = ratio(shape, r.degree, o, &inner);
                    }
                }
                Err(Error::Resource(msg)) => row.notice = Some(format!("skipped: {msg}")),
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect()
}

fn describe(g: &PartialFn, fs: &[PartialFn]) -> String {
    let inner: Vec<&str> = fs.iter().map(|f| f.name()).collect();
    format!("{}∘({})", g.name(), inner.join(","))
}

/// Entries `OR_a ∘ AND_b` for every `a·b ≤ max_arity`.
pub fn or_and_grid(max_arity: usize) -> Vec<SweepEntry> {
    let mut out = Vec::new();
    for a in 1..=max_arity {
        for b in 1..=max_arity / a {
            out.push(SweepEntry {
                outer: FnSpec::Label(format!("OR_{a}")),
                inner: vec![FnSpec::Label(format!("AND_{b}")); a],
                epsilon: super::DEFAULT_EPSILON,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(outer: &str, inner: &[&str]) -> SweepEntry {
        SweepEntry {
            outer: FnSpec::Label(outer.into()),
            inner: inner.iter().map(|s| FnSpec::Label(s.to_string())).collect(),
            epsilon: 1.0 / 3.0,
        }
    }

    #[test]
    fn rows_in_order_with_shapes() {
        let rows = composition_sweep(&[
            entry("OR_2", &["AND_2", "AND_2"]),
            entry("XOR_2", &["AND_2", "AND_2"]),
            entry("OR_2", &["AND_2", "XOR_2"]),
            entry("MAJ_3", &["AND_2", "AND_2", "AND_2"]),
        ])
        .unwrap();
        let shapes: Vec<Shape> = rows.iter().map(|r| r.shape).collect();
        assert_eq!(shapes, vec![Shape::Or, Shape::Xor, Shape::OrUnbalanced, Shape::Symmetric]);
        assert_eq!(rows[0].adeg_inner, vec![Some(1), Some(1)]);
        assert!(rows.iter().all(|r| r.adeg_composed.is_some()));
    }

    #[test]
    fn oversized_rows_are_skipped() {
        let rows = composition_sweep(&[entry("OR_4", &["AND_4", "AND_4", "AND_4", "AND_4"])]).unwrap();
        assert!(rows[0].adeg_composed.is_none());
        assert!(rows[0].notice.as_deref().unwrap().starts_with("skipped"));
    }

    #[test]
    fn spec_forms_parse() {
        let json = r#"[{"outer": "OR_2", "inner": [{"name": "AND", "n": 2}, {"arity": 1, "table": "01"}]}]"#;
        let entries: Vec<SweepEntry> = serde_json::from_str(json).unwrap();
        assert_eq!(entries[0].epsilon, 1.0 / 3.0);
        let rows = composition_sweep(&entries).unwrap();
        assert_eq!(rows[0].arity, 3);
    }
}
