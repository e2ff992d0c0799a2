//! Command-line driver. Every subcommand writes JSON or CSV with numbers
//! rounded to 12 significant digits, so identical invocations produce
//! identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::adeg::{
    approx_degree_with, best_error_with, composition_sweep, or_and_grid, AdegOptions, FnSpec,
    SweepEntry, SweepRow, DEFAULT_EPSILON,
};
use crate::adversary::{
    build_witness, quadrature_crosscheck, verify, witness_report, WitnessReport, TOL_CONSTRAINT, TOL_PSD,
};
use crate::boolfn::{parse_named, PartialFn};
use crate::error::{input, Error, Result};
use crate::gamma2::{
    approx_gamma2, build_comm, build_gadget, gamma2_exact, rows_of, CommName, Gadget, SignMatrix,
    DEFAULT_APPROX_EPSILON,
};
use crate::interp::{bounded_corpus, build_basis, check_coeff_bounds};
use crate::numerics::DenseMatrix;
use crate::poly::{robustness_margin_with, MultiPoly, NoiseBox, PolyJson, RobustnessOptions};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ORLAB_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "orlab", version, about = "Approximate degree, adversary witnesses and γ2 experiments")]
pub struct Cli {
    /// Output file (for `battery`, a directory). Defaults to $ORLAB_OUT_DIR/<subcommand>.<format>, else stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Validate arguments and list the planned instances without solving.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact (bounded) approximate degree of one or more functions.
    #[command(after_help = "CSV columns: label,arity,epsilon,bounded,degree,achieved_error,certificate_bound")]
    Adeg(AdegArgs),
    /// Composition sweep: degrees of g∘(f_1,…,f_n) next to those of the parts.
    #[command(after_help = "CSV columns: instance,arity,adeg_outer,adeg_inner,adeg_composed,ratio,shape,notice\n\
                            adeg_inner lists one degree per inner function, separated by ';'.")]
    Sweep(SweepArgs),
    /// Build and verify the adversary witness for a range of n.
    #[command(after_help = "CSV columns: n,min_eig,min_eig_relative,max_constraint_dev,objective,pi_sqrt_n,\
                            objective_gap,diagonal_dev,quadrature_dev,psd_ok,constraint_ok")]
    Witness(WitnessArgs),
    /// Exact or approximate γ2 of a named matrix or a sign-matrix file.
    #[command(after_help = "CSV columns: instance,rows,cols,mode,epsilon,value,lower_bound,max_error")]
    Gamma2(Gamma2Args),
    /// Interpolation basis on the simplex grid and coefficient bounds.
    #[command(after_help = "CSV columns: source,n,d,grid_size,kronecker_dev,coeff_max,bound_thm,coeff_l1,\
                            bound_l1,per_basis_max,bound_prop,violations")]
    Interp(InterpArgs),
    /// Robustness margin of a multilinear polynomial under input noise.
    #[command(after_help = "CSV columns: function,delta,noise,margin,input,corner,exact,samples")]
    Robust(RobustArgs),
    /// Run the fixed experiment battery and write every artifact into a directory.
    Battery(BatteryArgs),
}

#[derive(Args, Debug)]
pub struct FnArgs {
    /// Function name such as OR, PrOR, PrTH(1) or a full label like OR_3.
    #[arg(long = "fn")]
    pub func: Option<String>,
    /// Arity, a range `a..b`, or a comma list.
    #[arg(long)]
    pub n: Option<String>,
    /// Truth-table file (`arity=m` header, then one of 0/1/* per input).
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AdegArgs {
    #[command(flatten)]
    pub f: FnArgs,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Drop the requirement that the polynomial stays in [0,1] on the cube.
    #[arg(long)]
    pub unbounded: bool,
    /// Report the best error at this degree instead of searching for the degree.
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// JSON list of entries `{"outer": …, "inner": […], "epsilon": …}`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub outer: Option<String>,
    /// Comma-separated inner labels.
    #[arg(long, value_delimiter = ',')]
    pub inner: Vec<String>,
    /// Sweep OR_a∘AND_b over all a·b up to this arity.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    /// Range `a..b`, single value, or comma list.
    #[arg(long, default_value = "1..8")]
    pub n: String,
    #[arg(long, default_value_t = TOL_PSD)]
    pub tol_psd: f64,
    #[arg(long, default_value_t = TOL_CONSTRAINT)]
    pub tol_constraint: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Entries recomputed by quadrature per n (n ≤ 6 only).
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct Gamma2Args {
    /// J, I, DISJ, IP, NOTEQ or EQ.
    #[arg(long)]
    pub named: Option<String>,
    /// Side length for J, I, NOTEQ and EQ.
    #[arg(long)]
    pub size: Option<usize>,
    /// Input length for DISJ and IP, arity for --fn.
    #[arg(long)]
    pub n: Option<usize>,
    /// Outer function for a gadget composition, e.g. PrOR.
    #[arg(long = "fn")]
    pub func: Option<String>,
    #[arg(long)]
    pub gadget: Option<String>,
    /// Sign-matrix file (`rows cols` header, then rows of + - *).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Compute approximate γ2 instead of γ2 of the ±1 matrix.
    #[arg(long)]
    pub approx: bool,
    #[arg(long, default_value_t = DEFAULT_APPROX_EPSILON)]
    pub epsilon: f64,
    /// Include the approximant and factors in JSON output.
    #[arg(long)]
    pub factors: bool,
}

#[derive(Args, Debug)]
pub struct InterpArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Polynomial JSON file to check against the coefficient bounds.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Also check this many random bounded polynomials.
    #[arg(long, default_value_t = 0)]
    pub corpus: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct RobustArgs {
    #[command(flatten)]
    pub f: FnArgs,
    /// Polynomial JSON file; defaults to the exact multilinear extension of the function.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Let the noise leave [0,1]^m.
    #[arg(long)]
    pub full_box: bool,
    #[arg(long, default_value_t = crate::poly::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BatteryArgs {
    /// Largest n for the witness runs.
    #[arg(long, default_value_t = 8)]
    pub witness_max: usize,
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let r = sig12(num.as_f64().expect("checked f64"));
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn num(x: f64) -> String {
    let r = sig12(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

trait CsvRow {
    const HEADER: &'static str;
    fn fields(&self) -> Vec<String>;
}

fn to_csv<T: CsvRow>(rows: &[T]) -> String {
    let mut out = String::from(T::HEADER);
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.fields().iter().map(|f| csv_field(f)).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

fn render<T: CsvRow + Serialize>(rows: &[T], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => Ok(to_csv(rows)),
    }
}

/// Parses `a..b`, `a..=b`, `a` or `a,b,c`.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Input(format!("cannot read {s:?} as a range or list"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.trim_start_matches('=');
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn functions(args: &FnArgs) -> Result<Vec<PartialFn>> {
    if let Some(path) = &args.table {
        return Ok(vec![PartialFn::from_text(&read(path)?)?]);
    }
    let Some(name) = &args.func else {
        return input("give --fn (with --n) or --table");
    };
    match &args.n {
        Some(n) => parse_range(n)?
            .into_iter()
            .map(|n| parse_named(&format!("{name}_{n}")))
            .collect(),
        None => Ok(vec![parse_named(name)?]),
    }
}

#[derive(Serialize)]
struct AdegRow {
    label: String,
    arity: usize,
    epsilon: f64,
    bounded: bool,
    degree: usize,
    achieved_error: f64,
    errors_by_degree: Vec<f64>,
    /// Error lower bound implied by the dual certificate below `degree`.
    certificate_bound: Option<f64>,
    witness: PolyJson,
}

impl CsvRow for AdegRow {
    const HEADER: &'static str = "label,arity,epsilon,bounded,degree,achieved_error,certificate_bound";
    fn fields(&self) -> Vec<String> {
        vec![
            self.label.clone(),
            self.arity.to_string(),
            num(self.epsilon),
            self.bounded.to_string(),
            self.degree.to_string(),
            num(self.achieved_error),
            opt(self.certificate_bound.map(num)),
        ]
    }
}

fn adeg_rows(fs: &[PartialFn], eps: f64, bounded: bool) -> Result<Vec<AdegRow>> {
    use rayon::prelude::*;
    let opts = if bounded { AdegOptions::default() } else { AdegOptions::unbounded() };
    fs.par_iter()
        .map(|f| {
            let r = approx_degree_with(f, eps, &opts)?;
            Ok(AdegRow {
                label: r.label,
                arity: f.arity(),
                epsilon: eps,
                bounded,
                degree: r.degree,
                achieved_error: r.achieved_error,
                errors_by_degree: r.errors_by_degree,
                certificate_bound: r.certificate.map(|c| c.bound),
                witness: r.witness.prune(1e-12).to_json(),
            })
        })
        .collect()
}

impl CsvRow for SweepRow {
    const HEADER: &'static str = "instance,arity,adeg_outer,adeg_inner,adeg_composed,ratio,shape,notice";
    fn fields(&self) -> Vec<String> {
        let inner: Vec<String> = self.adeg_inner.iter().map(|d| opt(*d)).collect();
        vec![
            self.instance.clone(),
            self.arity.to_string(),
            opt(self.adeg_outer),
            inner.join(";"),
            opt(self.adeg_composed),
            opt(self.ratio.map(num)),
            self.shape.tag().to_string(),
            self.notice.clone().unwrap_or_default(),
        ]
    }
}

impl CsvRow for WitnessReport {
    const HEADER: &'static str = "n,min_eig,min_eig_relative,max_constraint_dev,objective,pi_sqrt_n,objective_gap,diagonal_dev,quadrature_dev,psd_ok,constraint_ok";
    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            num(self.min_eig),
            num(self.min_eig_relative),
            num(self.max_constraint_dev),
            num(self.objective),
            num(self.pi_sqrt_n),
            num(self.objective_gap),
            num(self.diagonal_dev),
            opt(self.quadrature_dev.map(num)),
            self.psd_ok.to_string(),
            self.constraint_ok.to_string(),
        ]
    }
}

#[derive(Serialize)]
struct Gamma2Row {
    instance: String,
    rows: usize,
    cols: usize,
    mode: &'static str,
    epsilon: Option<f64>,
    value: f64,
    lower_bound: f64,
    max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    approximant: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<Vec<Vec<f64>>>,
}

impl CsvRow for Gamma2Row {
    const HEADER: &'static str = "instance,rows,cols,mode,epsilon,value,lower_bound,max_error";
    fn fields(&self) -> Vec<String> {
        vec![
            self.instance.clone(),
            self.rows.to_string(),
            self.cols.to_string(),
            self.mode.to_string(),
            opt(self.epsilon.map(num)),
            num(self.value),
            num(self.lower_bound),
            opt(self.max_error.map(num)),
        ]
    }
}

enum Gamma2Input {
    Real(String, DenseMatrix),
    Sign(String, SignMatrix),
}

fn gamma2_input(a: &Gamma2Args) -> Result<Gamma2Input> {
    if let Some(path) = &a.table {
        return Ok(Gamma2Input::Sign(path.display().to_string(), SignMatrix::from_text(&read(path)?)?));
    }
    if let Some(func) = &a.func {
        let n = a.n.ok_or_else(|| Error::Input("--fn needs --n".into()))?;
        let g = parse_named(&format!("{func}_{n}"))?;
        let gadget: Gadget = a.gadget.as_deref().unwrap_or("AND").parse()?;
        let tag = match gadget {
            Gadget::And => "AND",
            Gadget::Xor => "XOR",
        };
        let label = format!("{}∘{tag}", g.name());
        return Ok(Gamma2Input::Sign(label, build_gadget(&g, gadget)?));
    }
    let Some(named) = &a.named else {
        return input("give --named, --fn with --gadget, or --table");
    };
    let size = |what: &str| {
        a.size
            .or(a.n)
            .ok_or_else(|| Error::Input(format!("{what} needs --size")))
    };
    match named.to_ascii_uppercase().as_str() {
        "J" => {
            let k = size("J")?;
            // All ones is the sign matrix of the constant-1 predicate.
            Ok(Gamma2Input::Sign(format!("J_{k}"), SignMatrix::from_predicate(k, k, |_, _| Some(true))?))
        }
        "I" => {
            let k = size("I")?;
            Ok(Gamma2Input::Real(format!("I_{k}"), DenseMatrix::identity(k, k)))
        }
        other => {
            let name: CommName = other.parse()?;
            let k = match name {
                CommName::Disj | CommName::Ip => a.n.or(a.size),
                _ => a.size.or(a.n),
            }
            .ok_or_else(|| Error::Input(format!("{other} needs --n or --size")))?;
            Ok(Gamma2Input::Sign(format!("{other}_{k}"), build_comm(name, k)?))
        }
    }
}

fn gamma2_row(label: &str, inp: &Gamma2Input, approx: bool, eps: f64, factors: bool) -> Result<Gamma2Row> {
    match (inp, approx) {
        (Gamma2Input::Sign(_, f), true) => {
            let r = approx_gamma2(f, eps)?;
            Ok(Gamma2Row {
                instance: label.to_string(),
                rows: f.rows(),
                cols: f.cols(),
                mode: "approx",
                epsilon: Some(eps),
                value: r.value,
                lower_bound: r.lower_bound,
                max_error: Some(r.max_error(f)),
                approximant: factors.then(|| rows_of(&r.approximant)),
                b: factors.then(|| rows_of(&r.b)),
                c: factors.then(|| rows_of(&r.c)),
            })
        }
        (Gamma2Input::Real(..), true) => input("--approx needs a sign matrix"),
        (inp, false) => {
            let m = match inp {
                Gamma2Input::Real(_, m) => m.clone(),
                Gamma2Input::Sign(_, f) => {
                    if !f.is_total() {
                        return input("exact γ2 needs a total sign matrix; use --approx");
                    }
                    f.to_dense()
                }
            };
            let r = gamma2_exact(&m)?;
            Ok(Gamma2Row {
                instance: label.to_string(),
                rows: m.nrows(),
                cols: m.ncols(),
                mode: "exact",
                epsilon: None,
                value: r.value,
                lower_bound: r.lower_bound,
                max_error: None,
                approximant: None,
                b: factors.then(|| rows_of(&r.b)),
                c: factors.then(|| rows_of(&r.c)),
            })
        }
    }
}

#[derive(Serialize)]
struct InterpRow {
    source: String,
    n: usize,
    d: usize,
    grid_size: usize,
    kronecker_dev: Option<f64>,
    coeff_max: Option<f64>,
    bound_thm: f64,
    coeff_l1: Option<f64>,
    bound_l1: f64,
    per_basis_max: f64,
    bound_prop: f64,
    violations: Vec<String>,
}

impl CsvRow for InterpRow {
    const HEADER: &'static str = "source,n,d,grid_size,kronecker_dev,coeff_max,bound_thm,coeff_l1,bound_l1,per_basis_max,bound_prop,violations";
    fn fields(&self) -> Vec<String> {
        vec![
            self.source.clone(),
            self.n.to_string(),
            self.d.to_string(),
            self.grid_size.to_string(),
            opt(self.kronecker_dev.map(num)),
            opt(self.coeff_max.map(num)),
            num(self.bound_thm),
            opt(self.coeff_l1.map(num)),
            num(self.bound_l1),
            num(self.per_basis_max),
            num(self.bound_prop),
            self.violations.join(";"),
        ]
    }
}

fn interp_rows(n: usize, d: usize, table: Option<&Path>, corpus: usize, seed: u64) -> Result<Vec<InterpRow>> {
    let basis = build_basis(n, d)?;
    let (nf, df) = (n as f64, d as f64);
    let per_basis_max = basis.basis.iter().map(MultiPoly::coeff_max).fold(0.0, f64::max);
    let bound_prop = df.powf(df) * (2.0 * nf).powf(df);
    let mut rows = vec![InterpRow {
        source: "basis".into(),
        n,
        d,
        grid_size: basis.points.len(),
        kronecker_dev: Some(basis.kronecker_deviation()),
        coeff_max: None,
        bound_thm: (2.0 * df).powf(3.0 * df),
        coeff_l1: None,
        bound_l1: (2.0 * (nf + df)).powf(3.0 * df),
        per_basis_max,
        bound_prop,
        violations: if per_basis_max <= bound_prop {
            vec![]
        } else {
            vec![format!("per-basis max {per_basis_max} > {bound_prop}")]
        },
    }];
    let mut polys: Vec<(String, MultiPoly)> = Vec::new();
    if let Some(path) = table {
        let json: PolyJson = serde_json::from_str(&read(path)?)?;
        polys.push((path.display().to_string(), MultiPoly::from_json(&json)?));
    }
    for (i, p) in bounded_corpus(n, d, corpus, seed)?.into_iter().enumerate() {
        polys.push((format!("corpus#{i}"), p));
    }
    for (source, p) in polys {
        let deg = p.degree().unwrap_or(0).max(1) as usize;
        let r = check_coeff_bounds(&p, n, deg)?;
        rows.push(InterpRow {
            source,
            n,
            d: deg,
            grid_size: crate::interp::grid(n, deg)?.len(),
            kronecker_dev: None,
            coeff_max: Some(r.coeff_max),
            bound_thm: r.bound_thm,
            coeff_l1: Some(r.coeff_l1),
            bound_l1: r.bound_l1,
            per_basis_max: r.per_basis_max,
            bound_prop: r.bound_prop,
            violations: r.violations,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct RobustRow {
    function: String,
    delta: f64,
    noise: &'static str,
    margin: f64,
    input: usize,
    corner: usize,
    exact: bool,
    samples: usize,
}

impl CsvRow for RobustRow {
    const HEADER: &'static str = "function,delta,noise,margin,input,corner,exact,samples";
    fn fields(&self) -> Vec<String> {
        vec![
            self.function.clone(),
            num(self.delta),
            self.noise.to_string(),
            num(self.margin),
            self.input.to_string(),
            self.corner.to_string(),
            self.exact.to_string(),
            self.samples.to_string(),
        ]
    }
}

/// Multilinear extension of the 0/1 table, undefined entries set to 0.
fn multilinear_extension(f: &PartialFn) -> Result<MultiPoly> {
    let values: Vec<f64> = f.table().iter().map(|v| if *v == Some(true) { 1.0 } else { 0.0 }).collect();
    MultiPoly::from_cube_values(f.arity(), &values)
}

fn robust_row(f: &PartialFn, p: &MultiPoly, delta: f64, full: bool, samples: usize, seed: u64) -> Result<RobustRow> {
    let noise = if full { NoiseBox::Full } else { NoiseBox::Clipped };
    let r = robustness_margin_with(p, f, delta, &RobustnessOptions { noise, samples, seed })?;
    Ok(RobustRow {
        function: f.name().to_string(),
        delta,
        noise: if full { "full" } else { "clipped" },
        margin: r.margin,
        input: r.input,
        corner: r.corner,
        exact: r.exact,
        samples: r.samples,
    })
}

struct Sink<'a> {
    out: Option<&'a Path>,
    format: Format,
}

impl Sink<'_> {
    fn emit(&self, name: &str, body: &str) -> Result<()> {
        let path = match self.out {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(OUT_DIR_ENV)
                .map(|dir| PathBuf::from(dir).join(format!("{name}.{}", self.format.ext()))),
        };
        match path {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)?;
                }
                std::fs::write(p, body)?;
            }
            None => print!("{body}"),
        }
        Ok(())
    }
}

fn plan(items: impl IntoIterator<Item = String>) -> Result<()> {
    for it in items {
        println!("planned: {it}");
    }
    Ok(())
}

fn check_epsilon(eps: f64, hi: f64) -> Result<()> {
    if !(eps > 0.0 && eps < hi) {
        return input(format!("--epsilon must lie in (0, {hi}), got {eps}"));
    }
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    if cli.jobs == Some(0) {
        return input("--jobs must be positive");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    let sink = Sink { out: cli.out.as_deref(), format: cli.format };
    match &cli.command {
        Command::Adeg(a) => {
            check_epsilon(a.epsilon, 0.5)?;
            let fs = functions(&a.f)?;
            if cli.dry_run {
                return plan(fs.iter().map(|f| f.name().to_string()));
            }
            let body = match a.d {
                Some(d) => {
                    let opts = if a.unbounded { AdegOptions::unbounded() } else { AdegOptions::default() };
                    let rows = fs
                        .iter()
                        .map(|f| {
                            let r = best_error_with(f, d, &opts)?;
                            Ok(serde_json::json!({
                                "label": f.name(),
                                "degree": d,
                                "bounded": r.bounded,
                                "epsilon": r.epsilon,
                                "achieved_error": r.achieved_error,
                                "certificate_bound": r.certificate.bound,
                                "witness": r.witness.prune(1e-12).to_json(),
                            }))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if cli.format == Format::Csv {
                        let mut s = String::from("label,degree,bounded,epsilon,achieved_error,certificate_bound\n");
                        for r in &rows {
                            let _ = writeln!(
                                s,
                                "{},{},{},{},{},{}",
                                csv_field(r["label"].as_str().unwrap_or("")),
                                r["degree"],
                                r["bounded"],
                                num(r["epsilon"].as_f64().unwrap_or(f64::NAN)),
                                num(r["achieved_error"].as_f64().unwrap_or(f64::NAN)),
                                num(r["certificate_bound"].as_f64().unwrap_or(f64::NAN)),
                            );
                        }
                        s
                    } else {
                        to_json(&rows)?
                    }
                }
                None => render(&adeg_rows(&fs, a.epsilon, !a.unbounded)?, cli.format)?,
            };
            sink.emit("adeg", &body)
        }
        Command::Sweep(a) => {
            check_epsilon(a.epsilon, 0.5)?;
            let mut entries: Vec<SweepEntry> = Vec::new();
            if let Some(path) = &a.table {
                entries.extend(serde_json::from_str::<Vec<SweepEntry>>(&read(path)?)?);
            }
            if let Some(outer) = &a.outer {
                if a.inner.is_empty() {
                    return input("--outer needs --inner");
                }
                entries.push(SweepEntry {
                    outer: FnSpec::Label(outer.clone()),
                    inner: a.inner.iter().map(|s| FnSpec::Label(s.clone())).collect(),
                    epsilon: a.epsilon,
                });
            }
            if let Some(max) = a.grid {
                entries.extend(or_and_grid(max).into_iter().map(|mut e| {
                    e.epsilon = a.epsilon;
                    e
                }));
            }
            if entries.is_empty() {
                return input("give --table, --outer/--inner or --grid");
            }
            if cli.dry_run {
                let labels = entries
                    .iter()
                    .map(|e| {
                        let g = e.outer.build()?;
                        let fs = e.inner.iter().map(FnSpec::build).collect::<Result<Vec<_>>>()?;
                        let names: Vec<&str> = fs.iter().map(|f| f.name()).collect();
                        Ok(format!("{}∘({})", g.name(), names.join(",")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                return plan(labels);
            }
            sink.emit("sweep", &render(&composition_sweep(&entries)?, cli.format)?)
        }
        Command::Witness(a) => {
            let ns = parse_range(&a.n)?;
            if ns.iter().any(|&n| n == 0 || n > crate::adversary::MAX_WITNESS_N) {
                return input(format!("witness n must lie in 1..={}", crate::adversary::MAX_WITNESS_N));
            }
            if cli.dry_run {
                return plan(ns.iter().map(|n| format!("witness n={n}")));
            }
            let reports = ns
                .iter()
                .map(|&n| {
                    if a.tol_psd == TOL_PSD && a.tol_constraint == TOL_CONSTRAINT {
                        return witness_report(n, a.samples, a.seed);
                    }
                    let w = build_witness(n)?;
                    let mut r = verify(&w, a.tol_psd, a.tol_constraint)?;
                    if n <= 6 {
                        r.quadrature_dev = Some(quadrature_crosscheck(&w, a.samples, a.seed)?);
                    }
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()?;
            sink.emit("witness", &render(&reports, cli.format)?)?;
            if reports.iter().any(|r| !r.psd_ok || !r.constraint_ok) {
                return Err(Error::Logic("witness verification failed; see report".into()));
            }
            Ok(())
        }
        Command::Gamma2(a) => {
            check_epsilon(a.epsilon, 1.0)?;
            let inp = gamma2_input(a)?;
            let label = match &inp {
                Gamma2Input::Real(l, _) | Gamma2Input::Sign(l, _) => l.clone(),
            };
            if cli.dry_run {
                return plan([format!("{label} ({})", if a.approx { "approx" } else { "exact" })]);
            }
            let row = gamma2_row(&label, &inp, a.approx, a.epsilon, a.factors)?;
            sink.emit("gamma2", &render(&[row], cli.format)?)
        }
        Command::Interp(a) => {
            if cli.dry_run {
                crate::interp::grid(a.n, a.d)?;
                return plan([format!("basis n={} d={}, corpus {}", a.n, a.d, a.corpus)]);
            }
            let rows = interp_rows(a.n, a.d, a.table.as_deref(), a.corpus, a.seed)?;
            sink.emit("interp", &render(&rows, cli.format)?)
        }
        Command::Robust(a) => {
            let fs = functions(&a.f)?;
            if cli.dry_run {
                return plan(fs.iter().map(|f| format!("{} δ={}", f.name(), a.delta)));
            }
            let rows = fs
                .iter()
                .map(|f| {
                    let p = match &a.poly {
                        Some(path) => MultiPoly::from_json(&serde_json::from_str(&read(path)?)?)?,
                        None => multilinear_extension(f)?,
                    };
                    robust_row(f, &p, a.delta, a.full_box, a.samples, a.seed)
                })
                .collect::<Result<Vec<_>>>()?;
            sink.emit("robust", &render(&rows, cli.format)?)
        }
        Command::Battery(b) => {
            let dir = match (&cli.out, std::env::var_os(OUT_DIR_ENV)) {
                (Some(p), _) => p.clone(),
                (None, Some(d)) => PathBuf::from(d),
                (None, None) => return input(format!("battery needs --out or ${OUT_DIR_ENV}")),
            };
            if b.witness_max == 0 || b.witness_max > crate::adversary::MAX_WITNESS_N {
                return input("--witness-max out of range");
            }
            if cli.dry_run {
                return plan(BATTERY_FILES.iter().map(|f| dir.join(f).display().to_string()));
            }
            battery(&dir, b.witness_max)
        }
    }
}

/// Files written by the battery, in order.
pub const BATTERY_FILES: [&str; 9] = [
    "degrees.csv",
    "or_and.csv",
    "xor_and.csv",
    "unbalanced.csv",
    "pror.csv",
    "witness.json",
    "gamma2.json",
    "interp.json",
    "robust.json",
];

fn named_all(names: &[&str]) -> Result<Vec<PartialFn>> {
    names.iter().map(|s| parse_named(s)).collect()
}

fn battery(dir: &Path, witness_max: usize) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let write = |name: &str, body: String| -> Result<()> { Ok(std::fs::write(dir.join(name), body)?) };

    let mut labels: Vec<String> = (1..=10).map(|n| format!("OR_{n}")).collect();
    labels.extend((1..=8).map(|n| format!("XOR_{n}")));
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    write("degrees.csv", to_csv(&adeg_rows(&named_all(&refs)?, DEFAULT_EPSILON, true)?))?;

    write("or_and.csv", to_csv(&composition_sweep(&or_and_grid(12))?))?;

    let xor_and: Vec<SweepEntry> = (1..=5)
        .map(|k| SweepEntry {
            outer: FnSpec::Label(format!("XOR_{k}")),
            inner: vec![FnSpec::Label("AND_2".into()); k],
            epsilon: DEFAULT_EPSILON,
        })
        .collect();
    write("xor_and.csv", to_csv(&composition_sweep(&xor_and)?))?;

    let parts = ["AND_2", "XOR_2", "MAJ_3"];
    let unbalanced: Vec<SweepEntry> = parts
        .iter()
        .flat_map(|a| parts.iter().map(move |b| (a, b)))
        .map(|(a, b)| SweepEntry {
            outer: FnSpec::Label("OR_2".into()),
            inner: vec![FnSpec::Label(a.to_string()), FnSpec::Label(b.to_string())],
            epsilon: DEFAULT_EPSILON,
        })
        .collect();
    write("unbalanced.csv", to_csv(&composition_sweep(&unbalanced)?))?;

    let pror = named_all(&["PrOR_2", "PrOR_3", "PrOR_4", "PrOR_5", "PrOR_6", "PrOR_7", "PrOR_8"])?;
    let mut rows = adeg_rows(&pror, DEFAULT_EPSILON, true)?;
    rows.extend(adeg_rows(&pror, DEFAULT_EPSILON, false)?);
    write("pror.csv", to_csv(&rows))?;

    let reports = (1..=witness_max)
        .map(|n| witness_report(n, 200, 1))
        .collect::<Result<Vec<_>>>()?;
    write("witness.json", to_json(&reports)?)?;

    let mut g = Vec::new();
    for k in [1, 2, 4, 8] {
        let ones = Gamma2Input::Sign(format!("J_{k}"), SignMatrix::from_predicate(k, k, |_, _| Some(true))?);
        g.push(gamma2_row(&format!("J_{k}"), &ones, false, 0.0, false)?);
        let id = Gamma2Input::Real(format!("I_{k}"), DenseMatrix::identity(k, k));
        g.push(gamma2_row(&format!("I_{k}"), &id, false, 0.0, false)?);
    }
    for k in 2..=8 {
        let m = Gamma2Input::Sign(String::new(), build_comm(CommName::NotEq, k)?);
        g.push(gamma2_row(&format!("NOTEQ_{k}"), &m, true, DEFAULT_APPROX_EPSILON, false)?);
    }
    for n in 1..=4 {
        let m = Gamma2Input::Sign(String::new(), build_comm(CommName::Disj, n)?);
        g.push(gamma2_row(&format!("DISJ_{n}"), &m, true, DEFAULT_APPROX_EPSILON, false)?);
    }
    write("gamma2.json", to_json(&g)?)?;

    let mut interp = Vec::new();
    for (n, d) in [(1, 1), (2, 2), (3, 2), (2, 4), (4, 3)] {
        interp.extend(interp_rows(n, d, None, 5, 1)?);
    }
    write("interp.json", to_json(&interp)?)?;

    let or2 = parse_named("OR_2")?;
    let robust = vec![
        robust_row(&or2, &multilinear_extension(&or2)?, 0.1, false, 0, 1)?,
        robust_row(&or2, &multilinear_extension(&or2)?, 0.1, true, 0, 1)?,
    ];
    write("robust.json", to_json(&robust)?)?;
    Ok(())
}

/// Entry point shared by the binary: parses arguments, runs, and maps
/// errors to a message on stderr and a nonzero exit code.
pub fn main_entry() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("orlab: {e}");
            std::process::ExitCode::from(match e {
                Error::Input(_) | Error::Domain(_) | Error::Json(_) => 2,
                _ => 1,
            })
        }
    }
}
