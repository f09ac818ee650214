//! Batch front-end: point-count grids, cover certificates, Hilbert audits,
//! chart checks and bound calculations.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 inconclusive, 3 input error.

mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::bivar::BivarPoly;
use crate::arith::Field;
use crate::combinat::bound_formulas;
use crate::detcover::{cover_curve, CertificateJson, DetError, Verification};
use crate::enumerate::{count_vs_bounds, random_irreducible_curve, EnumError, Mode, Shape};
use crate::hilbert::{hf_closed_form, hilbert_ratios, staircase, PlaneCurve};
use crate::trcheck::{check_tr, ChartJson, Status, TrConfig, DEFAULT_PRECISION, GUARD};

pub use config::{mode_name, parse_mode, ConfigError, ExperimentConfig};

pub const EXIT_INPUT_ERROR: i32 = 3;

/// Attempts per grid cell when searching for an irreducible curve.
const CURVE_ATTEMPTS: u32 = 100;

#[derive(Debug, Parser)]
#[command(name = "fqcount", version, about = "Point counts and determinant-method covers for curves over F_q((t))")]
pub struct Cli {
    /// Enumeration budget (number of field evaluations).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Seed for curve generation and sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Working precision in t-digits for chart checks.
    #[arg(long, global = true)]
    pub precision: Option<i64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count points over a (q, δ, n) grid and fit the bound constants.
    Count(CountArgs),
    /// Build and verify a cover certificate, or re-verify a saved one.
    Cover(CoverArgs),
    /// Audit Hilbert functions and the Salberger coefficients.
    Audit(AuditArgs),
    /// Check T_r-approximation of a chart.
    Trcheck(TrArgs),
    /// Evaluate the closed-form bounds.
    Bounds(BoundsArgs),
}

#[derive(Debug, clap::Args)]
pub struct CountArgs {
    /// Experiment file; flags below override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub extension_degrees: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// weierstrass or dense.
    #[arg(long)]
    pub shape: Option<String>,
    /// hensel or brute.
    #[arg(long)]
    pub mode: Option<String>,
    /// Add an elapsed_ms column; the only nondeterministic field.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, clap::Args)]
pub struct CoverArgs {
    /// Curve as `p=..;a=..;f=..`.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, default_value = "hensel")]
    pub mode: String,
    /// Re-verify a certificate file instead of building one.
    #[arg(long, conflicts_with_all = ["curve", "n"])]
    pub verify: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct AuditArgs {
    #[arg(long, default_value_t = 5)]
    pub delta_max: u32,
    #[arg(long, default_value_t = 15)]
    pub s_max: u32,
}

#[derive(Debug, clap::Args)]
pub struct TrArgs {
    /// Chart file, or `bundled:<name>`.
    #[arg(long)]
    pub chart: String,
    /// Order to check; defaults to the order recorded in the chart.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, clap::Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub delta: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub m: u32,
    /// Height bound H; defaults to q^n.
    #[arg(long)]
    pub h: Option<u128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub outcome: Outcome,
    /// Destination requested by a config file when `--out` is absent.
    pub default_out: Option<PathBuf>,
}

impl Output {
    fn new(text: String, outcome: Outcome) -> Output {
        Output {
            text,
            outcome,
            default_out: None,
        }
    }
}

/// Parses arguments, runs the command, writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let dest = cli.out.clone().or(out.default_out.clone());
            if let Err(e) = emit(&out.text, dest) {
                eprintln!("error: {e:#}");
                return EXIT_INPUT_ERROR;
            }
            out.outcome.code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT_ERROR
        }
    }
}

fn emit(text: &str, dest: Option<PathBuf>) -> anyhow::Result<()> {
    match dest {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command; an `Err` is an input error.
pub fn execute(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.command {
        Command::Count(args) => {
            let cfg = count_config(cli, args)?;
            let mut out = run_count(&cfg, cli.format.unwrap_or(Format::Csv), args.timing)?;
            out.default_out = cfg.out.as_ref().map(PathBuf::from);
            Ok(out)
        }
        Command::Cover(args) => run_cover(cli, args),
        Command::Audit(args) => run_audit(args.delta_max, args.s_max, cli.format.unwrap_or(Format::Csv)),
        Command::Trcheck(args) => run_trcheck(cli, args),
        Command::Bounds(args) => run_bounds(args, cli.format.unwrap_or(Format::Json)),
    }
}

fn count_config(cli: &Cli, args: &CountArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &args.primes {
        cfg.primes = v.clone();
    }
    if let Some(v) = &args.extension_degrees {
        cfg.extension_degrees = v.clone();
    }
    if let Some(v) = &args.deltas {
        cfg.deltas = v.clone();
    }
    if let Some(v) = &args.ns {
        cfg.ns = v.clone();
    }
    if let Some(v) = &args.seeds {
        cfg.seeds = v.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seeds = vec![s];
    }
    if let Some(s) = &args.shape {
        cfg.shape = s.parse::<Shape>().map_err(|e| anyhow!(e))?;
    }
    if let Some(m) = &args.mode {
        cfg.mode = parse_mode(m).map_err(|e| anyhow!(e))?;
    }
    if let Some(b) = cli.budget {
        cfg.budget = b;
    }
    Ok(cfg)
}

fn ratio_text(r: &Ratio<u128>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn ratio_decimal(r: &Ratio<u128>) -> String {
    format!("{:.6}", *r.numer() as f64 / *r.denom() as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct CountRow {
    pub p: u32,
    pub a: u32,
    pub q: u32,
    pub delta: u32,
    pub shape: String,
    pub seed: u64,
    /// Seed of the first generated curve flagged irreducible.
    pub curve_seed: Option<u64>,
    pub curve: Option<String>,
    pub n: u32,
    pub count: Option<u64>,
    /// `n² q^{⌈n/δ⌉}`.
    pub bound_shape: u128,
    pub fitted_c: Option<String>,
    pub fitted_c_decimal: Option<String>,
    pub trivial_c: Option<String>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
    #[serde(skip)]
    fitted: Option<Ratio<u128>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountSummary {
    pub delta: u32,
    pub cells: usize,
    pub fitted_c: String,
    pub fitted_c_decimal: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
    pub summary: Vec<CountSummary>,
}

/// One row per `(p, a, δ, seed, n)` in grid order, then the largest
/// fitted constant per `δ`.
pub fn count_table(cfg: &ExperimentConfig, timing: bool) -> anyhow::Result<CountTable> {
    struct Cell {
        p: u32,
        a: u32,
        q: u32,
        delta: u32,
        seed: u64,
        curve: Option<(PlaneCurve, u64)>,
        n: u32,
    }
    let mut cells = Vec::new();
    for &p in &cfg.primes {
        for &a in &cfg.extension_degrees {
            let field = Field::new(p, a).with_context(|| format!("field p={p}, a={a}"))?;
            for &delta in &cfg.deltas {
                if delta == 0 {
                    bail!("curve degrees must be at least 1");
                }
                for &seed in &cfg.seeds {
                    let curve =
                        random_irreducible_curve(&field, delta, cfg.shape, seed, CURVE_ATTEMPTS);
                    for &n in &cfg.ns {
                        if n == 0 {
                            bail!("degree bounds n must be at least 1");
                        }
                        cells.push(Cell {
                            p,
                            a,
                            q: field.q(),
                            delta,
                            seed,
                            curve: curve.clone(),
                            n,
                        });
                    }
                }
            }
        }
    }
    let rows: Vec<CountRow> = cells
        .par_iter()
        .map(|c| {
            let bound_shape = (c.n as u128).pow(2) * (c.q as u128).pow(c.n.div_ceil(c.delta));
            let mut row = CountRow {
                p: c.p,
                a: c.a,
                q: c.q,
                delta: c.delta,
                shape: cfg.shape.to_string(),
                seed: c.seed,
                curve_seed: c.curve.as_ref().map(|x| x.1),
                curve: c.curve.as_ref().map(|x| x.0.spec()),
                n: c.n,
                count: None,
                bound_shape,
                fitted_c: None,
                fitted_c_decimal: None,
                trivial_c: None,
                status: "no_irreducible_curve",
                elapsed_ms: None,
                fitted: None,
            };
            let Some((curve, _)) = &c.curve else {
                return row;
            };
            match count_vs_bounds(curve, c.n, cfg.mode, cfg.budget, false) {
                Ok(rep) => {
                    row.count = Some(rep.count);
                    row.fitted_c = Some(ratio_text(&rep.fitted_c));
                    row.fitted_c_decimal = Some(ratio_decimal(&rep.fitted_c));
                    row.trivial_c = Some(ratio_text(&rep.trivial_c));
                    row.status = "ok";
                    row.elapsed_ms = timing.then_some(rep.elapsed.as_millis());
                    row.fitted = Some(rep.fitted_c);
                }
                Err(EnumError::BudgetExceeded { .. }) => row.status = "budget_exceeded",
                Err(_) => row.status = "error",
            }
            row
        })
        .collect();
    let mut summary: Vec<CountSummary> = Vec::new();
    let mut deltas: Vec<u32> = rows.iter().map(|r| r.delta).collect();
    deltas.sort_unstable();
    deltas.dedup();
    for delta in deltas {
        let fitted: Vec<Ratio<u128>> = rows
            .iter()
            .filter(|r| r.delta == delta)
            .filter_map(|r| r.fitted)
            .collect();
        if let Some(max) = fitted.iter().max() {
            summary.push(CountSummary {
                delta,
                cells: fitted.len(),
                fitted_c: ratio_text(max),
                fitted_c_decimal: ratio_decimal(max),
            });
        }
    }
    Ok(CountTable { rows, summary })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| csv_field(&x.to_string())).unwrap_or_default()
}

pub fn count_csv(table: &CountTable, timing: bool) -> String {
    let mut out = String::from(
        "kind,p,a,q,delta,shape,seed,curve_seed,curve,n,count,bound_shape,fitted_c,fitted_c_decimal,trivial_c,status",
    );
    if timing {
        out.push_str(",elapsed_ms");
    }
    out.push('\n');
    for r in &table.rows {
        out.push_str(&format!(
            "cell,{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.p,
            r.a,
            r.q,
            r.delta,
            r.shape,
            r.seed,
            opt(&r.curve_seed),
            opt(&r.curve),
            r.n,
            opt(&r.count),
            r.bound_shape,
            opt(&r.fitted_c),
            opt(&r.fitted_c_decimal),
            opt(&r.trivial_c),
            r.status
        ));
        if timing {
            out.push(',');
            out.push_str(&opt(&r.elapsed_ms));
        }
        out.push('\n');
    }
    for s in &table.summary {
        out.push_str(&format!(
            "summary,,,,{},,,,,,,,{},{},,max_over_{}_cells",
            s.delta, s.fitted_c, s.fitted_c_decimal, s.cells
        ));
        if timing {
            out.push(',');
        }
        out.push('\n');
    }
    out
}

pub fn run_count(cfg: &ExperimentConfig, format: Format, timing: bool) -> anyhow::Result<Output> {
    let table = count_table(cfg, timing)?;
    let outcome = if table.rows.iter().all(|r| r.status == "ok") {
        Outcome::Pass
    } else {
        Outcome::Inconclusive
    };
    let text = match format {
        Format::Csv => count_csv(&table, timing),
        Format::Json => serde_json::to_string_pretty(&table)? + "\n",
    };
    Ok(Output::new(text, outcome))
}

fn cover_mode(s: &str) -> anyhow::Result<Mode> {
    parse_mode(s).map_err(|e| anyhow!(e))
}

#[derive(Debug, Serialize)]
struct CoverOutput {
    certificate: CertificateJson,
    /// Verdicts recomputed from the serialized certificate alone.
    reverified: Verification,
    valid: bool,
}

fn run_cover(cli: &Cli, args: &CoverArgs) -> anyhow::Result<Output> {
    let budget = cli.budget.unwrap_or(crate::enumerate::DEFAULT_BUDGET);
    let mode = cover_mode(&args.mode)?;
    if let Some(path) = &args.verify {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text).context("certificate JSON")?;
        let cert_value = value.get("certificate").cloned().unwrap_or(value);
        let cert: CertificateJson =
            serde_json::from_value(cert_value).context("certificate JSON")?;
        return match cert.reverify(mode, budget) {
            Ok(v) => {
                let outcome = if v.valid { Outcome::Pass } else { Outcome::Fail };
                Ok(Output::new(serde_json::to_string_pretty(&v)? + "\n", outcome))
            }
            Err(DetError::Reducible) => bail!("{}", DetError::Reducible),
            Err(e @ (DetError::Malformed(_) | DetError::NotOnCurve { .. } | DetError::NotInBall { .. })) => {
                let v = serde_json::json!({ "valid": false, "error": e.to_string() });
                Ok(Output::new(serde_json::to_string_pretty(&v)? + "\n", Outcome::Fail))
            }
            Err(e) => Err(e.into()),
        };
    }
    let (Some(spec), Some(n)) = (&args.curve, args.n) else {
        bail!("cover needs --curve and --n, or --verify FILE");
    };
    let curve = PlaneCurve::parse_spec(spec, true)?;
    let cert = cover_curve(&curve, n, mode, budget)?;
    let json = cert.to_json();
    let text = serde_json::to_string(&json)?;
    let back: CertificateJson = serde_json::from_str(&text)?;
    let reverified = back.reverify(mode, budget)?;
    let valid = cert.verification.valid && reverified.valid && reverified == cert.verification;
    let outcome = if valid { Outcome::Pass } else { Outcome::Fail };
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_string_pretty(&CoverOutput {
                certificate: json,
                reverified,
                valid,
            })? + "\n"
        }
        Format::Csv => {
            let mut s = String::from("x,y,hypersurface\n");
            for ((x, y), h) in cert.points.iter().zip(&cert.assignment) {
                s.push_str(&format!("{},{},{}\n", csv_field(&x.to_string()), csv_field(&y.to_string()), h));
            }
            s
        }
    };
    Ok(Output::new(text, outcome))
}

/// A curve whose leading term is that of a `δ`-Weierstrass equation.
pub fn audit_curve(delta: u32) -> anyhow::Result<PlaneCurve> {
    let field = Field::new(5, 1)?;
    let text = match delta {
        0 => bail!("curve degrees start at 1"),
        1 => "y - x".to_string(),
        2 => "y^2 - x".to_string(),
        d => format!("y^2 - x^{d}"),
    };
    Ok(PlaneCurve::new(BivarPoly::parse(&field, &text)?, false)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub delta: u32,
    pub curve: String,
    pub leading_exponent: String,
    pub s_max: u32,
    pub hf_at_s_max: u64,
    pub hf_closed_at_s_max: i64,
    /// Largest `|HF(s) − (δs − δ(δ−3)/2)|` over `δ−1 ≤ s ≤ s_max`.
    pub hf_residual: i64,
    /// Largest `|s·HF(s) − (σ₀+σ₁+σ₂)|` over `0 ≤ s ≤ s_max`.
    pub sigma_residual: i64,
    pub a0: String,
    pub a1: String,
    pub a2: String,
    pub a1_plus_a2: String,
    pub le_half: bool,
}

pub fn audit_rows(delta_max: u32, s_max: u32) -> anyhow::Result<Vec<AuditRow>> {
    if !(1..=6).contains(&delta_max) {
        bail!("delta_max must be between 1 and 6");
    }
    let mut rows = Vec::new();
    for delta in 1..=delta_max {
        let curve = audit_curve(delta)?;
        let mut hf_residual = 0i64;
        let mut sigma_residual = 0i64;
        for s in 0..=s_max {
            let sl = staircase(&curve, s);
            let total: u64 = sl.sigma.iter().sum();
            sigma_residual = sigma_residual.max((s as i64 * sl.hf as i64 - total as i64).abs());
            if s + 1 >= delta {
                hf_residual = hf_residual.max((sl.hf as i64 - hf_closed_form(delta, s)).abs());
            }
        }
        let a = hilbert_ratios(&curve, s_max)?;
        let sum = a[1] + a[2];
        let text = |r: &Ratio<i64>| r.to_string();
        rows.push(AuditRow {
            delta,
            curve: curve.spec(),
            leading_exponent: curve.leading_exponent().to_string(),
            s_max,
            hf_at_s_max: staircase(&curve, s_max).hf,
            hf_closed_at_s_max: hf_closed_form(delta, s_max),
            hf_residual,
            sigma_residual,
            a0: text(&a[0]),
            a1: text(&a[1]),
            a2: text(&a[2]),
            a1_plus_a2: text(&sum),
            le_half: sum <= Ratio::new(1, 2),
        });
    }
    Ok(rows)
}

fn run_audit(delta_max: u32, s_max: u32, format: Format) -> anyhow::Result<Output> {
    let rows = audit_rows(delta_max, s_max)?;
    let ok = rows
        .iter()
        .all(|r| r.hf_residual == 0 && r.sigma_residual == 0 && r.le_half);
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut s = String::from("delta,curve,leading_exponent,s_max,hf_at_s_max,hf_closed_at_s_max,hf_residual,sigma_residual,a0,a1,a2,a1_plus_a2,le_half\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.delta,
                    csv_field(&r.curve),
                    csv_field(&r.leading_exponent),
                    r.s_max,
                    r.hf_at_s_max,
                    r.hf_closed_at_s_max,
                    r.hf_residual,
                    r.sigma_residual,
                    r.a0,
                    r.a1,
                    r.a2,
                    r.a1_plus_a2,
                    r.le_half
                ));
            }
            s
        }
    };
    Ok(Output::new(text, if ok { Outcome::Pass } else { Outcome::Fail }))
}

/// Loads a chart from a path or `bundled:<name>`.
pub fn load_chart(spec: &str) -> anyhow::Result<ChartJson> {
    if let Some(name) = spec.strip_prefix("bundled:") {
        return ChartJson::bundled(name).ok_or_else(|| anyhow!("no bundled chart named '{name}'"));
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    Ok(ChartJson::parse(&text)?)
}

fn run_trcheck(cli: &Cli, args: &TrArgs) -> anyhow::Result<Output> {
    let cj = load_chart(&args.chart)?;
    let chart = cj.to_chart()?;
    let r = args
        .r
        .or(cj.order)
        .ok_or_else(|| anyhow!("--r is required for charts without a recorded order"))?;
    if r == 0 {
        bail!("--r must be at least 1");
    }
    let cfg = TrConfig {
        precision: cli.precision.unwrap_or(DEFAULT_PRECISION),
        guard: GUARD,
        samples: args.samples,
        seed: cli.seed.unwrap_or(0),
    };
    let verdict = check_tr(&chart, r, &cfg)?;
    let outcome = match verdict.status {
        Status::Pass => Outcome::Pass,
        Status::Fail => Outcome::Fail,
        Status::Inconclusive => Outcome::Inconclusive,
    };
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&verdict)? + "\n",
        Format::Csv => {
            let mut s = String::from("x,y,component,ord,bound\n");
            for v in &verdict.violations {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_field(&v.x.join(";")),
                    csv_field(&v.y.join(";")),
                    v.component,
                    v.ord,
                    v.bound
                ));
            }
            s
        }
    };
    Ok(Output::new(text, outcome))
}

fn run_bounds(args: &BoundsArgs, format: Format) -> anyhow::Result<Output> {
    let h = match args.h {
        Some(h) => h,
        None => (args.q as u128)
            .checked_pow(args.n)
            .ok_or_else(|| anyhow!("q^n overflows; pass --h"))?,
    };
    let rec = bound_formulas(args.q, args.n, args.delta, args.d, args.m, h)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rec)? + "\n",
        Format::Csv => {
            let cover = rec.cover_count_poschar.as_ref();
            format!(
                "q,n,delta,d,m,trivial_exponent,naive_degree,main_shape,h,h_exponent,cover_log_q,alpha\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
                rec.q,
                rec.n,
                rec.delta,
                rec.d,
                rec.m,
                rec.trivial_exponent,
                rec.naive_degree,
                rec.main_bound.shape_value,
                h,
                cover.map(|c| c.h_exponent.clone()).unwrap_or_default(),
                cover.map(|c| format!("{:.6}", c.log_q_value)).unwrap_or_default(),
                rec.alpha.clone().unwrap_or_default()
            )
        }
    };
    Ok(Output::new(text, Outcome::Pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> anyhow::Result<Output> {
        let mut full = vec!["fqcount"];
        full.extend_from_slice(args);
        execute(&Cli::try_parse_from(full)?)
    }

    #[test]
    fn line_counts_fit_one_over_n_squared() {
        let out = run(&["count", "--primes", "5,7", "--deltas", "1", "--ns", "1,2,3", "--format", "json"]).unwrap();
        assert_eq!(out.outcome, Outcome::Pass);
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        for row in v["rows"].as_array().unwrap() {
            let n = row["n"].as_u64().unwrap();
            let q = row["q"].as_u64().unwrap();
            assert_eq!(row["count"].as_u64().unwrap(), q.pow(n as u32));
            assert_eq!(row["fitted_c"].as_str().unwrap(), format!("1/{}", n * n));
        }
        assert_eq!(v["summary"][0]["fitted_c"], "1/1");
    }

    #[test]
    fn empty_grid_is_header_only() {
        let out = run(&["count"]).unwrap();
        assert_eq!(out.text.lines().count(), 1);
        assert!(out.text.starts_with("kind,p,a,q"));
    }

    #[test]
    fn weierstrass_cubics_use_q_to_the_one() {
        let out = run(&["count", "--primes", "5", "--deltas", "3", "--ns", "3"]).unwrap();
        let row = out.text.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[11], "45");
        assert_eq!(cols[15], "ok");
    }

    #[test]
    fn budget_exceeded_rows_are_kept() {
        let out = run(&["count", "--primes", "5", "--deltas", "2", "--ns", "1,4", "--budget", "1000", "--mode", "brute"]).unwrap();
        assert_eq!(out.outcome, Outcome::Inconclusive);
        assert!(out.text.contains("budget_exceeded"));
        assert_eq!(out.text.lines().filter(|l| l.starts_with("cell")).count(), 2);
    }

    #[test]
    fn cover_commands() {
        let out = run(&["cover", "--curve", "p=5;a=1;f=y - x", "--n", "2"]).unwrap();
        assert_eq!(out.outcome, Outcome::Pass);
        let out = run(&["cover", "--curve", "p=5;a=1;f=y^2 - x^3 - t*x", "--n", "3"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!((v["certificate"]["s"].as_u64(), v["certificate"]["beta"].as_u64()), (Some(3), Some(1)));
        assert!(run(&["cover", "--curve", "p=5;a=1;f=y^2 - x^2", "--n", "2"]).is_err());
        let err = run(&["cover", "--curve", "p=5;a=1;f=y^2 - x^", "--n", "2"]).unwrap_err();
        assert!(err.to_string().contains("position"), "{err}");
    }

    #[test]
    fn audit_rows_hold() {
        let rows = audit_rows(5, 15).unwrap();
        assert!(rows.iter().all(|r| r.hf_residual == 0 && r.sigma_residual == 0 && r.le_half));
        assert_eq!((rows[2].a1.as_str(), rows[2].a2.as_str()), ("0", "1/2"));
        assert_eq!(rows[0].hf_at_s_max, 16);
        assert!(audit_rows(7, 15).is_err());
    }

    #[test]
    fn trcheck_outcomes() {
        assert_eq!(run(&["trcheck", "--chart", "bundled:x2", "--r", "2"]).unwrap().outcome, Outcome::Pass);
        assert_eq!(run(&["trcheck", "--chart", "bundled:adversarial"]).unwrap().outcome, Outcome::Fail);
        assert_eq!(
            run(&["trcheck", "--chart", "bundled:x2", "--r", "40"]).unwrap().outcome,
            Outcome::Inconclusive
        );
        assert!(run(&["trcheck", "--chart", "bundled:nope"]).is_err());
    }

    #[test]
    fn bounds_record() {
        let out = run(&["bounds", "--q", "5", "--n", "3", "--delta", "2", "--d", "10", "--m", "2"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["main_bound"]["shape_value"], 225);
        assert_eq!(v["alpha"], "6");
    }
}
