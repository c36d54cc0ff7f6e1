//! Command-line surface: build/cache coefficient tables, reproduce the three
//! reference tables, run per-module property suites, and export columnar
//! plot data.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/configuration
//! error, 3 numeric failure.

use crate::coeffs::{build_freud_table, gamma_constants, lew_quarles_estimate, FreudTable};
use crate::error::{FreudError, Result};
use crate::freud::{boundary_values, eval_chain, kernel_at_zero, kernel_at_zero_confluent};
use crate::holonomic::{
    biquartic, cross_relative_gap, electrostatic_residual, ladder_system, ode_coeffs, u_roots,
    v_ext, RationalFn,
};
use crate::sobolev::{
    build_sobolev_table, eval_q, five_term, sobolev_inner_oracle, PolySpec, SobolevParams,
};
use crate::zeros::{freud_zeros, interlacing_report, q_zeros};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "freud-sobolev",
    version,
    about = "Orthogonal polynomials for the quartic exponential weight and their point-mass modification: coefficient tables, reference-table reproduction, property verification, and plot-data export"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce one of the three reference tables (zero locations for
    /// degrees 4/5, and quartic root magnitudes for odd degrees).
    Table(TableArgs),
    /// Run a module property suite and report one pass/fail line per
    /// property with the measured residual and its tolerance.
    Verify(VerifyArgs),
    /// Export columnar data files for plotting.
    ExportPlot(ExportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Highest degree covered by the coefficient table (raised automatically
    /// when a command needs more).
    #[arg(long = "n-max", default_value_t = 40)]
    n_max: usize,
    /// Decimal digits carried by the high-precision coefficient solve.
    #[arg(long, default_value_t = 64)]
    precision: u32,
    /// Mass attached to the function value at the origin.
    #[arg(long = "M0")]
    m0: Option<f64>,
    /// Mass attached to the derivative value at the origin.
    #[arg(long = "M1")]
    m1: Option<f64>,
    /// Comma-separated mass grid for sweeps and table rows.
    #[arg(long = "M1-grid", value_delimiter = ',')]
    m1_grid: Option<Vec<f64>>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    /// Coefficient-table cache file (read if present, else built and written).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Override a verification tolerance, e.g. --tol-override ode_residual=1e-6.
    #[arg(long = "tol-override", value_name = "KEY=VAL")]
    tol_override: Vec<String>,
    /// Print full binary precision instead of fixed 6 decimals.
    #[arg(long = "full-precision")]
    full_precision: bool,
    /// Degree selector for single-polynomial operations.
    #[arg(long)]
    n: Option<usize>,
    /// Odd-degree range a..b for the quartic-root export.
    #[arg(long = "n-odd", value_name = "A..B")]
    n_odd: Option<String>,
}

#[derive(Args)]
struct TableArgs {
    /// Which reference table to reproduce (1, 2, or 3).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    id: u8,
    /// Reference data file; adds per-cell |computed − reference| columns.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Emit JSON (alias for --format json).
    #[arg(long = "emit-json")]
    emit_json: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which property suite to run.
    #[arg(long, value_enum)]
    suite: Suite,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ExportArgs {
    /// Which data set to export.
    #[arg(long, value_enum)]
    kind: PlotKind,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Tsv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Coeffs,
    Freud,
    Sobolev,
    Zeros,
    Holonomic,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    #[value(name = "zero_trajectories", alias = "zero-trajectories")]
    ZeroTrajectories,
    Polynomials,
    #[value(name = "u_roots", alias = "u-roots")]
    URoots,
    Potential,
}

/// Entry point used by the binary; terminates the process.
pub fn run() -> ! {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    std::process::exit(code)
}

fn exit_code_for(e: &FreudError) -> i32 {
    match e {
        FreudError::Config(_)
        | FreudError::Domain(_)
        | FreudError::Parse(_)
        | FreudError::TableExhausted { .. } => 2,
        _ => 3,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Command::Table(args) => cmd_table(args),
        Command::Verify(args) => cmd_verify(args),
        Command::ExportPlot(args) => cmd_export_plot(args),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

fn load_table(common: &CommonArgs, required_n_max: usize) -> Result<FreudTable> {
    let n_max = common.n_max.max(required_n_max);
    if let Some(path) = &common.cache {
        if path.exists() {
            let t = FreudTable::read_cache(path)?;
            if t.n_max >= n_max && t.precision_digits >= common.precision {
                return Ok(t);
            }
        }
        let t = build_freud_table(n_max, common.precision)?;
        t.write_cache(path)?;
        return Ok(t);
    }
    build_freud_table(n_max, common.precision)
}

fn write_out(common: &CommonArgs, content: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn sep(format: OutFormat) -> &'static str {
    match format {
        OutFormat::Tsv => "\t",
        _ => ",",
    }
}

fn fmt_val(v: f64, full: bool) -> String {
    if full {
        format!("{v}")
    } else {
        format!("{v:.6}")
    }
}

/// Round to the printed precision so JSON output round-trips bit-for-bit
/// against the fixed-decimal text output.
fn json_val(v: f64, full: bool) -> f64 {
    if full {
        v
    } else {
        format!("{v:.6}").parse().expect("fixed-decimal reparse")
    }
}

fn parse_tol_overrides(spec: &[String]) -> Result<HashMap<String, f64>> {
    let mut map = HashMap::new();
    for s in spec {
        let (k, v) = s.split_once('=').ok_or_else(|| {
            FreudError::Config(format!("tolerance override '{s}' is not KEY=VAL"))
        })?;
        let val: f64 = v
            .parse()
            .map_err(|_| FreudError::Config(format!("tolerance value '{v}' is not a number")))?;
        if val.is_nan() || val <= 0.0 {
            return Err(FreudError::Config(format!(
                "tolerance for '{k}' must be positive, got {v}"
            )));
        }
        map.insert(k.to_string(), val);
    }
    Ok(map)
}

fn parse_odd_range(spec: &str) -> Result<Vec<usize>> {
    let (a, b) = spec
        .split_once("..")
        .ok_or_else(|| FreudError::Config(format!("degree range '{spec}' is not A..B")))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| FreudError::Config(format!("bad range start '{a}'")))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| FreudError::Config(format!("bad range end '{b}'")))?;
    if a > b {
        return Err(FreudError::Config(format!("empty degree range '{spec}'")));
    }
    Ok((a..=b).filter(|d| d % 2 == 1).collect())
}

// ---------------------------------------------------------------------------
// table command

/// Reference rows parsed from a checked-in data file: leading `#` comment
/// lines are skipped, the header line is ignored, and each row is keyed by
/// its first numeric field.
fn read_reference(path: &PathBuf) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        FreudError::Config(format!("cannot read reference file {}: {e}", path.display()))
    })?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0].parse::<f64>().is_err() {
            continue; // header
        }
        let mut row = Vec::new();
        for f in fields {
            match f.trim().parse::<f64>() {
                Ok(v) => row.push(v),
                Err(_) => break, // trailing non-numeric marker column
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn find_reference_row(rows: &[Vec<f64>], key: f64) -> Option<&Vec<f64>> {
    rows.iter()
        .find(|r| !r.is_empty() && (r[0] - key).abs() <= 1e-9 * (1.0 + key.abs()))
}

struct ZeroTableRow {
    m1: f64,
    cells: [f64; 5],
    rupture: bool,
}

/// Tables of the inner zeros of the degree-5 and degree-4 modified
/// polynomials: columns are the 2nd..4th zeros of degree 5 interleaved with
/// the 2nd/3rd zeros of degree 4, one row per derivative mass.
fn zero_table_rows(ft: &FreudTable, m0: f64, grid: &[f64]) -> Result<Vec<ZeroTableRow>> {
    let mut rows = Vec::new();
    for &m1 in grid {
        let st = build_sobolev_table(ft, SobolevParams::new(m0, m1)?, 7)?;
        let z5 = q_zeros(&st, ft, 5)?.zeros;
        let z4 = q_zeros(&st, ft, 4)?.zeros;
        let rupture = !interlacing_report(&st, ft, 4)?.holds;
        rows.push(ZeroTableRow {
            m1,
            cells: [z5[1], z4[1], z5[2], z4[2], z5[3]],
            rupture,
        });
    }
    Ok(rows)
}

const ZERO_TABLE_HEADER: [&str; 5] = ["eta_5_2", "eta_4_2", "eta_5_3", "eta_4_3", "eta_5_4"];

fn cmd_table(args: TableArgs) -> Result<i32> {
    let common = &args.common;
    let format = if args.emit_json {
        OutFormat::Json
    } else {
        common.format
    };
    let full = common.full_precision;
    let reference = match &args.reference {
        Some(p) => Some(read_reference(p)?),
        None => None,
    };
    let content = match args.id {
        1 | 2 => {
            let ft = load_table(common, 9)?;
            let m0 = common.m0.unwrap_or(if args.id == 1 { 0.0 } else { 1.0 });
            let default_grid: &[f64] = if args.id == 1 {
                &[0.0, 0.2, 0.4, 1.0]
            } else {
                &[0.0, 0.4, 0.9, 2.0]
            };
            let grid: Vec<f64> = match (&common.m1_grid, common.m1) {
                (Some(g), _) => g.clone(),
                (None, Some(m1)) => vec![m1],
                (None, None) => default_grid.to_vec(),
            };
            if grid.is_empty() {
                return Err(FreudError::Config("empty mass grid".into()));
            }
            let rows = zero_table_rows(&ft, m0, &grid)?;
            render_zero_table(args.id, m0, &rows, reference.as_deref(), format, full)?
        }
        3 => {
            let masses: Vec<f64> = common
                .m1_grid
                .clone()
                .unwrap_or_else(|| vec![0.1, 1.0, 10.0]);
            if masses.is_empty() {
                return Err(FreudError::Config("empty mass grid".into()));
            }
            let degrees: Vec<usize> = match &common.n_odd {
                Some(spec) => parse_odd_range(spec)?,
                None => (1..=19).step_by(2).collect(),
            };
            let max_deg = *degrees.iter().max().unwrap_or(&1);
            let ft = load_table(common, max_deg + 2)?;
            let rows = u_root_rows(&ft, &masses, &degrees)?;
            render_root_table(&masses, &rows, reference.as_deref(), format, full)?
        }
        _ => unreachable!("clap range check"),
    };
    write_out(common, &content)?;
    Ok(0)
}

fn render_zero_table(
    id: u8,
    m0: f64,
    rows: &[ZeroTableRow],
    reference: Option<&[Vec<f64>]>,
    format: OutFormat,
    full: bool,
) -> Result<String> {
    if format == OutFormat::Json {
        let rows_json: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::json!({
                    "m1": r.m1,
                    "cells": r.cells.iter().map(|&v| json_val(v, full)).collect::<Vec<_>>(),
                    "rupture": r.rupture,
                });
                if let Some(refs) = reference {
                    if let Some(rr) = find_reference_row(refs, r.m1) {
                        let deltas: Vec<f64> = r
                            .cells
                            .iter()
                            .zip(rr.iter().skip(1))
                            .map(|(&c, &p)| (c - p).abs())
                            .collect();
                        obj["deltas"] = serde_json::json!(deltas);
                    }
                }
                obj
            })
            .collect();
        let doc = serde_json::json!({
            "id": id,
            "m0": m0,
            "columns": ZERO_TABLE_HEADER,
            "rows": rows_json,
        });
        return Ok(format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")));
    }
    let d = sep(format);
    let mut out = String::new();
    write!(out, "M1").expect("string write");
    for h in ZERO_TABLE_HEADER {
        write!(out, "{d}{h}").expect("string write");
    }
    write!(out, "{d}rupture").expect("string write");
    if reference.is_some() {
        for h in ZERO_TABLE_HEADER {
            write!(out, "{d}delta_{h}").expect("string write");
        }
    }
    out.push('\n');
    for r in rows {
        write!(out, "{}", fmt_val(r.m1, true)).expect("string write");
        for &c in &r.cells {
            write!(out, "{d}{}", fmt_val(c, full)).expect("string write");
        }
        write!(out, "{d}{}", r.rupture).expect("string write");
        if let Some(refs) = reference {
            match find_reference_row(refs, r.m1) {
                Some(rr) => {
                    for (c, p) in r.cells.iter().zip(rr.iter().skip(1)) {
                        write!(out, "{d}{:.2e}", (c - p).abs()).expect("string write");
                    }
                }
                None => {
                    for _ in 0..5 {
                        write!(out, "{d}").expect("string write");
                    }
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

struct RootTableRow {
    n: usize,
    /// (re, im) magnitude pairs, one per mass.
    cells: Vec<(f64, f64)>,
}

fn u_root_rows(ft: &FreudTable, masses: &[f64], degrees: &[usize]) -> Result<Vec<RootTableRow>> {
    let max_deg = *degrees.iter().max().unwrap_or(&1);
    let mut tables = Vec::new();
    for &m1 in masses {
        tables.push(build_sobolev_table(
            ft,
            SobolevParams::new(0.0, m1)?,
            max_deg,
        )?);
    }
    let mut rows = Vec::new();
    for &deg in degrees {
        let mut cells = Vec::new();
        for st in &tables {
            let (u4, u2, u0) = biquartic(st, ft, deg)?;
            let roots = u_roots(u4, u2, u0)?;
            let re = roots.zeros[1].max(0.0).sqrt();
            let im = (-roots.zeros[0]).max(0.0).sqrt();
            cells.push((re, im));
        }
        rows.push(RootTableRow { n: deg, cells });
    }
    Ok(rows)
}

fn render_root_table(
    masses: &[f64],
    rows: &[RootTableRow],
    reference: Option<&[Vec<f64>]>,
    format: OutFormat,
    full: bool,
) -> Result<String> {
    if format == OutFormat::Json {
        let rows_json: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                let flat: Vec<f64> = r
                    .cells
                    .iter()
                    .flat_map(|&(re, im)| [json_val(re, full), json_val(im, full)])
                    .collect();
                let mut obj = serde_json::json!({ "n": r.n, "cells": flat });
                if let Some(refs) = reference {
                    if let Some(rr) = find_reference_row(refs, r.n as f64) {
                        let deltas: Vec<f64> = r
                            .cells
                            .iter()
                            .flat_map(|&(re, im)| [re, im])
                            .zip(rr.iter().skip(1))
                            .map(|(c, &p)| (c - p).abs())
                            .collect();
                        obj["deltas"] = serde_json::json!(deltas);
                    }
                }
                obj
            })
            .collect();
        let doc = serde_json::json!({
            "id": 3,
            "masses": masses,
            "rows": rows_json,
        });
        return Ok(format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")));
    }
    let d = sep(format);
    let mut out = String::new();
    write!(out, "n").expect("string write");
    for &m in masses {
        let ms = fmt_val(m, true);
        write!(out, "{d}re_{ms}{d}im_{ms}").expect("string write");
    }
    if reference.is_some() {
        for &m in masses {
            let ms = fmt_val(m, true);
            write!(out, "{d}delta_re_{ms}{d}delta_im_{ms}").expect("string write");
        }
    }
    out.push('\n');
    for r in rows {
        write!(out, "{}", r.n).expect("string write");
        for &(re, im) in &r.cells {
            write!(out, "{d}{}{d}{}", fmt_val(re, full), fmt_val(im, full)).expect("string write");
        }
        if let Some(refs) = reference {
            match find_reference_row(refs, r.n as f64) {
                Some(rr) => {
                    let flat: Vec<f64> = r.cells.iter().flat_map(|&(re, im)| [re, im]).collect();
                    for (c, p) in flat.iter().zip(rr.iter().skip(1)) {
                        write!(out, "{d}{:.2e}", (c - p).abs()).expect("string write");
                    }
                }
                None => {
                    for _ in 0..2 * masses.len() {
                        write!(out, "{d}").expect("string write");
                    }
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// verify command

struct PropLine {
    name: &'static str,
    measured: f64,
    tol: f64,
}

impl PropLine {
    fn pass(&self) -> bool {
        self.measured <= self.tol
    }
}

struct VerifyCtx<'a> {
    ft: &'a FreudTable,
    params: SobolevParams,
    n: usize,
    tol: HashMap<String, f64>,
}

impl VerifyCtx<'_> {
    fn line(&self, name: &'static str, measured: f64, default_tol: f64) -> PropLine {
        let short = name.rsplit('.').next().unwrap_or(name);
        let tol = self
            .tol
            .get(name)
            .or_else(|| self.tol.get(short))
            .copied()
            .unwrap_or(default_tol);
        PropLine {
            name,
            measured,
            tol,
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let common = &args.common;
    let n = common.n.unwrap_or(7);
    let ft = load_table(common, (n + 4).max(24))?;
    let ctx = VerifyCtx {
        ft: &ft,
        params: SobolevParams::new(common.m0.unwrap_or(0.0), common.m1.unwrap_or(0.0))?,
        n,
        tol: parse_tol_overrides(&common.tol_override)?,
    };
    let mut lines = Vec::new();
    let suites: &[Suite] = match args.suite {
        Suite::All => &[
            Suite::Coeffs,
            Suite::Freud,
            Suite::Sobolev,
            Suite::Zeros,
            Suite::Holonomic,
        ],
        s => &[s],
    };
    for s in suites {
        match s {
            Suite::Coeffs => verify_coeffs(&ctx, &mut lines)?,
            Suite::Freud => verify_freud(&ctx, &mut lines)?,
            Suite::Sobolev => verify_sobolev(&ctx, &mut lines)?,
            Suite::Zeros => verify_zeros(&ctx, &mut lines)?,
            Suite::Holonomic => verify_holonomic(&ctx, &mut lines)?,
            Suite::All => unreachable!(),
        }
    }
    let all_pass = lines.iter().all(|l| l.pass());
    let content = if common.format == OutFormat::Json {
        let items: Vec<serde_json::Value> = lines
            .iter()
            .map(|l| {
                serde_json::json!({
                    "name": l.name,
                    "status": if l.pass() { "pass" } else { "fail" },
                    "measured": l.measured,
                    "tolerance": l.tol,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "properties": items,
            "result": if all_pass { "pass" } else { "fail" },
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
    } else {
        let mut out = String::new();
        for l in &lines {
            writeln!(
                out,
                "{} {} measured={:.3e} tol={:.3e}",
                if l.pass() { "PASS" } else { "FAIL" },
                l.name,
                l.measured,
                l.tol
            )
            .expect("string write");
        }
        writeln!(
            out,
            "RESULT {} ({} properties)",
            if all_pass { "pass" } else { "fail" },
            lines.len()
        )
        .expect("string write");
        out
    };
    write_out(common, &content)?;
    Ok(if all_pass { 0 } else { 1 })
}

fn verify_coeffs(ctx: &VerifyCtx, lines: &mut Vec<PropLine>) -> Result<()> {
    let ft = ctx.ft;
    let gc = gamma_constants(ft.precision_digits)?;
    let a1_exact = gc.a1_sq_exact.to_f64();
    lines.push(ctx.line(
        "coeffs.a1_certificate",
        (ft.a_sq[1] - a1_exact).abs(),
        1e-10,
    ));
    let mut worst = 0.0f64;
    for n in 1..ft.n_max {
        worst = worst.max(ft.string_residual(n) / n as f64);
    }
    lines.push(ctx.line("coeffs.string_residual_scaled", worst, 1e-12));
    let mut chain = 0.0f64;
    for n in 1..=ft.n_max {
        chain = chain.max((ft.norm_sq[n] - ft.norm_sq[n - 1] * ft.a_sq[n]).abs());
    }
    lines.push(ctx.line("coeffs.norm_chain_identity", chain, 0.0));
    let mut ratio = 0.0f64;
    for n in [10usize, 15] {
        let e1 = (lew_quarles_estimate(n)? - ft.a_sq[n]).abs();
        let e2 = (lew_quarles_estimate(2 * n)? - ft.a_sq[2 * n]).abs();
        ratio = ratio.max(e2 / e1);
    }
    lines.push(ctx.line("coeffs.estimate_tail_decay", ratio, 1.0));
    Ok(())
}

fn verify_freud(ctx: &VerifyCtx, lines: &mut Vec<PropLine>) -> Result<()> {
    let ft = ctx.ft;
    let bv = boundary_values(ft, ft.n_max)?;
    let mut parity = 0.0f64;
    for k in 0..=ft.n_max {
        if k % 2 == 1 {
            parity = parity.max(bv.f[k].abs()).max(bv.d2[k].abs());
        } else {
            parity = parity.max(bv.d1[k].abs()).max(bv.d3[k].abs());
        }
    }
    lines.push(ctx.line("freud.boundary_parity_exact", parity, 0.0));
    let mut refl = 0.0f64;
    for n in [8usize, 9] {
        let plus = eval_chain(ft, n, 0.83, 0)?.monic(0);
        let minus = eval_chain(ft, n, -0.83, 0)?.monic(0);
        let expect = if n % 2 == 0 { plus } else { -plus };
        refl = refl.max((minus - expect).abs());
    }
    lines.push(ctx.line("freud.reflection_parity_exact", refl, 0.0));
    let mut conf = 0.0f64;
    for n in [10usize, 20] {
        let kv = kernel_at_zero(ft, n)?;
        let (c00, c11) = kernel_at_zero_confluent(ft, n)?;
        conf = conf
            .max((c00 / kv.k00 - 1.0).abs())
            .max((c11 / kv.k11 - 1.0).abs());
    }
    lines.push(ctx.line("freud.kernel_confluent_consistency", conf, 1e-12));
    let mut growth = 0.0f64;
    for n in 1..=(ft.n_max - 1) {
        let prev = kernel_at_zero(ft, n - 1)?;
        let cur = kernel_at_zero(ft, n)?;
        growth = growth.max(prev.k00 - cur.k00).max(prev.k11 - cur.k11);
    }
    lines.push(ctx.line("freud.kernel_monotone_growth", growth.max(0.0), 0.0));
    Ok(())
}

fn verify_sobolev(ctx: &VerifyCtx, lines: &mut Vec<PropLine>) -> Result<()> {
    let ft = ctx.ft;
    let n_top = 12.min(ft.n_max - 2);
    let st0 = build_sobolev_table(ft, SobolevParams::new(0.0, 0.0)?, n_top)?;
    let mut red = 0.0f64;
    for n in [4usize, 7] {
        for &x in &[0.0, 0.61, -1.3] {
            let q = eval_q(&st0, ft, n, x, 0)?[0];
            let f = eval_chain(ft, n, x, 0)?.monic(0);
            red = red.max((q - f).abs());
        }
    }
    lines.push(ctx.line("sobolev.zero_mass_reduction_exact", red, 0.0));

    let st = build_sobolev_table(ft, ctx.params, n_top)?;
    let mut five = 0.0f64;
    for n in 2..=(n_top - 2) {
        let (lnn, lnm2) = five_term(&st, n)?;
        let lnm2 = lnm2.expect("interior index");
        for i in 0..=40 {
            let x = -2.0 + 0.1 * i as f64;
            let qm2 = eval_q(&st, ft, n - 2, x, 0)?[0];
            let qn = eval_q(&st, ft, n, x, 0)?[0];
            let qp2 = eval_q(&st, ft, n + 2, x, 0)?[0];
            let terms = [x * x * qn, -qp2, -lnn * qn, -lnm2 * qm2];
            let res = (qp2 + lnn * qn + lnm2 * qm2 - x * x * qn).abs();
            let scale = terms.iter().fold(1.0f64, |m, t| m.max(t.abs()));
            five = five.max(res / scale);
        }
    }
    lines.push(ctx.line("sobolev.five_term_residual", five, 1e-9));

    let m0 = ctx.params.m0;
    let m1 = ctx.params.m1;
    let st_m0 = build_sobolev_table(ft, SobolevParams::new(m0, 0.0)?, n_top)?;
    let st_m1 = build_sobolev_table(ft, SobolevParams::new(0.0, m1)?, n_top)?;
    let mut dec = 0.0f64;
    for &x in &[0.37, 1.21] {
        let even = eval_q(&st, ft, 8, x, 0)?[0] - eval_q(&st_m0, ft, 8, x, 0)?[0];
        let odd = eval_q(&st, ft, 7, x, 0)?[0] - eval_q(&st_m1, ft, 7, x, 0)?[0];
        dec = dec.max(even.abs()).max(odd.abs());
    }
    lines.push(ctx.line("sobolev.parity_decoupling_exact", dec, 0.0));

    let mut nr = 0.0f64;
    for n in 1..=n_top {
        let kv_n = kernel_at_zero(ft, n)?;
        let kv_m = kernel_at_zero(ft, n - 1)?;
        let pred = (1.0 + m0 * kv_n.k00) * (1.0 + m1 * kv_n.k11)
            / ((1.0 + m0 * kv_m.k00) * (1.0 + m1 * kv_m.k11));
        let have = st.qnorm_sq[n] / ft.norm_sq[n];
        nr = nr.max((have / pred - 1.0).abs());
    }
    lines.push(ctx.line("sobolev.norm_ratio_identity", nr, 1e-12));

    let mut ortho = 0.0f64;
    for m in 0..=5usize {
        for n in (m + 1)..=5 {
            let ip = sobolev_inner_oracle(ft, ctx.params, PolySpec::Q(m), PolySpec::Q(n))?;
            let nm = sobolev_inner_oracle(ft, ctx.params, PolySpec::Q(m), PolySpec::Q(m))?;
            let nn = sobolev_inner_oracle(ft, ctx.params, PolySpec::Q(n), PolySpec::Q(n))?;
            ortho = ortho.max(ip.abs() / (nm * nn).sqrt());
        }
    }
    lines.push(ctx.line("sobolev.orthogonality_oracle", ortho, 1e-8));
    Ok(())
}

fn verify_zeros(ctx: &VerifyCtx, lines: &mut Vec<PropLine>) -> Result<()> {
    let ft = ctx.ft;
    let mut fres = 0.0f64;
    for n in [5usize, 9, 12] {
        let zs = freud_zeros(ft, n)?;
        for (z, r) in zs.zeros.iter().zip(&zs.residuals) {
            let scale = eval_chain(ft, n, *z, 1)?.monic(1).abs().max(1.0);
            fres = fres.max(r / scale);
        }
    }
    lines.push(ctx.line("zeros.unmodified_residual_scaled", fres, 1e-10));

    let st = build_sobolev_table(ft, ctx.params, 8)?;
    let mut sym = 0.0f64;
    let mut qres = 0.0f64;
    for n in [5usize, 6, 7] {
        let zs = q_zeros(&st, ft, n)?;
        if !zs.is_symmetric() {
            sym = 1.0;
        }
        for (z, r) in zs.zeros.iter().zip(&zs.residuals) {
            let d = eval_q(&st, ft, n, *z, 1)?[1];
            qres = qres.max(r / d.abs().max(1.0));
        }
    }
    lines.push(ctx.line("zeros.mirror_symmetry_exact", sym, 0.0));
    lines.push(ctx.line("zeros.modified_residual_scaled", qres, 1e-8));

    let st0 = build_sobolev_table(ft, SobolevParams::new(0.0, 0.0)?, 8)?;
    let mut inter = 0.0f64;
    for n in [4usize, 5, 6] {
        if !interlacing_report(&st0, ft, n)?.holds {
            inter = 1.0;
        }
    }
    lines.push(ctx.line("zeros.classical_interlacing", inter, 0.0));
    Ok(())
}

fn verify_holonomic(ctx: &VerifyCtx, lines: &mut Vec<PropLine>) -> Result<()> {
    let ft = ctx.ft;
    let n = ctx.n.max(2);
    let st = build_sobolev_table(ft, ctx.params, n + 2)?;
    let ls = ladder_system(&st, ft, n)?;
    let samples = [0.3, 0.9, 1.7];
    let mut ladder = 0.0f64;
    for &x in &samples {
        let qn = eval_q(&st, ft, n, x, 1)?;
        let qm = eval_q(&st, ft, n - 1, x, 1)?;
        let low = ls.xi2.eval(x) * qn[0] - qn[1] - ls.xi1.eval(x) * qm[0];
        let ls_scale = (ls.xi2.eval(x) * qn[0])
            .abs()
            .max(qn[1].abs())
            .max((ls.xi1.eval(x) * qm[0]).abs());
        let rai = ls.theta1.eval(x) * qm[0] + qm[1] - ls.theta2.eval(x) * qn[0];
        let rs_scale = (ls.theta1.eval(x) * qm[0])
            .abs()
            .max(qm[1].abs())
            .max((ls.theta2.eval(x) * qn[0]).abs());
        ladder = ladder.max(low.abs() / ls_scale).max(rai.abs() / rs_scale);
    }
    lines.push(ctx.line("holonomic.ladder_identities", ladder, 1e-8));

    let ode = ode_coeffs(&ls)?;
    let mut worst = 0.0f64;
    for &x in &samples {
        let q = eval_q(&st, ft, n, x, 2)?;
        let terms = [q[2], ode.r.eval(x) * q[1], ode.s.eval(x) * q[0]];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        worst = worst.max(terms.iter().sum::<f64>().abs() / scale);
    }
    lines.push(ctx.line("holonomic.ode_residual", worst, 1e-7));

    let n_odd = if n % 2 == 1 { n } else { n - 1 };
    if n_odd >= 3 {
        let (u4, u2, u0) = biquartic(&st, ft, n_odd)?;
        let u = RationalFn::from_poly(crate::holonomic::Poly::new(vec![u0, 0.0, u2, 0.0, u4]));
        let closed = RationalFn::inverse_monomial(2.0, 1)
            .sub(&RationalFn::monomial(4.0, 3))
            .sub(&u.derivative().div(&u)?);
        let ls_odd = ladder_system(&st, ft, n_odd)?;
        let ode_odd = ode_coeffs(&ls_odd)?;
        let gap = cross_relative_gap(&ode_odd.r, &closed);
        lines.push(ctx.line("holonomic.odd_closed_form_gap", gap, 1e-8));

        let mut electro = 0.0f64;
        for (_, r) in electrostatic_residual(&st, ft, n_odd)? {
            electro = electro.max(r);
        }
        lines.push(ctx.line("holonomic.equilibrium_residual", electro, 1e-6));
    }
    lines.push(ctx.line(
        "holonomic.system_nondegenerate",
        if ls.lambda.is_zero() || ls.xi1.is_zero() {
            1.0
        } else {
            0.0
        },
        0.0,
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// export-plot command

fn cmd_export_plot(args: ExportArgs) -> Result<i32> {
    let common = &args.common;
    let full = common.full_precision;
    let d = sep(common.format);
    if common.format == OutFormat::Json {
        return Err(FreudError::Config(
            "plot export emits columnar csv/tsv only".into(),
        ));
    }
    let content = match args.kind {
        PlotKind::ZeroTrajectories => {
            let n = common.n.unwrap_or(5);
            let m0 = common.m0.unwrap_or(0.0);
            let grid = common
                .m1_grid
                .clone()
                .unwrap_or_else(|| vec![0.0, 0.2, 2.0]);
            let ft = load_table(common, n + 3)?;
            let mut out = format!("M1{d}k{d}zero\n");
            for &m1 in &grid {
                let st = build_sobolev_table(&ft, SobolevParams::new(m0, m1)?, n + 1)?;
                let zs = q_zeros(&st, &ft, n)?;
                for (k, z) in zs.zeros.iter().enumerate() {
                    writeln!(out, "{}{d}{}{d}{}", fmt_val(m1, true), k + 1, fmt_val(*z, full))
                        .expect("string write");
                }
            }
            out
        }
        PlotKind::Polynomials => {
            let n = common.n.unwrap_or(7);
            let m0 = common.m0.unwrap_or(0.0);
            let m1 = common.m1.unwrap_or(0.0);
            let ft = load_table(common, n + 3)?;
            let st = build_sobolev_table(&ft, SobolevParams::new(m0, m1)?, n + 1)?;
            let mut out = format!("x{d}value\n");
            for i in 0..=200 {
                let x = -2.5 + 0.025 * i as f64;
                let v = eval_q(&st, &ft, n, x, 0)?[0];
                writeln!(out, "{}{d}{}", fmt_val(x, full), fmt_val(v, full))
                    .expect("string write");
            }
            out
        }
        PlotKind::URoots => {
            let m1 = common.m1.unwrap_or(1.0);
            let degrees = match &common.n_odd {
                Some(spec) => parse_odd_range(spec)?,
                None => (1..=19).step_by(2).collect(),
            };
            if degrees.is_empty() {
                return Err(FreudError::Config("empty odd-degree range".into()));
            }
            let max_deg = *degrees.iter().max().unwrap();
            let ft = load_table(common, max_deg + 2)?;
            let rows = u_root_rows(&ft, &[m1], &degrees)?;
            let mut out = format!("M1{d}n{d}re_root{d}im_root\n");
            for r in rows {
                let (re, im) = r.cells[0];
                writeln!(
                    out,
                    "{}{d}{}{d}{}{d}{}",
                    fmt_val(m1, true),
                    r.n,
                    fmt_val(re, full),
                    fmt_val(im, full)
                )
                .expect("string write");
            }
            out
        }
        PlotKind::Potential => {
            let n = common.n.unwrap_or(7);
            if n % 2 != 1 {
                return Err(FreudError::Config(format!(
                    "the potential export needs an odd degree, got {n}"
                )));
            }
            let m1 = common.m1.unwrap_or(1.0);
            let ft = load_table(common, n + 2)?;
            let st = build_sobolev_table(&ft, SobolevParams::new(0.0, m1)?, n)?;
            let (u4, u2, u0) = biquartic(&st, &ft, n)?;
            let mut out = format!("x{d}potential\n");
            for i in 0..=200 {
                let x = -2.5 + 0.025 * i as f64;
                match v_ext(u4, u2, u0, x) {
                    Ok(v) => writeln!(out, "{}{d}{}", fmt_val(x, full), fmt_val(v, full))
                        .expect("string write"),
                    Err(_) => continue, // singular point: skip the sample
                }
            }
            out
        }
    };
    write_out(common, &content)?;
    Ok(0)
}
