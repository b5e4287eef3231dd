//! `swsh`: batch front end for the spin-weighted spheroidal series engine.
//!
//! Exit status: 0 on success, 1 for configuration or validation errors,
//! 2 when a verification run finds a broken invariant.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use swsh_core::eigenfunction::{excited_wavefunction, residual_grid, GroundState};
use swsh_core::oracle::{assemble, compare_row, default_lmax, finish_report, lowest_eigenvalues};
use swsh_core::rational::{format_rational, parse_rational, validate_m};
use swsh_core::series::build_series;
use swsh_core::shape::flow_chain;
use swsh_core::verify::{verify, VerifyConfig, SCHEMA};
use swsh_core::Rational;

const THREADS_VAR: &str = "SWSH_SEED_THREADS";
const GRID_POINTS: usize = 201;

#[derive(Parser, Debug)]
#[command(name = "swsh", version, about = "Perturbative spin-1/2 spheroidal eigenproblem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Superpotential and energy coefficient table.
    Coeffs(Args),
    /// Ground eigenvalue: series sum against the spectral oracle.
    Eigen(Args),
    /// Wavefunction samples on a uniform θ grid.
    Wavefunc(Args),
    /// Shape-invariance flow and excited-level energy coefficients.
    Excited(Args),
    /// Full invariant suite with a pass/fail report.
    Verify(Args),
    /// Raw eigenvalue table from the spectral oracle.
    Oracle(Args),
}

#[derive(clap::Args, Debug, Clone)]
struct Args {
    /// Azimuthal number, "p/q" or an integer.
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    m: String,
    /// Series order N.
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// A single β or a sweep `start:stop:count`.
    #[arg(long, default_value = "0.1", allow_hyphen_values = true)]
    beta: String,
    /// Level index: excited level (default 1 for excited/verify, 0 for
    /// wavefunc) or highest oracle level (default 0).
    #[arg(long)]
    level: Option<usize>,
    /// Initial oracle truncation (doubled until self-converged).
    #[arg(long)]
    lmax: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Config(String),
    Verification,
}

impl From<swsh_core::Error> for Failure {
    fn from(e: swsh_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

/// `"x"` or `"start:stop:count"`, endpoints included.
fn parse_betas(spec: &str) -> CliResult<Vec<f64>> {
    let num = |s: &str| -> CliResult<f64> {
        let x: f64 = s.trim().parse().map_err(|_| config(format!("bad beta value {s:?}")))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(config(format!("beta {s:?} is not finite")))
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| config(format!("bad sweep count {n:?}")))?;
            if n == 0 {
                return Err(config("sweep count must be at least 1"));
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        _ => Err(config(format!("beta must be a number or start:stop:count, got {spec:?}"))),
    }
}

fn parse_m(text: &str) -> CliResult<Rational> {
    let m = parse_rational(text)?;
    validate_m(&m)?;
    Ok(m)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn coeffs(a: &Args) -> CliResult<String> {
    let m = parse_m(&a.m)?;
    let series = build_series(&m, a.order)?;
    match a.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = series.to_json();
            v["schema"] = json!(SCHEMA);
            Ok(render_json(&v))
        }
        Format::Csv => {
            let mut out = String::from("n,kind,index,value\n");
            for (n, e) in series.energy().iter().enumerate() {
                writeln!(out, "{n},E,0,{}", format_rational(e)).unwrap();
            }
            for n in 1..=series.order() {
                let w = series.w(n);
                for (k, v) in w.cos_part() {
                    writeln!(out, "{n},a,{k},{}", format_rational(v)).unwrap();
                }
                for (k, v) in w.sin_part() {
                    writeln!(out, "{n},b,{k},{}", format_rational(v)).unwrap();
                }
            }
            Ok(out)
        }
    }
}

fn eigen(a: &Args) -> CliResult<String> {
    let m = parse_m(&a.m)?;
    let betas = parse_betas(&a.beta)?;
    let series = build_series(&m, a.order)?;
    let rows = betas
        .par_iter()
        .map(|&b| compare_row(&series, b))
        .collect::<Result<Vec<_>, _>>()?;
    let report = finish_report(&series, rows);
    match a.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(report.to_csv()),
        Format::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| json!({"beta": num(r.beta), "E_series": num(r.series), "E_oracle": num(r.oracle), "abs_diff": num(r.abs_diff)}))
                .collect();
            Ok(render_json(&json!({
                "schema": SCHEMA,
                "m": format_rational(&m),
                "order": a.order,
                "rows": rows,
                "fitted_order": report.fitted_order.map(num),
            })))
        }
    }
}

fn wavefunc(a: &Args) -> CliResult<String> {
    let m = parse_m(&a.m)?;
    let betas = parse_betas(&a.beta)?;
    if a.format == Some(Format::Json) {
        return Err(config("wavefunc emits CSV only"));
    }
    let series = build_series(&m, a.order)?;
    let grid = residual_grid(GRID_POINTS);
    let level = a.level.unwrap_or(0);
    let blocks = betas
        .par_iter()
        .map(|&b| -> swsh_core::Result<String> {
            if level == 0 {
                Ok(GroundState::new(&series, b)?.to_csv(&grid))
            } else {
                let st = excited_wavefunction(&series, level, b)?;
                let mut s = String::from("theta,psi,residual\n");
                for &t in &grid {
                    writeln!(s, "{},{},{}", num(t), num(st.psi(t)), num(st.residual_at(t))).unwrap();
                }
                Ok(s)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if betas.len() == 1 {
        return Ok(blocks.into_iter().next().unwrap());
    }
    // Sweeps get a leading beta column.
    let mut out = String::new();
    for (i, (b, block)) in betas.iter().zip(&blocks).enumerate() {
        let mut lines = block.lines();
        let header = lines.next().unwrap_or_default();
        if i == 0 {
            writeln!(out, "beta,{header}").unwrap();
        }
        for line in lines {
            writeln!(out, "{},{line}", num(*b)).unwrap();
        }
    }
    Ok(out)
}

/// Flow JSON plus the `level,order,coefficient` energy table.
fn excited(a: &Args) -> CliResult<(String, String)> {
    let m = parse_m(&a.m)?;
    let level = a.level.unwrap_or(1);
    if level == 0 {
        return Err(config("excited needs --level >= 1"));
    }
    let series = build_series(&m, a.order)?;
    let chain = flow_chain(&series, level)?;
    let steps: Vec<Value> = chain
        .iter()
        .enumerate()
        .map(|(k, s)| json!({"step": k + 1, "from": s.from.to_json(), "orders": s.to_json()}))
        .collect();
    let mut energy = series.energy().to_vec();
    let mut csv = String::from("level,order,coefficient\n");
    let mut levels = Vec::new();
    for l in 0..=level {
        if l > 0 {
            for (e, r) in energy.iter_mut().zip(&chain[l - 1].remainder) {
                *e += r;
            }
        }
        for (n, e) in energy.iter().enumerate() {
            writeln!(csv, "{l},{n},{}", format_rational(e)).unwrap();
        }
        levels.push(json!({"level": l, "energy": energy.iter().map(format_rational).collect::<Vec<_>>()}));
    }
    let doc = json!({
        "schema": SCHEMA,
        "m": format_rational(&m),
        "order": a.order,
        "steps": steps,
        "levels": levels,
    });
    Ok((render_json(&doc), csv))
}

fn oracle(a: &Args) -> CliResult<String> {
    let m = parse_m(&a.m)?;
    let betas = parse_betas(&a.beta)?;
    let k = a.level.unwrap_or(0) + 1;
    let lmax = a.lmax.unwrap_or_else(|| default_lmax(k));
    let results = betas
        .par_iter()
        .map(|&b| lowest_eigenvalues(&assemble(&m, b, lmax)?, k))
        .collect::<Result<Vec<_>, _>>()?;
    match a.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("beta,level,eigenvalue,truncation_error,lmax\n");
            for (b, r) in betas.iter().zip(&results) {
                for (l, e) in r.eigenvalues.iter().enumerate() {
                    writeln!(out, "{},{l},{},{},{}", num(*b), num(*e), num(r.truncation_error), r.lmax).unwrap();
                }
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<Value> = betas
                .iter()
                .zip(&results)
                .map(|(b, r)| {
                    json!({
                        "beta": num(*b),
                        "eigenvalues": r.eigenvalues.iter().map(|&e| num(e)).collect::<Vec<_>>(),
                        "truncation_error": num(r.truncation_error),
                        "lmax": r.lmax,
                    })
                })
                .collect();
            Ok(render_json(&json!({"schema": SCHEMA, "m": format_rational(&m), "rows": rows})))
        }
    }
}

fn run_verify(a: &Args) -> CliResult<bool> {
    let m = parse_m(&a.m)?;
    if a.format == Some(Format::Csv) {
        return Err(config("verify emits JSON only"));
    }
    let report = verify(&VerifyConfig {
        m,
        order: a.order,
        levels: a.level.unwrap_or(1),
    })?;
    emit(a.out.as_deref(), &report.render())?;
    Ok(report.passed)
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Coeffs(a) => emit(a.out.as_deref(), &coeffs(a)?),
        Command::Eigen(a) => emit(a.out.as_deref(), &eigen(a)?),
        Command::Wavefunc(a) => emit(a.out.as_deref(), &wavefunc(a)?),
        Command::Oracle(a) => emit(a.out.as_deref(), &oracle(a)?),
        Command::Excited(a) => {
            let (flow, csv) = excited(a)?;
            match (&a.out, a.format) {
                (Some(p), _) => {
                    emit(Some(p), &flow)?;
                    emit(Some(&p.with_extension("csv")), &csv)
                }
                (None, Some(Format::Csv)) => emit(None, &csv),
                (None, _) => emit(None, &flow),
            }
        }
        Command::Verify(a) => {
            if run_verify(a)? {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(text) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config(format!("{THREADS_VAR} must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
