//! Full invariant suite with a machine-readable report.
//!
//! Findings fall into three classes:
//! - `EXACT-FAIL`: an exact identity is broken (a defect in this code);
//! - `ORACLE-FAIL`: a series result disagrees with the spectral oracle;
//! - `PAPER-DIVERGENCE`: a printed closed form differs from what the exact
//!   construction yields. Informational; it never fails the run.

use num_traits::One;
use serde_json::{json, Map, Value};

use crate::eigenfunction::{excited_wavefunction, overlap, residual_grid, GroundState};
use crate::error::{Error, Result};
use crate::oracle::{
    aligned_max_distance, chebyshev_samples, compare_report, eigenvalue_slope, log_log_slope,
    oracle_eigenvalues, series_fit, OracleEigenfunction,
};
use crate::rational::{format_rational, int, rat, to_f64, validate_m, Rational};
use crate::reference::{self, FlowParams};
use crate::series::{build_series, crosscheck_identities, riccati_residual, SuperpotentialSeries};
use crate::shape::{flow_chain, solve_flow_step, verify_invariance, ShapeParamSet};
use crate::trig::TrigPoly;

pub const SCHEMA: u32 = 1;
const SLOPE_BETAS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const SLOPE_SLACK: f64 = 0.3;

pub const EXACT_FAIL: &str = "EXACT-FAIL";
pub const ORACLE_FAIL: &str = "ORACLE-FAIL";
pub const PAPER_DIVERGENCE: &str = "PAPER-DIVERGENCE";

fn num(x: f64) -> Value {
    json!(format!("{x:.16e}"))
}

fn r(x: &Rational) -> Value {
    json!(format_rational(x))
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub m: Rational,
    pub order: usize,
    /// Excited levels checked against the oracle.
    pub levels: usize,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub json: Value,
    pub passed: bool,
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> &[Value] {
        self.json["failures"].as_array().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn divergences(&self) -> &[Value] {
        self.json["divergences"].as_array().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Default)]
struct Findings {
    failures: Vec<Value>,
    divergences: Vec<Value>,
}

impl Findings {
    fn fail(&mut self, class: &str, module: &str, operation: &str, order: usize, detail: impl Into<String>) {
        self.failures.push(json!({
            "class": class,
            "module": module,
            "operation": operation,
            "order": order,
            "detail": detail.into(),
        }));
    }

    fn from_error(&mut self, module: &str, operation: &str, e: &Error) {
        match e {
            Error::Verification {
                module,
                operation,
                order,
                detail,
            } => self.fail(EXACT_FAIL, module, operation, *order, detail.clone()),
            Error::SingularFlow { n, .. } => self.fail(EXACT_FAIL, module, operation, *n, e.to_string()),
            other => self.fail(ORACLE_FAIL, module, operation, 0, other.to_string()),
        }
    }

    fn diverge(&mut self, item: &str, printed: &Rational, computed: &Rational, note: &str) {
        self.divergences.push(json!({
            "class": PAPER_DIVERGENCE,
            "item": item,
            "printed": format_rational(printed),
            "computed": format_rational(computed),
            "note": note,
        }));
    }
}

/// Runs every check; `Err` only for invalid configuration.
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    validate_m(&cfg.m)?;
    let mut f = Findings::default();
    let mut root = Map::new();
    root.insert("schema".into(), json!(SCHEMA));
    root.insert("m".into(), r(&cfg.m));
    root.insert("order".into(), json!(cfg.order));
    root.insert("levels".into(), json!(cfg.levels));

    match build_series(&cfg.m, cfg.order) {
        Ok(series) => {
            root.insert("riccati".into(), riccati_section(&series, &mut f));
            root.insert("riccati_order0".into(), riccati_order0(&series, &mut f));
            root.insert("identities".into(), identity_section(&series, &mut f));
            root.insert("golden".into(), golden_section(&series, &mut f));
            root.insert("energy".into(), json!(series.energy().iter().map(format_rational).collect::<Vec<_>>()));
            root.insert("shape".into(), shape_section(&series, &mut f));
            root.insert("oracle".into(), oracle_section(&series, &mut f));
            root.insert("eigenfunction".into(), eigenfunction_section(&series, &mut f));
            root.insert("excited".into(), excited_section(&series, cfg.levels, &mut f));
        }
        Err(e) => f.from_error("series-engine", "build_series", &e),
    }

    let passed = f.failures.is_empty();
    root.insert("status".into(), json!(if passed { "pass" } else { "fail" }));
    root.insert("failures".into(), Value::Array(f.failures));
    root.insert("divergences".into(), Value::Array(f.divergences));
    Ok(VerifyReport {
        json: Value::Object(root),
        passed,
    })
}

fn riccati_section(series: &SuperpotentialSeries, f: &mut Findings) -> Value {
    let entries: Vec<Value> = (1..=series.order())
        .map(|n| {
            let status = match riccati_residual(series, n) {
                Ok(_) => "exact-zero".to_string(),
                Err(e) => {
                    f.from_error("series-engine", "riccati_residual", &e);
                    "nonzero".to_string()
                }
            };
            json!({"n": n, "status": status})
        })
        .collect();
    Value::Array(entries)
}

fn riccati_order0(series: &SuperpotentialSeries, f: &mut Findings) -> Value {
    match riccati_residual(series, 0) {
        Ok(_) => json!("exact-zero"),
        Err(e) => {
            f.from_error("series-engine", "riccati_residual", &e);
            json!("nonzero")
        }
    }
}

fn identity_section(series: &SuperpotentialSeries, f: &mut Findings) -> Value {
    match crosscheck_identities(series) {
        Ok(rep) => {
            let mut holding = 0;
            for c in &rep.checks {
                if c.holds() {
                    holding += 1;
                } else {
                    f.fail(
                        EXACT_FAIL,
                        "series-engine",
                        "crosscheck_identities",
                        c.n,
                        format!("{} at (n={}, l={}): {} != {}", c.name, c.n, c.l, c.lhs, c.rhs),
                    );
                }
            }
            json!({"checked": rep.checks.len(), "holding": holding})
        }
        Err(e) => {
            f.from_error("series-engine", "crosscheck_identities", &e);
            json!({"checked": 0, "holding": 0})
        }
    }
}

fn poly_json(p: &TrigPoly) -> Value {
    let a: Map<String, Value> = p.cos_part().iter().map(|(k, v)| (k.to_string(), r(v))).collect();
    let b: Map<String, Value> = p.sin_part().iter().map(|(k, v)| (k.to_string(), r(v))).collect();
    json!({"a": a, "b": b})
}

fn golden_section(series: &SuperpotentialSeries, f: &mut Findings) -> Value {
    let m = series.m();
    let mut out = Map::new();
    let mut ws = Vec::new();
    for n in 1..=series.order().min(4) {
        let printed = reference::w_published(n, m).expect("published through order 4");
        let status = if &printed == series.w(n) {
            "match"
        } else {
            f.divergences.push(json!({
                "class": PAPER_DIVERGENCE,
                "item": format!("W_{n}"),
                "printed": poly_json(&printed),
                "computed": poly_json(series.w(n)),
                "note": "printed coefficient list differs from the recursion",
            }));
            "divergent"
        };
        ws.push(json!({"n": n, "status": status}));
    }
    out.insert("w".into(), Value::Array(ws));

    let e = series.energy();
    let mut es = Map::new();
    let printed: [(usize, fn(&Rational) -> Rational); 3] =
        [(1, reference::e01), (3, reference::e03), (4, reference::e04)];
    for (n, form) in printed {
        if n > series.order() {
            continue;
        }
        let p = form(m);
        let status = if p == e[n] { "match" } else { "divergent" };
        if p != e[n] {
            f.diverge(&format!("E_{{0,{n};m}}"), &p, &e[n], "printed closed form differs from coefficient matching");
        }
        es.insert(format!("E0{n}"), json!(status));
    }
    if series.order() >= 2 {
        let matched = reference::e02_matched(m);
        if matched != e[2] {
            f.fail(
                EXACT_FAIL,
                "series-engine",
                "energy_correction",
                2,
                format!("E_02 = {} but -(4m^2+10m+5)/(2m+2)^3 = {}", format_rational(&e[2]), format_rational(&matched)),
            );
        }
        let printed = reference::e02_published(m);
        if printed != e[2] {
            f.diverge(
                "E_{0,2;m}",
                &printed,
                &e[2],
                "printed -(4m^2+10m-5)/(2m+2)^3; coefficient matching gives -(4m^2+10m+5)/(2m+2)^3, confirmed by the oracle fit",
            );
        }
        es.insert("E02".into(), json!(if printed == e[2] { "match" } else { "divergent" }));
    }
    out.insert("energy".into(), Value::Object(es));
    Value::Object(out)
}

fn shape_section(series: &SuperpotentialSeries, f: &mut Findings) -> Value {
    let m = series.m();
    let n_max = series.order();
    let ones = ShapeParamSet::all_ones(n_max);
    let step = match solve_flow_step(&ones, series, n_max) {
        Ok(s) => s,
        Err(e) => {
            f.from_error("shape-invariance", "solve_flow_step", &e);
            return json!({"status": "unsolved"});
        }
    };
    let grid = residual_grid(41);
    let mut float_dev = 0.0f64;
    match verify_invariance(&step, series, &grid) {
        Ok(rep) => {
            float_dev = rep.iter().map(|o| o.max_float_deviation).fold(0.0, f64::max);
        }
        Err(e) => f.from_error("shape-invariance", "verify_invariance", &e),
    }

    let r0_expected = int(2) * m + int(2);
    if step.remainder[0] != r0_expected {
        f.fail(EXACT_FAIL, "shape-invariance", "solve_flow_step", 0, format!("R_0 = {} != 2m+2", format_rational(&step.remainder[0])));
    }
    if n_max >= 1 {
        let r1_expected = Rational::one() / ((m + int(1)) * (m + int(2)));
        if step.remainder[1] != r1_expected {
            f.fail(
                EXACT_FAIL,
                "shape-invariance",
                "solve_flow_step",
                1,
                format!("R_1 = {} != 1/((m+1)(m+2))", format_rational(&step.remainder[1])),
            );
        }
        let printed = printed_flow(&ones);
        if printed.d11(m) != step.to.b(1, 1) {
            f.diverge("D_{1,1}", &printed.d11(m), &step.to.b(1, 1), "printed flow map for the order-1 sine scale");
        }
        let r1p = printed.r1_published(m);
        if r1p != step.remainder[1] {
            f.diverge(
                "R_{1;m}",
                &r1p,
                &step.remainder[1],
                "printed -4B00 B11/((2m+1)A00+3) lacks the b_{1,1} factor; reading B11 as the full coefficient b_{1,1} reproduces the computed value",
            );
        }
        if n_max >= 2 {
            for (item, p, c) in [
                ("C_{2,1}", printed.c21(m), step.to.a(2, 1)),
                ("D_{2,1}", printed.d21(m), step.to.b(2, 1)),
                ("R_{2;m}", printed.r2_published(m), step.remainder[2].clone()),
            ] {
                if p != c {
                    f.diverge(item, &p, &c, "printed order-2 flow form differs from the coefficient-matching solve");
                }
            }
        }
    }
    json!({
        "remainder": step.remainder.iter().map(format_rational).collect::<Vec<_>>(),
        "theta_independence": (0..=n_max).map(|n| json!({"n": n, "status": "exact"})).collect::<Vec<_>>(),
        "max_float_deviation": num(float_dev),
        "flow": step.to_json(),
    })
}

fn printed_flow(p: &ShapeParamSet) -> FlowParams {
    FlowParams {
        a00: p.a00.clone(),
        b00: p.b00.clone(),
        b11: p.b(1, 1),
        a21: p.a(2, 1),
        b21: p.b(2, 1),
    }
}

fn oracle_section(series: &SuperpotentialSeries, f: &mut Findings) -> Value {
    let m = series.m();
    let n = series.order();
    let mut out = Map::new();

    // β = 0 spectrum.
    match oracle_eigenvalues(m, 0.0, 3) {
        Ok(res) => {
            let mf = to_f64(m);
            let dev = (0..3)
                .map(|i| {
                    let l = mf + i as f64;
                    (res.eigenvalues[i] - (l * (l + 1.0) - 0.75)).abs()
                })
                .fold(0.0, f64::max);
            if dev > 1e-12 {
                f.fail(ORACLE_FAIL, "oracle", "lowest_eigenvalues", 0, format!("beta=0 spectrum off by {dev:e}"));
            }
            out.insert("zero_beta_deviation".into(), num(dev));
        }
        Err(e) => f.from_error("oracle", "lowest_eigenvalues", &e),
    }

    // Series against oracle.
    let next = build_series(m, n + 2).ok();
    match compare_report(series, &SLOPE_BETAS) {
        Ok(rep) => {
            let rows: Vec<Value> = rep
                .rows
                .iter()
                .map(|row| {
                    json!({"beta": num(row.beta), "series": num(row.series), "oracle": num(row.oracle), "abs_diff": num(row.abs_diff)})
                })
                .collect();
            for row in &rep.rows {
                // Tail estimate from the next two orders.
                let tail = next
                    .as_ref()
                    .map(|s| {
                        (n + 1..=n + 2)
                            .map(|k| (to_f64(&s.energy()[k]) * row.beta.powi(k as i32)).abs())
                            .sum::<f64>()
                    })
                    .unwrap_or(f64::INFINITY);
                let tol = 4.0 * tail + 1e-13;
                if row.abs_diff > tol {
                    f.fail(
                        ORACLE_FAIL,
                        "oracle",
                        "compare_report",
                        n,
                        format!("beta={}: |series - oracle| = {:e} exceeds {:e}", row.beta, row.abs_diff, tol),
                    );
                }
            }
            match rep.fitted_order {
                Some(s) if (s - (n as f64 + 1.0)).abs() <= SLOPE_SLACK => {}
                other => f.fail(
                    ORACLE_FAIL,
                    "oracle",
                    "compare_report",
                    n,
                    format!("difference slope {other:?} outside {} +/- {SLOPE_SLACK}", n + 1),
                ),
            }
            out.insert("compare".into(), Value::Array(rows));
            out.insert("fitted_order".into(), rep.fitted_order.map(num).unwrap_or(Value::Null));
        }
        Err(e) => f.from_error("oracle", "compare_report", &e),
    }

    // Low-order coefficients from a least-squares fit of the oracle.
    match series_fit(m, 8, &chebyshev_samples(24, 0.05)) {
        Ok(c) => {
            let e = series.energy();
            let mut fit = Map::new();
            for (k, tol) in [(0usize, 1e-10), (1, 1e-8), (2, 1e-6)] {
                let target = if k <= n {
                    to_f64(&e[k])
                } else {
                    match &next {
                        Some(s) if k <= s.order() => to_f64(&s.energy()[k]),
                        _ => continue,
                    }
                };
                let err = (c[k] - target).abs();
                if err > tol {
                    f.fail(
                        ORACLE_FAIL,
                        "oracle",
                        "series_fit",
                        k,
                        format!("order-{k} fit {} vs series {} (tolerance {tol:e})", c[k], target),
                    );
                }
                fit.insert(format!("{k}"), json!({"fit": num(c[k]), "series": num(target), "abs_err": num(err)}));
            }
            out.insert("series_fit".into(), Value::Object(fit));
        }
        Err(e) => f.from_error("oracle", "series_fit", &e),
    }
    Value::Object(out)
}

fn eigenfunction_section(series: &SuperpotentialSeries, f: &mut Findings) -> Value {
    let n = series.order();
    let grid = residual_grid(201);
    let mut out = Map::new();
    let g0 = match GroundState::new(series, 0.0) {
        Ok(g) => g,
        Err(e) => {
            f.from_error("eigenfunction", "normalize", &e);
            return Value::Object(out);
        }
    };
    let direct = g0.direct_residual(&grid);
    if direct > 1e-12 {
        f.fail(EXACT_FAIL, "eigenfunction", "schrodinger_residual", 0, format!("beta=0 residual {direct:e}"));
    }
    out.insert("zero_beta_residual".into(), num(direct));
    match overlap(|t| g0.ground_psi(t), |t| g0.ground_psi(t)) {
        Ok(v) => {
            if (v - 1.0).abs() > 1e-10 {
                f.fail(ORACLE_FAIL, "eigenfunction", "normalize", 0, format!("norm integral {v}"));
            }
            out.insert("norm_integral".into(), num(v));
        }
        Err(e) => f.from_error("eigenfunction", "normalize", &e),
    }
    let mut residuals = Vec::new();
    for &b in &SLOPE_BETAS {
        match GroundState::new(series, b) {
            Ok(g) => residuals.push(g.schrodinger_residual(&grid)),
            Err(e) => {
                f.from_error("eigenfunction", "schrodinger_residual", &e);
                return Value::Object(out);
            }
        }
    }
    let slope = log_log_slope(&SLOPE_BETAS, &residuals);
    match slope {
        Some(s) if (s - (n as f64 + 1.0)).abs() <= SLOPE_SLACK => {}
        other => f.fail(
            ORACLE_FAIL,
            "eigenfunction",
            "schrodinger_residual",
            n,
            format!("residual slope {other:?} outside {} +/- {SLOPE_SLACK}", n + 1),
        ),
    }
    out.insert("residuals".into(), json!(residuals.iter().map(|&x| num(x)).collect::<Vec<_>>()));
    out.insert("residual_slope".into(), slope.map(num).unwrap_or(Value::Null));
    Value::Object(out)
}

fn excited_section(series: &SuperpotentialSeries, levels: usize, f: &mut Findings) -> Value {
    let m = series.m();
    let mut out = Vec::new();
    if levels == 0 {
        return Value::Array(out);
    }
    let chain = match flow_chain(series, levels) {
        Ok(c) => c,
        Err(e) => {
            f.from_error("shape-invariance", "excited_energy", &e);
            return Value::Array(out);
        }
    };
    let mut energy = series.energy().to_vec();
    let oracle_zero = oracle_eigenvalues(m, 0.0, levels + 1).ok();
    let grid = residual_grid(201);
    for (k, step) in chain.iter().enumerate() {
        let l = k + 1;
        for (e, rem) in energy.iter_mut().zip(&step.remainder) {
            *e += rem;
        }
        let mut entry = Map::new();
        entry.insert("level".into(), json!(l));
        entry.insert("energy".into(), json!(energy.iter().map(format_rational).collect::<Vec<_>>()));
        let lm = m + int(l as i64);
        let e0 = &lm * (&lm + Rational::one()) - rat(3, 4);
        if energy[0] != e0 {
            f.fail(EXACT_FAIL, "shape-invariance", "excited_energy", 0, format!("level {l}: E_0 {} != l(l+1)-3/4", format_rational(&energy[0])));
        }
        if let Some(o) = &oracle_zero {
            let gap = o.eigenvalues[l] - o.eigenvalues[l - 1];
            let dev = (gap - to_f64(&step.remainder[0])).abs();
            if dev > 1e-12 {
                f.fail(ORACLE_FAIL, "shape-invariance", "solve_flow_step", 0, format!("level {l}: R_0 vs oracle gap off by {dev:e}"));
            }
        }
        if series.order() >= 1 {
            match eigenvalue_slope(m, l, 1e-3) {
                Ok(s) => {
                    let err = (s - to_f64(&energy[1])).abs();
                    if err > 1e-6 {
                        f.fail(ORACLE_FAIL, "shape-invariance", "excited_energy", 1, format!("level {l}: slope {s} vs {}", format_rational(&energy[1])));
                    }
                    entry.insert("oracle_slope".into(), num(s));
                }
                Err(e) => f.from_error("oracle", "eigenvalue_slope", &e),
            }
        }
        let ladder = excited_wavefunction(series, l, 0.0)
            .and_then(|psi| Ok((psi, OracleEigenfunction::new(m, 0.0, l)?)));
        match ladder {
            Ok((psi, orc)) => {
                let d = aligned_max_distance(|t| psi.psi(t), |t| orc.eval(t), &grid);
                if d > 1e-6 {
                    f.fail(ORACLE_FAIL, "eigenfunction", "ladder_apply", 0, format!("level {l}: ladder vs oracle eigenvector {d:e}"));
                }
                entry.insert("eigenvector_distance".into(), num(d));
            }
            Err(e) => f.from_error("eigenfunction", "ladder_apply", &e),
        }
        out.push(Value::Object(entry));
    }
    Value::Array(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_four_passes_with_notices() {
        let rep = verify(&VerifyConfig {
            m: rat(1, 2),
            order: 4,
            levels: 1,
        })
        .unwrap();
        assert!(rep.passed, "{}", rep.render());
        let items: Vec<&str> = rep.divergences().iter().filter_map(|d| d["item"].as_str()).collect();
        assert!(items.contains(&"E_{0,2;m}"));
        assert!(items.contains(&"R_{1;m}"));
        assert_eq!(rep.json["riccati"].as_array().unwrap().len(), 4);
    }
}
