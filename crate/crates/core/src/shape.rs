//! Shape invariance of the perturbative superpotential: partner potentials
//! `V∓ = W² ∓ W′` order by order, the parameter flow `(A, B) → (C, D)` with
//! remainders `Rₙ`, and excited-level energies built from the flow chain.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, rat, to_f64, validate_m, Rational};
use crate::series::{build_series, SuperpotentialSeries, W0Params};
use crate::superpotential::Superpotential;
use crate::trig::{trig_product_fold, SourceSeries, TrigExpr, TrigPoly};

const MODULE: &str = "shape-invariance";

/// Scale factors on the physical coefficients: `ā_{n,j} = A_{n,j} a_{n,j}`,
/// `b̄_{n,j} = B_{n,j} b_{n,j}`, with the order-0 part
/// `W₀ = −A₀₀(m+½) cotθ − (B₀₀/2) cscθ`. Missing entries read as 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeParamSet {
    pub a00: Rational,
    pub b00: Rational,
    pub a: BTreeMap<(usize, u32), Rational>,
    pub b: BTreeMap<(usize, u32), Rational>,
}

impl ShapeParamSet {
    /// Every in-bounds scale through `order` set to 1.
    pub fn all_ones(order: usize) -> Self {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for n in 1..=order {
            for j in 1..=(n / 2) as u32 {
                a.insert((n, j), Rational::one());
            }
            for j in 1..=n.div_ceil(2) as u32 {
                b.insert((n, j), Rational::one());
            }
        }
        Self {
            a00: Rational::one(),
            b00: Rational::one(),
            a,
            b,
        }
    }

    pub fn a(&self, n: usize, j: u32) -> Rational {
        self.a.get(&(n, j)).cloned().unwrap_or_else(Rational::one)
    }

    pub fn b(&self, n: usize, j: u32) -> Rational {
        self.b.get(&(n, j)).cloned().unwrap_or_else(Rational::one)
    }

    pub fn within_bounds(&self) -> bool {
        self.a.keys().all(|&(n, j)| j >= 1 && j as usize <= n / 2)
            && self.b.keys().all(|&(n, j)| j >= 1 && j as usize <= n.div_ceil(2))
    }

    pub fn w0(&self, m: &Rational) -> W0Params {
        W0Params {
            cot: -(&self.a00 * (m + rat(1, 2))),
            csc: -(&self.b00 / int(2)),
        }
    }

    /// `W(θ; P)` on top of the physical coefficient table.
    pub fn superpotential(&self, series: &SuperpotentialSeries) -> Result<Superpotential> {
        if !self.within_bounds() {
            return Err(Error::Domain("parameter set has indices outside the order bounds".into()));
        }
        let orders = (1..=series.order())
            .map(|n| {
                let w = series.w(n);
                let mut p = TrigPoly::zero();
                for (&j, v) in w.cos_part() {
                    p.set_a(j, v * self.a(n, j));
                }
                for (&j, v) in w.sin_part() {
                    p.set_b(j, v * self.b(n, j));
                }
                p
            })
            .collect();
        Ok(Superpotential::new(series.m().clone(), self.w0(series.m()), orders))
    }

    pub fn to_json(&self) -> Value {
        let mut orders: BTreeMap<usize, (Map<String, Value>, Map<String, Value>)> = BTreeMap::new();
        for (&(n, j), v) in &self.a {
            orders.entry(n).or_default().0.insert(j.to_string(), json!(format_rational(v)));
        }
        for (&(n, j), v) in &self.b {
            orders.entry(n).or_default().1.insert(j.to_string(), json!(format_rational(v)));
        }
        let list: Vec<Value> = orders
            .into_iter()
            .map(|(n, (a, b))| json!({"n": n, "A": a, "B": b}))
            .collect();
        json!({"A00": format_rational(&self.a00), "B00": format_rational(&self.b00), "orders": list})
    }
}

/// Order-n pieces of `V∓ = W² ∓ W′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartnerOrder {
    pub n: usize,
    pub vminus: TrigExpr,
    pub vplus: TrigExpr,
}

impl PartnerOrder {
    /// `None` at n = 0, where the potentials carry `csc²θ` terms.
    pub fn minus_source(&self) -> Option<SourceSeries> {
        SourceSeries::try_from_expr(&self.vminus)
    }

    pub fn plus_source(&self) -> Option<SourceSeries> {
        SourceSeries::try_from_expr(&self.vplus)
    }
}

/// `Σ_{k=0}^{n} W_k W_{n−k} ∓ Wₙ′` by direct expansion.
fn partner_direct(w: &Superpotential, n: usize) -> (TrigExpr, TrigExpr) {
    let mut sq = TrigExpr::zero();
    for k in 0..=n {
        sq = &sq + &(&w.order_expr(k) * &w.order_expr(n - k));
    }
    let d = w.order_expr(n).derivative();
    (&sq - &d, &sq + &d)
}

fn bar_a(w: &Superpotential, n: usize, j: u32) -> Rational {
    match (n, j) {
        (_, 0) | (0, _) => Rational::zero(),
        _ => w.order_poly(n).map(|p| p.a(j)).unwrap_or_else(Rational::zero),
    }
}

fn bar_b(w: &Superpotential, n: usize, j: u32) -> Rational {
    match (n, j) {
        (_, 0) | (0, _) => Rational::zero(),
        _ => w.order_poly(n).map(|p| p.b(j)).unwrap_or_else(Rational::zero),
    }
}

/// The `P±/Q±` (own-order) plus `G/H` (convolution) assembly, n ≥ 1.
fn partner_assembled(w: &Superpotential, n: usize) -> (SourceSeries, SourceSeries) {
    // (2m+1)A₀₀ and B₀₀ read back from the W₀ coefficients.
    let k0 = -(int(2) * &w.w0().cot);
    let b00 = -(int(2) * &w.w0().csc);
    let p_top = n.div_ceil(2).max(n / 2 + 1) as u32;
    let mut minus = SourceSeries::zero();
    let mut plus = SourceSeries::zero();
    for p in 1..=p_top {
        let two_p = int(2 * p as i64);
        let (a_p, b_p, a_prev) = (bar_a(w, n, p), bar_b(w, n, p), bar_a(w, n, p - 1));
        let p_minus = -(&b00 * &a_p) + (Rational::one() - &two_p - &k0) * &b_p;
        let q_minus = -(&b00 * &b_p)
            + (Rational::one() - &two_p - &k0) * &a_p
            + (&two_p - int(2) + &k0) * &a_prev;
        let p_plus = -(&b00 * &a_p) + (&two_p - Rational::one() - &k0) * &b_p;
        let q_plus = -(&b00 * &b_p)
            + (&two_p - Rational::one() - &k0) * &a_p
            + (int(2) - &two_p + &k0) * &a_prev;
        minus.add_g(p, p_minus);
        minus.add_h(p, q_minus);
        plus.add_g(p, p_plus);
        plus.add_h(p, q_plus);
    }
    let mut conv = SourceSeries::zero();
    for p in 2..=(n as u32 + 1) {
        let mut g = Rational::zero();
        let mut h = Rational::zero();
        for k in 1..n {
            for j in 1..p {
                g += bar_b(w, k, p - j) * bar_a(w, n - k, j) + bar_a(w, k, p - j) * bar_b(w, n - k, j);
                h += bar_b(w, k, p - j) * bar_b(w, n - k, j) + bar_a(w, k, p - j) * bar_a(w, n - k, j)
                    - bar_a(w, k, p - 1 - j) * bar_a(w, n - k, j);
            }
        }
        conv.add_g(p, g);
        conv.add_h(p, h);
    }
    minus.accumulate(&conv, &Rational::one());
    plus.accumulate(&conv, &Rational::one());
    (minus, plus)
}

/// Partner potentials of an explicit superpotential at order n; for n ≥ 1
/// the assembled and direct routes must agree exactly.
pub fn partner_order_of(w: &Superpotential, n: usize) -> Result<PartnerOrder> {
    if n > w.order() {
        return Err(Error::State(format!(
            "partner potential at order {n} needs W through order {n}, have {}",
            w.order()
        )));
    }
    let (vminus, vplus) = partner_direct(w, n);
    if n >= 1 {
        let (am, ap) = partner_assembled(w, n);
        for (label, direct, assembled) in [("V-", &vminus, &am), ("V+", &vplus, &ap)] {
            let diff = direct - &assembled.to_expr();
            if !diff.is_zero() {
                return Err(Error::verification(
                    MODULE,
                    "partner_potential_order",
                    n,
                    format!("{label}: assembled and direct expansions differ by {diff}"),
                ));
            }
        }
    }
    let spread = &vplus - &vminus;
    let expected = w.order_expr(n).derivative().scale(&int(2));
    if spread != expected {
        return Err(Error::verification(
            MODULE,
            "partner_potential_order",
            n,
            "V+ - V- differs from 2W'",
        ));
    }
    Ok(PartnerOrder { n, vminus, vplus })
}

pub fn partner_potential_order(
    params: &ShapeParamSet,
    series: &SuperpotentialSeries,
    n: usize,
) -> Result<PartnerOrder> {
    partner_order_of(&params.superpotential(series)?, n)
}

/// One step of the flow `P → F` through order N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowStep {
    pub from: ShapeParamSet,
    pub to: ShapeParamSet,
    /// `Rₙ`, n = 0..=N.
    pub remainder: Vec<Rational>,
    /// `α_p = (2m+1)C₀₀ + 2p − 1`.
    pub alpha: BTreeMap<u32, Rational>,
    pub flowed: Superpotential,
}

impl FlowStep {
    pub fn order(&self) -> usize {
        self.remainder.len() - 1
    }

    /// Per-order JSON: `{"n", "C", "D", "R", "theta_independence"}`.
    pub fn to_json(&self) -> Value {
        let mut orders = Vec::with_capacity(self.remainder.len());
        for (n, r) in self.remainder.iter().enumerate() {
            let (c, d): (Map<String, Value>, Map<String, Value>) = if n == 0 {
                (
                    Map::from_iter([("0".to_string(), json!(format_rational(&self.to.a00)))]),
                    Map::from_iter([("0".to_string(), json!(format_rational(&self.to.b00)))]),
                )
            } else {
                (
                    self.to
                        .a
                        .range((n, 0)..=(n, u32::MAX))
                        .map(|(&(_, j), v)| (j.to_string(), json!(format_rational(v))))
                        .collect(),
                    self.to
                        .b
                        .range((n, 0)..=(n, u32::MAX))
                        .map(|(&(_, j), v)| (j.to_string(), json!(format_rational(v))))
                        .collect(),
                )
            };
            orders.push(json!({
                "n": n,
                "C": c,
                "D": d,
                "R": format_rational(r),
                "theta_independence": "exact",
            }));
        }
        Value::Array(orders)
    }
}

fn singular(n: usize, p: u32, detail: impl Into<String>) -> Error {
    Error::SingularFlow {
        n,
        p: p as usize,
        detail: detail.into(),
    }
}

/// Checks `V⁺ₙ(from) − V⁻ₙ(to) = r` exactly.
fn check_constant_gap(from: &Superpotential, to: &Superpotential, n: usize, r: &Rational) -> Result<()> {
    let plus = partner_order_of(from, n)?.vplus;
    let minus = partner_order_of(to, n)?.vminus;
    let gap = &(&plus - &minus) - &TrigExpr::constant(r.clone());
    if gap.is_zero() {
        return Ok(());
    }
    let offending: Vec<String> = gap
        .terms()
        .map(|((cos, k), v)| format!("{}sin^{k}: {}", if cos { "cos*" } else { "" }, format_rational(v)))
        .collect();
    Err(Error::verification(
        MODULE,
        "solve_flow_step",
        n,
        format!("theta dependence left after the flow solve: {}", offending.join(", ")),
    ))
}

/// Solves `V⁺ₙ(P) = V⁻ₙ(F) + Rₙ` for the flowed coefficients order by order,
/// sweeping backward in p.
pub fn solve_flow_step(
    params: &ShapeParamSet,
    series: &SuperpotentialSeries,
    order: usize,
) -> Result<FlowStep> {
    let m = series.m();
    validate_m(m)?;
    if order > series.order() {
        return Err(Error::State(format!(
            "flow through order {order} needs a series of order >= {order}, have {}",
            series.order()
        )));
    }
    let two_m1 = int(2) * m + Rational::one();
    let from = params.superpotential(&series.truncated(order))?;

    let c00 = &params.a00 + int(2) / &two_m1;
    let d00 = params.b00.clone();
    let k_to = &two_m1 * &c00;
    let alpha = |p: u32| &k_to + int(2 * p as i64 - 1);

    let mut to = ShapeParamSet {
        a00: c00.clone(),
        b00: d00.clone(),
        a: BTreeMap::new(),
        b: BTreeMap::new(),
    };
    let mut remainder = vec![&two_m1 * &params.a00 + Rational::one()];
    let mut alphas = BTreeMap::new();
    let w0_to = to.w0(m);
    let mut flowed_orders: Vec<TrigPoly> = Vec::with_capacity(order);

    check_constant_gap(
        &from,
        &Superpotential::new(m.clone(), w0_to.clone(), Vec::new()),
        0,
        &remainder[0],
    )?;

    for n in 1..=order {
        let target = partner_order_of(&from, n)?
            .plus_source()
            .ok_or_else(|| Error::verification(MODULE, "solve_flow_step", n, "V+ left the basis"))?;
        let mut t = target;
        for k in 1..n {
            t.accumulate(
                &trig_product_fold(&flowed_orders[k - 1], &flowed_orders[n - k - 1]),
                &-Rational::one(),
            );
        }
        let k_max = (n / 2) as u32;
        let j_max = n.div_ceil(2) as u32;
        let p_top = j_max.max(k_max + 1);
        let mut c = vec![Rational::zero(); p_top as usize + 2];
        let mut d = vec![Rational::zero(); p_top as usize + 2];
        let mut r_n = Rational::zero();
        for p in (1..=p_top).rev() {
            let a_p = alpha(p);
            alphas.insert(p, a_p.clone());
            let pi = p as usize;
            if p <= j_max {
                if a_p.is_zero() {
                    return Err(singular(n, p, "alpha_p = 0"));
                }
                d[pi] = -(t.g(p) + &d00 * &c[pi]) / &a_p;
            }
            let rhs = t.h(p) + &a_p * &c[pi] + &d00 * &d[pi];
            if p >= 2 {
                if p - 1 <= k_max {
                    let piv = &a_p - Rational::one();
                    if piv.is_zero() {
                        return Err(singular(n, p, "alpha_p - 1 = 0"));
                    }
                    c[pi - 1] = rhs / piv;
                }
            } else {
                r_n = rhs;
            }
        }
        let mut w_n = TrigPoly::zero();
        for j in 1..=k_max {
            w_n.set_a(j, c[j as usize].clone());
        }
        for j in 1..=j_max {
            w_n.set_b(j, d[j as usize].clone());
        }
        // Scale factors relative to the physical table.
        let base = series.w(n);
        for j in 1..=k_max {
            to.a.insert((n, j), scale_factor(&c[j as usize], &base.a(j), n, j)?);
        }
        for j in 1..=j_max {
            to.b.insert((n, j), scale_factor(&d[j as usize], &base.b(j), n, j)?);
        }
        flowed_orders.push(w_n);
        let flowed = Superpotential::new(m.clone(), w0_to.clone(), flowed_orders.clone());
        check_constant_gap(&from, &flowed, n, &r_n)?;
        remainder.push(r_n);
    }

    Ok(FlowStep {
        from: params.clone(),
        to,
        remainder,
        alpha: alphas,
        flowed: Superpotential::new(m.clone(), w0_to, flowed_orders),
    })
}

fn scale_factor(full: &Rational, base: &Rational, n: usize, j: u32) -> Result<Rational> {
    if !base.is_zero() {
        return Ok(full / base);
    }
    if full.is_zero() {
        return Ok(Rational::one());
    }
    Err(singular(
        n,
        j,
        format!("base coefficient a_{{{n},{j}}} vanishes but the flowed one does not"),
    ))
}

/// The flows `a₁ → a₂ → … → a_{l+1}` starting from the physical set.
pub fn flow_chain(series: &SuperpotentialSeries, levels: usize) -> Result<Vec<FlowStep>> {
    let mut steps: Vec<FlowStep> = Vec::with_capacity(levels);
    let mut params = ShapeParamSet::all_ones(series.order());
    for _ in 0..levels {
        let step = solve_flow_step(&params, series, series.order())?;
        params = step.to.clone();
        steps.push(step);
    }
    Ok(steps)
}

/// `E_{l;m} = E_{0;m} + Σ_{k=1}^{l} R(a_k)` as β-series coefficients.
pub fn excited_energy_from(series: &SuperpotentialSeries, level: usize) -> Result<Vec<Rational>> {
    let mut energy = series.energy().to_vec();
    for step in flow_chain(series, level)? {
        for (e, r) in energy.iter_mut().zip(&step.remainder) {
            *e += r;
        }
    }
    Ok(energy)
}

pub fn excited_energy(m: &Rational, level: usize, order: usize) -> Result<Vec<Rational>> {
    excited_energy_from(&build_series(m, order)?, level)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceOrder {
    pub n: usize,
    pub remainder: Rational,
    /// Largest `|V⁺ₙ(from) − V⁻ₙ(to) − Rₙ|` over the grid in f64.
    pub max_float_deviation: f64,
}

/// Re-checks a solved step: exact θ-independence of every order plus a
/// floating spot check over the grid.
pub fn verify_invariance(
    step: &FlowStep,
    series: &SuperpotentialSeries,
    grid: &[f64],
) -> Result<Vec<InvarianceOrder>> {
    let from = step.from.superpotential(&series.truncated(step.order()))?;
    let mut out = Vec::with_capacity(step.remainder.len());
    for (n, r) in step.remainder.iter().enumerate() {
        check_constant_gap(&from, &step.flowed, n, r)?;
        let plus = partner_order_of(&from, n)?.vplus.to_numeric();
        let minus = partner_order_of(&step.flowed, n)?.vminus.to_numeric();
        let rf = to_f64(r);
        let dev = grid
            .iter()
            .map(|&t| (plus.eval(t) - minus.eval(t) - rf).abs())
            .fold(0.0, f64::max);
        if dev > 1e-12 * rf.abs().max(1.0) {
            return Err(Error::verification(
                MODULE,
                "verify_invariance",
                n,
                format!("floating spot check deviates by {dev:e}"),
            ));
        }
        out.push(InvarianceOrder {
            n,
            remainder: r.clone(),
            max_float_deviation: dev,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn physical_set_reproduces_series() {
        let series = build_series(&rat(3, 2), 6).unwrap();
        let w = ShapeParamSet::all_ones(6).superpotential(&series).unwrap();
        assert_eq!(w, Superpotential::physical(&series));
    }

    #[test]
    fn order_one_partners_at_half() {
        let series = build_series(&rat(1, 2), 2).unwrap();
        let p = partner_potential_order(&ShapeParamSet::all_ones(2), &series, 1).unwrap();
        let mut minus = SourceSeries::zero();
        minus.add_h(1, rat(1, 3));
        minus.add_g(1, rat(1, 1));
        assert_eq!(p.minus_source().unwrap(), minus);
        let mut plus = SourceSeries::zero();
        plus.add_h(1, rat(1, 3));
        plus.add_g(1, rat(1, 3));
        assert_eq!(p.plus_source().unwrap(), plus);
    }

    #[test]
    fn first_flow_step_at_half() {
        let m = rat(1, 2);
        let series = build_series(&m, 4).unwrap();
        let step = solve_flow_step(&ShapeParamSet::all_ones(4), &series, 4).unwrap();
        assert_eq!(step.to.a00, int(2));
        assert_eq!(step.remainder[0], int(3));
        assert_eq!(step.remainder[1], rat(4, 15));
        assert_eq!(step.flowed.order_poly(1).unwrap().b(1), rat(-1, 15));
        assert_eq!(step.to.b(1, 1), rat(1, 5));
    }

    #[test]
    fn level_one_energy() {
        let e = excited_energy(&rat(1, 2), 1, 4).unwrap();
        assert_eq!(
            e,
            vec![int(3), rat(-1, 15), rat(-1487, 3375), rat(233344, 5315625), rat(2170624, 239203125)]
        );
    }

    #[test]
    fn scaled_a00_remainder() {
        let m = rat(1, 2);
        let series = build_series(&m, 3).unwrap();
        let mut p = ShapeParamSet::all_ones(3);
        p.a00 = int(2);
        let step = solve_flow_step(&p, &series, 3).unwrap();
        assert_eq!(step.remainder[0], int(5));
        let grid: Vec<f64> = (1..20).map(|i| 0.05 + i as f64 * 0.15).collect();
        let rep = verify_invariance(&step, &series, &grid).unwrap();
        assert!(rep.iter().all(|o| o.max_float_deviation <= 1e-12));
    }
}
