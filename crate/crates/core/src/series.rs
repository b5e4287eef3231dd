//! Order-by-order recursion for the superpotential `W = Σ βⁿ Wₙ` and the
//! ground energy `E₀ = Σ βⁿ E_{0,n;m}` at spin weight s = 1/2.
//!
//! Every order is produced twice, once through the closed recursion for
//! `a_{n,l}`, `b_{n,l}`, `E_{0,n;m}` and once by solving the linear
//! coefficient-matching system directly, and the two must agree exactly.
//! Each finished order is then checked against the Riccati equation
//! `Wₙ′ − 2W₀Wₙ = fₙ` as an exact trigonometric identity.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, rat, ratio_i, to_f64, validate_m, Rational};
use crate::trig::{trig_product_fold, SourceSeries, TrigExpr, TrigPoly};

pub const DEFAULT_ORDER: usize = 16;

/// Spin weight.
pub fn spin() -> Rational {
    rat(1, 2)
}

/// `W₀ = cot · cotθ + csc · cscθ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct W0Params {
    pub cot: Rational,
    pub csc: Rational,
}

impl W0Params {
    pub fn to_expr(&self) -> TrigExpr {
        let mut e = TrigExpr::monomial(true, -1, self.cot.clone());
        e.add_term(false, -1, self.csc.clone());
        e
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        (to_f64(&self.cot) * c + to_f64(&self.csc)) / s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperpotentialSeries {
    m: Rational,
    order: usize,
    w0: W0Params,
    /// `w[n-1]` holds `Wₙ`.
    w: Vec<TrigPoly>,
    energy: Vec<Rational>,
    /// `sources[n-1]` holds `fₙ − E_{0,n;m}`.
    sources: Vec<SourceSeries>,
}

impl SuperpotentialSeries {
    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn w0(&self) -> &W0Params {
        &self.w0
    }

    /// `Wₙ` for 1 ≤ n ≤ order.
    pub fn w(&self, n: usize) -> &TrigPoly {
        assert!(n >= 1 && n <= self.order, "W_{n} not built (order {})", self.order);
        &self.w[n - 1]
    }

    pub fn energy(&self) -> &[Rational] {
        &self.energy
    }

    /// `fₙ − E_{0,n;m}` for 1 ≤ n ≤ order.
    pub fn source(&self, n: usize) -> &SourceSeries {
        &self.sources[n - 1]
    }

    /// `Σ_{n ≤ upto} E_{0,n;m} βⁿ`.
    pub fn energy_sum(&self, beta: f64, upto: usize) -> f64 {
        self.energy[..=upto.min(self.order)]
            .iter()
            .rev()
            .fold(0.0, |acc, e| acc * beta + to_f64(e))
    }

    /// Copy truncated at a lower order.
    pub fn truncated(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            m: self.m.clone(),
            order,
            w0: self.w0.clone(),
            w: self.w[..order].to_vec(),
            energy: self.energy[..=order].to_vec(),
            sources: self.sources[..order].to_vec(),
        }
    }

    fn push(&mut self, w: TrigPoly, e: Rational, src: SourceSeries) {
        self.w.push(w);
        self.energy.push(e);
        self.sources.push(src);
        self.order += 1;
    }

    /// Coefficient table with sorted keys:
    /// `{"m", "s", "order", "energy": [...], "w": [{"n", "a": {...}, "b": {...}}]}`.
    pub fn to_json(&self) -> Value {
        let table = |map: &BTreeMap<u32, Rational>| -> Value {
            Value::Object(
                map.iter()
                    .map(|(k, v)| (k.to_string(), Value::String(format_rational(v))))
                    .collect(),
            )
        };
        let w: Vec<Value> = self
            .w
            .iter()
            .enumerate()
            .map(|(i, p)| json!({ "n": i + 1, "a": table(p.cos_part()), "b": table(p.sin_part()) }))
            .collect();
        json!({
            "m": format_rational(&self.m),
            "s": format_rational(&spin()),
            "order": self.order,
            "energy": self.energy.iter().map(format_rational).collect::<Vec<_>>(),
            "w": w,
        })
    }
}

/// `W₀ = −[1/2 + (m + 1/2) cosθ] / sinθ` and `E_{0,0;m} = m² + m − 3/4`.
pub fn seed_order0(m: &Rational) -> Result<(W0Params, Rational)> {
    validate_m(m)?;
    let w0 = W0Params {
        cot: -(m + rat(1, 2)),
        csc: rat(-1, 2),
    };
    Ok((w0, m * m + m - rat(3, 4)))
}

/// `W₁` and `E_{0,1;m}` by matching coefficients of `W₁′ − 2W₀W₁ = −2s cosθ + E`.
pub fn seed_order1(m: &Rational) -> Result<(TrigPoly, Rational)> {
    validate_m(m)?;
    match_coefficients(&order1_source(), m)
}

fn order1_source() -> SourceSeries {
    let mut src = SourceSeries::zero();
    src.add_g(1, -(int(2) * spin()));
    src
}

/// Solves `W′ − 2W₀W = src + E` for `W` in the closed basis and the constant `E`.
///
/// With `L[b_k sin^{2k−1}] = (2m+2k) cosθ sin^{2k−2} + sin^{2k−2}` and
/// `L[a_k cosθ sin^{2k−1}] = (2m+2k) sin^{2k−2} − (2m+2k+1) sin^{2k} + cosθ sin^{2k−2}`
/// the system is triangular from the top index down; the constant equation
/// at p = 1 then fixes `E`. The solution is unique inside the basis.
pub fn match_coefficients(src: &SourceSeries, m: &Rational) -> Result<(TrigPoly, Rational)> {
    validate_m(m)?;
    let two_m = int(2) * m;
    let top = src.max_p();
    let mut w = TrigPoly::zero();
    // a_top would be −h_{top+1}/(2m+2top+1) = 0.
    let mut a_p = Rational::zero();
    let mut energy = Rational::zero();
    for p in (1..=top).rev() {
        let two_p = int(2 * p as i64);
        let b_p = (src.g(p) - &a_p) / (&two_m + &two_p);
        w.set_a(p, a_p.clone());
        w.set_b(p, b_p.clone());
        if p >= 2 {
            a_p = (&b_p + (&two_m + &two_p) * &a_p - src.h(p)) / (&two_m + &two_p - Rational::one());
        } else {
            energy = &b_p + (&two_m + int(2)) * &a_p - &src.constant;
        }
    }
    Ok((w, energy))
}

/// `fₙ − E_{0,n;m}` for n ≥ 2: the convolution `Σ_{k=1}^{n−1} WₖW_{n−k}`,
/// plus `cos²θ = 1 − sin²θ` folded in at n = 2.
pub fn source_series(n: usize, prior: &SuperpotentialSeries) -> Result<SourceSeries> {
    if n < 2 {
        return Err(Error::State(format!("source_series needs n >= 2, got {n}")));
    }
    if prior.order < n - 1 {
        return Err(Error::State(format!(
            "source_series(n={n}) needs W_1..W_{} but series has order {}",
            n - 1,
            prior.order
        )));
    }
    let mut src = SourceSeries::zero();
    for k in 1..n {
        let part = trig_product_fold(prior.w(k), prior.w(n - k));
        src.constant += &part.constant;
        for (&p, v) in part.h_map() {
            src.add_h(p, v.clone());
        }
        for (&p, v) in part.g_map() {
            src.add_g(p, v.clone());
        }
    }
    if n == 2 {
        src.add_h(1, int(1));
        src.add_h(2, int(-1));
    }
    Ok(src)
}

fn check_general_source(n: usize, src: &SourceSeries) -> Result<()> {
    if !src.g(1).is_zero() {
        return Err(Error::Domain(format!(
            "closed recursion at order {n} needs a source without a bare cos term"
        )));
    }
    Ok(())
}

/// `e_{n,p} = (2m+2p)/(2m+2p−1) · (h_{n,p} − g_{n,p}/(2m+2p))`.
fn e_coeff(src: &SourceSeries, m: &Rational, p: u32) -> Rational {
    let x = int(2) * m + int(2 * p as i64);
    &x / (&x - Rational::one()) * (src.h(p) - src.g(p) / &x)
}

/// `E_{0,n;m}` from the condition that the `P(2m, θ)` part of `Aₙ` vanishes:
/// `−Σ_p e_{n,p} (2m+1) Ī(2m+2p, p−1)/(2m+2p+1)`, minus any folded constant.
pub fn energy_correction(n: usize, src: &SourceSeries, m: &Rational) -> Result<Rational> {
    validate_m(m)?;
    check_general_source(n, src)?;
    let two_m = int(2) * m;
    let top = (n / 2 + 1) as u32;
    let mut sum = Rational::zero();
    for p in 2..=top {
        let x = &two_m + int(2 * p as i64);
        sum += e_coeff(src, m, p) * (&two_m + int(1)) * ratio_i(&x, p as usize - 1)? / (&x + int(1));
    }
    Ok(-sum - &src.constant)
}

/// `Wₙ` from the closed recursion for `a_{n,l}`, `b_{n,l}`.
///
/// The `b` sum runs to ⌊n/2⌋+1; for even n the top coefficient cancels and
/// is not stored, so a result outside the order bounds signals a bug.
pub fn superpotential_order(
    n: usize,
    src: &SourceSeries,
    energy: &Rational,
    m: &Rational,
) -> Result<TrigPoly> {
    validate_m(m)?;
    check_general_source(n, src)?;
    let two_m = int(2) * m;
    let top = (n / 2 + 1) as u32;
    let e: Vec<Rational> = (0..=top).map(|p| if p >= 2 { e_coeff(src, m, p) } else { Rational::zero() }).collect();

    let mut a = vec![Rational::zero(); top as usize + 1];
    for l in 1..=top {
        let two_l = int(2 * l as i64);
        let mut acc = Rational::zero();
        for p in (l + 1)..=top {
            let x = &two_m + int(2 * p as i64);
            acc += &e[p as usize] * (&two_m + &two_l) * ratio_i(&x, (p - l) as usize)?
                / ((&two_m + &two_l + int(1)) * (&x + int(1)));
        }
        a[l as usize] = -acc;
    }

    let mut w = TrigPoly::zero();
    let effective = energy + &src.constant;
    for l in 1..=top {
        let b = if l == 1 {
            &a[1] - &effective / (&two_m + int(1))
        } else {
            &a[l as usize] - &a[l as usize - 1]
                + (src.g(l) - src.h(l)) / (&two_m + int(2 * l as i64) - int(1))
        };
        w.set_a(l, a[l as usize].clone());
        w.set_b(l, b);
    }
    Ok(w)
}

/// Builds orders 0..=N, verifying each order on the way.
pub fn build_series(m: &Rational, order: usize) -> Result<SuperpotentialSeries> {
    let (w0, e0) = seed_order0(m)?;
    let mut series = SuperpotentialSeries {
        m: m.clone(),
        order: 0,
        w0,
        w: Vec::new(),
        energy: vec![e0],
        sources: Vec::new(),
    };
    for n in 1..=order {
        let (w, e, src) = if n == 1 {
            let (w, e) = seed_order1(m)?;
            (w, e, order1_source())
        } else {
            let src = source_series(n, &series)?;
            if !src.within_order_bounds(n) {
                return Err(Error::verification(
                    "series-engine",
                    "source_series",
                    n,
                    "source coefficients exceed the vanishing bounds",
                ));
            }
            let (w_match, e_match) = match_coefficients(&src, m)?;
            let e_rec = energy_correction(n, &src, m)?;
            let w_rec = superpotential_order(n, &src, &e_rec, m)?;
            if e_match != e_rec || w_match != w_rec {
                return Err(Error::verification(
                    "series-engine",
                    "build_series",
                    n,
                    format!(
                        "recursion and coefficient matching disagree: E {e_rec} vs {e_match}, W {:?} vs {:?}",
                        w_rec.to_expr().to_string(),
                        w_match.to_expr().to_string()
                    ),
                ));
            }
            (w_rec, e_rec, src)
        };
        if !w.within_order_bounds(n) {
            return Err(Error::verification(
                "series-engine",
                "superpotential_order",
                n,
                format!("coefficients exceed index bounds: {}", w.to_expr()),
            ));
        }
        series.push(w, e, src);
        riccati_residual(&series, n)?;
    }
    riccati_residual(&series, 0)?;
    crosscheck_identities(&series)?;
    Ok(series)
}

/// Order-n piece of `1/4 + s + β²cos²θ − 2sβ cosθ − ((m + s cosθ)² − 1/4)/sin²θ`.
pub fn potential_term(m: &Rational, n: usize) -> TrigExpr {
    let s = spin();
    match n {
        0 => {
            let mut inner = TrigExpr::constant(m.clone());
            inner.add_term(true, 0, s.clone());
            let mut numer = &inner * &inner;
            numer.add_term(false, 0, rat(-1, 4));
            let csc2 = TrigExpr::monomial(false, -2, Rational::one());
            &TrigExpr::constant(rat(1, 4) + s) - &(&numer * &csc2)
        }
        1 => TrigExpr::monomial(true, 0, -(int(2) * s)),
        2 => &TrigExpr::cos() * &TrigExpr::cos(),
        _ => TrigExpr::zero(),
    }
}

/// `Wₙ′ − 2W₀Wₙ − fₙ` with `fₙ` assembled from the potential, the
/// lower-order products, and the supplied energy (for n = 0:
/// `W₀′ − W₀² − f₀`). Pure expression arithmetic, independent of the
/// folded sources the recursion used.
pub fn riccati_residual_for_energy(
    series: &SuperpotentialSeries,
    n: usize,
    energy: &Rational,
) -> TrigExpr {
    let w0 = series.w0.to_expr();
    let mut f = potential_term(&series.m, n);
    f.add_term(false, 0, energy.clone());
    if n == 0 {
        return &(&w0.derivative() - &(&w0 * &w0)) - &f;
    }
    for k in 1..n {
        f = &f + &(&series.w(k).to_expr() * &series.w(n - k).to_expr());
    }
    let wn = series.w(n).to_expr();
    let lhs = &wn.derivative() - (&(&w0 * &wn).scale(&int(2)));
    &lhs - &f
}

/// Exact Riccati residual of order n; anything but the zero expression is a
/// verification failure naming the offending basis terms.
pub fn riccati_residual(series: &SuperpotentialSeries, n: usize) -> Result<TrigExpr> {
    if n > series.order {
        return Err(Error::State(format!(
            "riccati_residual(n={n}) on a series of order {}",
            series.order
        )));
    }
    let r = riccati_residual_for_energy(series, n, &series.energy[n]);
    if r.is_zero() {
        Ok(r)
    } else {
        Err(Error::verification(
            "series-engine",
            "riccati_residual",
            n,
            format!("nonzero residual terms: {r}"),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub n: usize,
    pub l: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }
}

/// `b_{n,l} = (g_{n,l} − a_{n,l})/(2m+2l)` for l ≥ 2,
/// `a_{n,1} = (2m+2)E_{0,n;m}/((2m+1)(2m+3))` for n ≥ 3, and the vanishing
/// of `a_{n,n/2+1}`, `b_{n,n/2+1}` for even n.
pub fn crosscheck_identities(series: &SuperpotentialSeries) -> Result<IdentityReport> {
    let m = &series.m;
    let two_m = int(2) * m;
    let mut report = IdentityReport::default();
    for n in 1..=series.order {
        let w = series.w(n);
        let src = series.source(n);
        for l in 2..=(n / 2 + 1) {
            report.checks.push(IdentityCheck {
                name: "b_nl",
                n,
                l,
                lhs: w.b(l as u32),
                rhs: (src.g(l as u32) - w.a(l as u32)) / (&two_m + int(2 * l as i64)),
            });
        }
        if n >= 3 {
            report.checks.push(IdentityCheck {
                name: "a_n1",
                n,
                l: 1,
                lhs: w.a(1),
                rhs: (&two_m + int(2)) * &series.energy[n]
                    / ((&two_m + int(1)) * (&two_m + int(3))),
            });
        }
        if n % 2 == 0 {
            let top = (n / 2 + 1) as u32;
            report.checks.push(IdentityCheck {
                name: "a_top_zero",
                n,
                l: top as usize,
                lhs: w.a(top),
                rhs: Rational::zero(),
            });
            report.checks.push(IdentityCheck {
                name: "b_top_zero",
                n,
                l: top as usize,
                lhs: w.b(top),
                rhs: Rational::zero(),
            });
        }
    }
    if let Some(bad) = report.checks.iter().find(|c| !c.holds()) {
        return Err(Error::verification(
            "series-engine",
            "crosscheck_identities",
            bad.n,
            format!("{} at l={}: {} != {}", bad.name, bad.l, bad.lhs, bad.rhs),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Rational {
        rat(1, 2)
    }

    #[test]
    fn order0_seed() {
        let (w0, e) = seed_order0(&half()).unwrap();
        assert!(e.is_zero());
        assert_eq!(seed_order0(&rat(3, 2)).unwrap().1, int(3));
        assert!((w0.eval(std::f64::consts::FRAC_PI_2) + 0.5).abs() < 1e-15);
        assert!(seed_order0(&int(0)).is_err());
    }

    #[test]
    fn order1_seed() {
        let (w, e) = seed_order1(&half()).unwrap();
        assert_eq!(w.b(1), rat(-1, 3));
        assert!(w.cos_part().is_empty());
        assert_eq!(e, rat(-1, 3));
        assert_eq!(seed_order1(&rat(3, 2)).unwrap().1, rat(-1, 5));
        let mut last = None;
        for k in 0..10 {
            let m = rat(2 * k + 1, 2);
            let e = seed_order1(&m).unwrap().1;
            let mag = -e;
            if let Some(prev) = last {
                assert!(mag < prev);
            }
            last = Some(mag);
        }
    }

    #[test]
    fn source_series_examples() {
        let s = build_series(&half(), 3).unwrap();
        let src2 = source_series(2, &s).unwrap();
        assert_eq!(src2.constant, int(1));
        assert_eq!(src2.h(2), rat(-8, 9));
        assert!(src2.g_map().is_empty());
        let src3 = source_series(3, &s).unwrap();
        assert_eq!(src3.g(2), rat(-4, 27));
        assert_eq!(src3.h(2), rat(4, 81));
        let src4 = source_series(4, &s).unwrap();
        assert_eq!(src4.g(2), rat(-8, 405));
    }

    #[test]
    fn source_series_needs_prior_orders() {
        let s = build_series(&half(), 1).unwrap();
        assert!(matches!(source_series(3, &s), Err(Error::State(_))));
        assert!(matches!(source_series(1, &s), Err(Error::State(_))));
    }

    #[test]
    fn energy_examples() {
        let s = build_series(&half(), 4).unwrap();
        assert_eq!(energy_correction(2, s.source(2), &half()).unwrap(), rat(-11, 27));
        assert_eq!(energy_correction(3, s.source(3), &half()).unwrap(), rat(-64, 1215));
        assert_eq!(energy_correction(4, s.source(4), &half()).unwrap(), rat(-224, 10935));
    }

    #[test]
    fn general_energy_rejects_bare_cos_source() {
        assert!(energy_correction(1, &order1_source(), &half()).is_err());
    }

    #[test]
    fn superpotential_examples() {
        let s = build_series(&half(), 4).unwrap();
        let w3 = s.w(3);
        assert_eq!(w3.b(1), rat(8, 1215));
        assert_eq!(w3.b(2), rat(-4, 135));
        assert_eq!(w3.a(1), rat(-8, 405));
        let w4 = s.w(4);
        assert_eq!(w4.a(2), rat(2, 405));
        assert_eq!(w4.b(2), rat(-2, 405));
        let w2 = s.w(2);
        assert_eq!(w2.a(1), rat(2, 9));
        assert_eq!(w2.b(1), rat(-2, 27));
    }

    #[test]
    fn build_series_small() {
        let s = build_series(&half(), 1).unwrap();
        assert_eq!(s.energy(), &[int(0), rat(-1, 3)]);
        let s = build_series(&half(), 0).unwrap();
        assert_eq!(s.energy(), &[int(0)]);
        assert_eq!(s.order(), 0);
        let s = build_series(&half(), 4).unwrap();
        assert_eq!(
            s.energy(),
            &[int(0), rat(-1, 3), rat(-11, 27), rat(-64, 1215), rat(-224, 10935)]
        );
    }

    #[test]
    fn residual_examples() {
        let s = build_series(&half(), 2).unwrap();
        assert!(riccati_residual(&s, 1).unwrap().is_zero());
        assert!(riccati_residual(&s, 2).unwrap().is_zero());
        let off = riccati_residual_for_energy(&s, 2, &rat(-1, 27));
        assert_eq!(off.constant_value(), Some(rat(-10, 27)));
        assert!(riccati_residual(&s, 3).is_err());
    }

    #[test]
    fn crosscheck_examples() {
        let s = build_series(&half(), 4).unwrap();
        let report = crosscheck_identities(&s).unwrap();
        assert!(report.all_hold());
        let find = |name, n, l| {
            report
                .checks
                .iter()
                .find(|c| c.name == name && c.n == n && c.l == l)
                .unwrap()
                .clone()
        };
        assert_eq!(find("b_nl", 4, 2).rhs, rat(-2, 405));
        assert_eq!(find("a_n1", 3, 1).rhs, rat(-8, 405));
        assert_eq!(find("b_nl", 3, 2).rhs, rat(-4, 135));
    }

    #[test]
    fn tampered_series_fails_identity() {
        let mut s = build_series(&half(), 4).unwrap();
        let mut w = s.w[3].clone();
        w.set_b(2, rat(1, 7));
        s.w[3] = w;
        assert!(matches!(
            crosscheck_identities(&s),
            Err(Error::Verification { order: 4, .. })
        ));
        assert!(riccati_residual(&s, 4).is_err());
    }

    #[test]
    fn json_table_is_deterministic() {
        let a = build_series(&half(), 3).unwrap().to_json().to_string();
        let b = build_series(&half(), 3).unwrap().to_json().to_string();
        assert_eq!(a, b);
        assert!(a.contains(r#""energy":["0","-1/3","-11/27","-64/1215"]"#));
        assert!(a.contains(r#"{"a":{},"b":{"1":"-1/3"},"n":1}"#));
    }
}
