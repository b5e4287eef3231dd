//! Closed trigonometric algebra over exact rationals.
//!
//! Everything the recursions touch is a finite sum of `cos^c θ · sin^k θ`
//! with `c ∈ {0, 1}` and integer `k`. Products fold `cos²θ = 1 − sin²θ`
//! immediately, so the representation is canonical: two expressions are
//! equal as functions on (0, π) iff their term maps are equal.
//!
//! [`TrigPoly`] and [`SourceSeries`] are typed views on the two shapes the
//! recursions care about; [`TrigExpr`] is the general carrier used for
//! residuals and partner potentials.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, to_f64, Rational};

/// Key of a basis monomial: (has cosθ factor, power of sinθ).
pub type Monomial = (bool, i32);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl TrigExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(false, 0, c)
    }

    pub fn monomial(cos: bool, sin_pow: i32, coeff: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(cos, sin_pow, coeff);
        e
    }

    /// `cosθ`
    pub fn cos() -> Self {
        Self::monomial(true, 0, Rational::one())
    }

    pub fn add_term(&mut self, cos: bool, sin_pow: i32, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let key = (cos, sin_pow);
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, cos: bool, sin_pow: i32) -> Rational {
        self.terms
            .get(&(cos, sin_pow))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the expression does not depend on θ.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(false, 0)).cloned(),
            _ => None,
        }
    }

    /// The expression with its constant term removed.
    pub fn without_constant(&self) -> Self {
        let mut e = self.clone();
        e.terms.remove(&(false, 0));
        e
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&(cos, k), c) in &self.terms {
            let kr = int(k as i64);
            if cos {
                // (cos sin^k)' = k sin^{k-1} − (k+1) sin^{k+1}
                out.add_term(false, k - 1, c * &kr);
                out.add_term(false, k + 1, -(c * (kr + Rational::one())));
            } else {
                out.add_term(true, k - 1, c * kr);
            }
        }
        out
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.terms
            .iter()
            .map(|(&(cos, k), v)| {
                let t = to_f64(v) * s.powi(k);
                if cos {
                    t * c
                } else {
                    t
                }
            })
            .sum()
    }

    /// Coefficients converted once for repeated floating evaluation.
    pub fn to_numeric(&self) -> NumericTrig {
        NumericTrig {
            terms: self
                .terms
                .iter()
                .map(|(&(cos, k), v)| (cos, k, to_f64(v)))
                .collect(),
        }
    }

    /// Largest sin power present (for bound checks), `None` if zero.
    pub fn max_sin_power(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).max()
    }
}

impl fmt::Display for TrigExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(cos, k), v)| {
                let mut s = format!("({v})");
                if cos {
                    s.push_str("·cos");
                }
                if k != 0 {
                    s.push_str(&format!("·sin^{k}"));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &TrigExpr {
    type Output = TrigExpr;
    fn add(self, rhs: &TrigExpr) -> TrigExpr {
        let mut out = self.clone();
        for (&(cos, k), v) in &rhs.terms {
            out.add_term(cos, k, v.clone());
        }
        out
    }
}

impl Sub for &TrigExpr {
    type Output = TrigExpr;
    fn sub(self, rhs: &TrigExpr) -> TrigExpr {
        let mut out = self.clone();
        for (&(cos, k), v) in &rhs.terms {
            out.add_term(cos, k, -v.clone());
        }
        out
    }
}

impl Neg for &TrigExpr {
    type Output = TrigExpr;
    fn neg(self) -> TrigExpr {
        TrigExpr {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Mul for &TrigExpr {
    type Output = TrigExpr;
    fn mul(self, rhs: &TrigExpr) -> TrigExpr {
        let mut out = TrigExpr::zero();
        for (&(c1, k1), v1) in &self.terms {
            for (&(c2, k2), v2) in &rhs.terms {
                let v = v1 * v2;
                let k = k1 + k2;
                match (c1, c2) {
                    (true, true) => {
                        out.add_term(false, k, v.clone());
                        out.add_term(false, k + 2, -v);
                    }
                    (a, b) => out.add_term(a || b, k, v),
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for TrigExpr {
            type Output = TrigExpr;
            fn $m(self, rhs: TrigExpr) -> TrigExpr {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Floating copy of a [`TrigExpr`].
#[derive(Clone, Debug, Default)]
pub struct NumericTrig {
    terms: Vec<(bool, i32, f64)>,
}

impl NumericTrig {
    pub fn eval(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.eval_sc(s, c)
    }

    pub fn eval_sc(&self, s: f64, c: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(cos, k, v)| {
                let t = v * s.powi(k);
                if cos {
                    t * c
                } else {
                    t
                }
            })
            .sum()
    }
}

/// `Σ_k b_k sin^{2k−1}θ + cosθ · Σ_k a_k sin^{2k−1}θ`, keys k ≥ 1, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigPoly {
    cos_part: BTreeMap<u32, Rational>,
    sin_part: BTreeMap<u32, Rational>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_parts(
        cos_part: impl IntoIterator<Item = (u32, Rational)>,
        sin_part: impl IntoIterator<Item = (u32, Rational)>,
    ) -> Self {
        let mut p = Self::zero();
        for (k, v) in cos_part {
            p.set_a(k, v);
        }
        for (k, v) in sin_part {
            p.set_b(k, v);
        }
        p
    }

    /// Coefficient of `sin^{2k−1}θ cosθ`.
    pub fn a(&self, k: u32) -> Rational {
        self.cos_part.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `sin^{2k−1}θ`.
    pub fn b(&self, k: u32) -> Rational {
        self.sin_part.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set_a(&mut self, k: u32, v: Rational) {
        assert!(k >= 1, "TrigPoly index must be >= 1");
        if v.is_zero() {
            self.cos_part.remove(&k);
        } else {
            self.cos_part.insert(k, v);
        }
    }

    pub fn set_b(&mut self, k: u32, v: Rational) {
        assert!(k >= 1, "TrigPoly index must be >= 1");
        if v.is_zero() {
            self.sin_part.remove(&k);
        } else {
            self.sin_part.insert(k, v);
        }
    }

    pub fn cos_part(&self) -> &BTreeMap<u32, Rational> {
        &self.cos_part
    }

    pub fn sin_part(&self) -> &BTreeMap<u32, Rational> {
        &self.sin_part
    }

    pub fn is_zero(&self) -> bool {
        self.cos_part.is_empty() && self.sin_part.is_empty()
    }

    pub fn max_a_index(&self) -> u32 {
        self.cos_part.keys().next_back().copied().unwrap_or(0)
    }

    pub fn max_b_index(&self) -> u32 {
        self.sin_part.keys().next_back().copied().unwrap_or(0)
    }

    /// Whether the keys respect the order-n bounds `a: k ≤ ⌊n/2⌋`, `b: k ≤ ⌊(n+1)/2⌋`.
    pub fn within_order_bounds(&self, n: usize) -> bool {
        self.max_a_index() as usize <= n / 2 && self.max_b_index() as usize <= n.div_ceil(2)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_parts(
            self.cos_part.iter().map(|(k, v)| (*k, v * c)),
            self.sin_part.iter().map(|(k, v)| (*k, v * c)),
        )
    }

    pub fn to_expr(&self) -> TrigExpr {
        let mut e = TrigExpr::zero();
        for (&k, v) in &self.cos_part {
            e.add_term(true, 2 * k as i32 - 1, v.clone());
        }
        for (&k, v) in &self.sin_part {
            e.add_term(false, 2 * k as i32 - 1, v.clone());
        }
        e
    }

    /// Inverse of [`to_expr`](Self::to_expr); `None` if the expression leaves the basis.
    pub fn try_from_expr(e: &TrigExpr) -> Option<Self> {
        let mut p = Self::zero();
        for ((cos, k), v) in e.terms() {
            if k < 1 || k % 2 == 0 {
                return None;
            }
            let idx = ((k + 1) / 2) as u32;
            if cos {
                p.set_a(idx, v.clone());
            } else {
                p.set_b(idx, v.clone());
            }
        }
        Some(p)
    }
}

/// `c + Σ_p (h_p + g_p cosθ) sin^{2p−2}θ`.
///
/// `h` keys are ≥ 2 (the p = 1 plain term is `constant`); `g` keys are ≥ 1,
/// since derivatives and partner potentials carry a bare `cosθ` term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceSeries {
    pub constant: Rational,
    h: BTreeMap<u32, Rational>,
    g: BTreeMap<u32, Rational>,
}

impl SourceSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn h(&self, p: u32) -> Rational {
        if p == 1 {
            return self.constant.clone();
        }
        self.h.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn g(&self, p: u32) -> Rational {
        self.g.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds to the plain coefficient at `p` (p = 1 is the constant).
    pub fn add_h(&mut self, p: u32, v: Rational) {
        assert!(p >= 1);
        if p == 1 {
            self.constant += v;
            return;
        }
        add_into(&mut self.h, p, v);
    }

    pub fn add_g(&mut self, p: u32, v: Rational) {
        assert!(p >= 1);
        add_into(&mut self.g, p, v);
    }

    /// `self += c · other`.
    pub fn accumulate(&mut self, other: &SourceSeries, c: &Rational) {
        self.constant += &other.constant * c;
        for (&p, v) in &other.h {
            add_into(&mut self.h, p, v * c);
        }
        for (&p, v) in &other.g {
            add_into(&mut self.g, p, v * c);
        }
    }

    pub fn h_map(&self) -> &BTreeMap<u32, Rational> {
        &self.h
    }

    pub fn g_map(&self) -> &BTreeMap<u32, Rational> {
        &self.g
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.h.is_empty() && self.g.is_empty()
    }

    /// Largest p with a nonzero plain or cos coefficient (1 if only the constant).
    pub fn max_p(&self) -> u32 {
        let h = self.h.keys().next_back().copied().unwrap_or(1);
        let g = self.g.keys().next_back().copied().unwrap_or(1);
        h.max(g)
    }

    /// Vanishing bounds of an order-n convolution source: for even n,
    /// `g_p = 0` for p > n/2 and `h_p = 0` for p > n/2 + 1; for odd n both
    /// vanish for p > (n+1)/2.
    pub fn within_order_bounds(&self, n: usize) -> bool {
        let (g_max, h_max) = if n.is_multiple_of(2) {
            (n / 2, n / 2 + 1)
        } else {
            (n.div_ceil(2), n.div_ceil(2))
        };
        self.g.keys().all(|&p| p as usize <= g_max) && self.h.keys().all(|&p| p as usize <= h_max)
    }

    pub fn to_expr(&self) -> TrigExpr {
        let mut e = TrigExpr::constant(self.constant.clone());
        for (&p, v) in &self.h {
            e.add_term(false, 2 * p as i32 - 2, v.clone());
        }
        for (&p, v) in &self.g {
            e.add_term(true, 2 * p as i32 - 2, v.clone());
        }
        e
    }

    /// `None` if the expression has odd or negative sin powers.
    pub fn try_from_expr(e: &TrigExpr) -> Option<Self> {
        let mut s = Self::zero();
        for ((cos, k), v) in e.terms() {
            if k < 0 || k % 2 != 0 {
                return None;
            }
            let p = (k / 2 + 1) as u32;
            if cos {
                s.add_g(p, v.clone());
            } else {
                s.add_h(p, v.clone());
            }
        }
        Some(s)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.to_expr().eval(theta)
    }
}

fn add_into(map: &mut BTreeMap<u32, Rational>, p: u32, v: Rational) {
    if v.is_zero() {
        return;
    }
    let slot = map.entry(p).or_insert_with(Rational::zero);
    *slot += v;
    if slot.is_zero() {
        map.remove(&p);
    }
}

/// Product of two basis polynomials, folded to at most one cosθ factor.
///
/// `sin^{2i−1} · sin^{2j−1} = sin^{2p−2}` with p = i + j; the cos·cos terms
/// contribute `+` at p and `−` at p + 1 through `cos² = 1 − sin²`.
pub fn trig_product_fold(u: &TrigPoly, v: &TrigPoly) -> SourceSeries {
    let mut out = SourceSeries::zero();
    for (&i, bi) in &u.sin_part {
        for (&j, bj) in &v.sin_part {
            out.add_h(i + j, bi * bj);
        }
        for (&j, aj) in &v.cos_part {
            out.add_g(i + j, bi * aj);
        }
    }
    for (&i, ai) in &u.cos_part {
        for (&j, bj) in &v.sin_part {
            out.add_g(i + j, ai * bj);
        }
        for (&j, aj) in &v.cos_part {
            let prod = ai * aj;
            out.add_h(i + j, prod.clone());
            out.add_h(i + j + 1, -prod);
        }
    }
    out
}

/// Exact θ-derivative in the `{sin^{2p−2}, cosθ sin^{2p−2}}` basis.
pub fn trig_differentiate(u: &TrigPoly) -> SourceSeries {
    let mut out = SourceSeries::zero();
    for (&k, b) in &u.sin_part {
        out.add_g(k, b * int(2 * k as i64 - 1));
    }
    for (&k, a) in &u.cos_part {
        out.add_h(k, a * int(2 * k as i64 - 1));
        out.add_h(k + 1, -(a * int(2 * k as i64)));
    }
    out
}

pub fn trig_eval(u: &TrigPoly, theta: f64) -> f64 {
    u.to_expr().eval(theta)
}

/// `∫₀^θ sin^{2k−1} t dt` for θ ∈ [0, π].
pub fn sin_odd_antiderivative(k: u32, theta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("sin_odd_antiderivative needs k >= 1".into()));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} outside [0, pi]")));
    }
    Ok(sin_odd_antiderivatives(k, theta)[k as usize - 1])
}

/// All of `∫₀^θ sin^{2j−1}`, j = 1..=k, by the upward reduction
/// `P(2j+1) = 2j/(2j+1) P(2j−1) − cosθ sin^{2j}θ/(2j+1)`.
pub(crate) fn sin_odd_antiderivatives(k: u32, theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let half = (0.5 * theta).sin();
    let mut out = Vec::with_capacity(k as usize);
    let mut p = 2.0 * half * half;
    out.push(p);
    for j in 1..k {
        let two_j = 2.0 * j as f64;
        p = two_j / (two_j + 1.0) * p - c * s.powi(2 * j as i32) / (two_j + 1.0);
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn w1_half() -> TrigPoly {
        TrigPoly::from_parts([], [(1, rat(-1, 3))])
    }

    fn w2_half() -> TrigPoly {
        TrigPoly::from_parts([(1, rat(2, 9))], [(1, rat(-2, 27))])
    }

    #[test]
    fn fold_square_of_w1() {
        let sq = trig_product_fold(&w1_half(), &w1_half());
        assert_eq!(sq.h(2), rat(1, 9));
        assert!(sq.g_map().is_empty());
        assert!(sq.constant.is_zero());
    }

    #[test]
    fn fold_with_zero_is_zero() {
        assert!(trig_product_fold(&TrigPoly::zero(), &w2_half()).is_zero());
        assert!(trig_product_fold(&w2_half(), &TrigPoly::zero()).is_zero());
    }

    #[test]
    fn fold_w1_w2_doubled() {
        let p = trig_product_fold(&w1_half(), &w2_half());
        assert_eq!(&p.g(2) * int(2), rat(-4, 27));
        assert_eq!(&p.h(2) * int(2), rat(4, 81));
    }

    #[test]
    fn differentiate_examples() {
        let b = rat(3, 7);
        let d = trig_differentiate(&TrigPoly::from_parts([], [(1, b.clone())]));
        assert_eq!(d.g(1), b);
        assert!(d.h_map().is_empty() && d.constant.is_zero());

        let a = rat(-5, 2);
        let d = trig_differentiate(&TrigPoly::from_parts([(1, a.clone())], []));
        assert_eq!(d.constant, a);
        assert_eq!(d.h(2), -(&a * int(2)));
        assert!(d.g_map().is_empty());

        let d = trig_differentiate(&TrigPoly::from_parts([], [(2, int(1))]));
        assert_eq!(d.g(2), int(3));
    }

    #[test]
    fn eval_examples() {
        let half_pi = PI / 2.0;
        assert!((trig_eval(&w1_half(), half_pi) + 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(trig_eval(&TrigPoly::zero(), 1.234), 0.0);
        assert!((trig_eval(&w2_half(), half_pi) + 2.0 / 27.0).abs() < 1e-16);
    }

    #[test]
    fn antiderivative_examples() {
        assert!((sin_odd_antiderivative(1, PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(sin_odd_antiderivative(1, 0.0).unwrap(), 0.0);
        assert!((sin_odd_antiderivative(2, PI / 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((sin_odd_antiderivative(1, PI).unwrap() - 2.0).abs() < 1e-15);
        assert!(sin_odd_antiderivative(1, -0.1).is_err());
        assert!(sin_odd_antiderivative(1, 3.2).is_err());
    }

    #[test]
    fn antiderivative_matches_simpson() {
        for k in 1..6u32 {
            let theta = 2.1;
            let n = 2000;
            let h = theta / n as f64;
            let f = |t: f64| t.sin().powi(2 * k as i32 - 1);
            let mut acc = f(0.0) + f(theta);
            for i in 1..n {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
            }
            let simpson = acc * h / 3.0;
            assert!((sin_odd_antiderivative(k, theta).unwrap() - simpson).abs() < 1e-12);
        }
    }

    #[test]
    fn expr_cos_squared_folds() {
        let c2 = &TrigExpr::cos() * &TrigExpr::cos();
        assert_eq!(c2.coeff(false, 0), int(1));
        assert_eq!(c2.coeff(false, 2), int(-1));
        assert_eq!(c2.terms().count(), 2);
    }

    fn small_poly() -> impl Strategy<Value = TrigPoly> {
        (
            proptest::collection::vec(-6i64..=6, 0..3),
            proptest::collection::vec(-6i64..=6, 0..4),
        )
            .prop_map(|(a, b)| {
                TrigPoly::from_parts(
                    a.into_iter().enumerate().map(|(i, v)| (i as u32 + 1, rat(v, 5))),
                    b.into_iter().enumerate().map(|(i, v)| (i as u32 + 1, rat(v, 3))),
                )
            })
    }

    proptest! {
        #[test]
        fn fold_matches_pointwise_product(u in small_poly(), v in small_poly(), theta in 0.01f64..3.13) {
            let exact = trig_product_fold(&u, &v);
            prop_assert_eq!(exact.to_expr(), &u.to_expr() * &v.to_expr());
            let lhs = exact.eval(theta);
            let rhs = trig_eval(&u, theta) * trig_eval(&v, theta);
            prop_assert!((lhs - rhs).abs() <= 1e-13);
        }

        #[test]
        fn differentiate_matches_central_difference(u in small_poly(), theta in 0.05f64..3.09) {
            let h = 1e-6;
            let fd = (trig_eval(&u, theta + h) - trig_eval(&u, theta - h)) / (2.0 * h);
            let exact = trig_differentiate(&u);
            prop_assert!((exact.eval(theta) - fd).abs() <= 1e-8);
            prop_assert_eq!(exact.to_expr(), u.to_expr().derivative());
        }

        #[test]
        fn differentiate_is_linear(u in small_poly(), v in small_poly(), c in -5i64..5) {
            let c = rat(c, 2);
            let combo = TrigPoly::try_from_expr(&(&u.scale(&c).to_expr() + &v.to_expr())).unwrap();
            let lhs = trig_differentiate(&combo).to_expr();
            let rhs = &trig_differentiate(&u).to_expr().scale(&c) + &trig_differentiate(&v).to_expr();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
