//! Evaluable superpotentials `W(θ; β) = W₀ + Σ βⁿ Wₙ` and exact
//! polynomials in β with trigonometric coefficients.

use num_traits::{One, Zero};

use crate::rational::{to_f64, Rational};
use crate::series::{SuperpotentialSeries, W0Params};
use crate::trig::{sin_odd_antiderivatives, NumericTrig, TrigExpr, TrigPoly};

/// `Σ_n βⁿ cₙ(θ)` with exact trigonometric coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BetaSeries {
    terms: Vec<TrigExpr>,
}

impl BetaSeries {
    pub fn new(mut terms: Vec<TrigExpr>) -> Self {
        while terms.last().is_some_and(TrigExpr::is_zero) {
            terms.pop();
        }
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(vec![TrigExpr::constant(Rational::one())])
    }

    /// Constant-in-θ series `Σ cₙ βⁿ`.
    pub fn from_constants(coeffs: &[Rational]) -> Self {
        Self::new(coeffs.iter().cloned().map(TrigExpr::constant).collect())
    }

    /// Coefficient of βⁿ (zero past the end).
    pub fn term(&self, n: usize) -> TrigExpr {
        self.terms.get(n).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &[TrigExpr] {
        &self.terms
    }

    /// Highest β power present plus one.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self::new((0..n).map(|i| &self.term(i) + &other.term(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self::new((0..n).map(|i| &self.term(i) - &other.term(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::zero();
        }
        let mut out = vec![TrigExpr::zero(); self.len() + other.len() - 1];
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.terms.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out)
    }

    /// θ-derivative, order by order.
    pub fn derivative(&self) -> Self {
        Self::new(self.terms.iter().map(TrigExpr::derivative).collect())
    }

    /// Orders `lo..` only.
    pub fn tail(&self, lo: usize) -> Self {
        Self::new(
            self.terms
                .iter()
                .enumerate()
                .map(|(i, t)| if i >= lo { t.clone() } else { TrigExpr::zero() })
                .collect(),
        )
    }

    /// Lowest β power with a nonzero coefficient.
    pub fn lowest_order(&self) -> Option<usize> {
        self.terms.iter().position(|t| !t.is_zero())
    }

    pub fn to_numeric(&self) -> NumericBetaSeries {
        NumericBetaSeries {
            terms: self.terms.iter().map(TrigExpr::to_numeric).collect(),
        }
    }

    pub fn eval(&self, theta: f64, beta: f64) -> f64 {
        self.to_numeric().eval(theta, beta)
    }
}

#[derive(Clone, Debug, Default)]
pub struct NumericBetaSeries {
    terms: Vec<NumericTrig>,
}

impl NumericBetaSeries {
    pub fn eval(&self, theta: f64, beta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.terms
            .iter()
            .rev()
            .fold(0.0, |acc, t| acc * beta + t.eval_sc(s, c))
    }
}

/// A superpotential with explicit coefficients, physical or rescaled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superpotential {
    m: Rational,
    w0: W0Params,
    /// `orders[n-1]` holds `Wₙ`.
    orders: Vec<TrigPoly>,
}

impl Superpotential {
    pub fn new(m: Rational, w0: W0Params, orders: Vec<TrigPoly>) -> Self {
        Self { m, w0, orders }
    }

    pub fn physical(series: &SuperpotentialSeries) -> Self {
        Self {
            m: series.m().clone(),
            w0: series.w0().clone(),
            orders: (1..=series.order()).map(|n| series.w(n).clone()).collect(),
        }
    }

    pub fn m(&self) -> &Rational {
        &self.m
    }

    pub fn w0(&self) -> &W0Params {
        &self.w0
    }

    pub fn order(&self) -> usize {
        self.orders.len()
    }

    /// `Wₙ` as an expression; n = 0 gives the cot/csc part.
    pub fn order_expr(&self, n: usize) -> TrigExpr {
        if n == 0 {
            self.w0.to_expr()
        } else {
            self.orders
                .get(n - 1)
                .map(TrigPoly::to_expr)
                .unwrap_or_default()
        }
    }

    pub fn order_poly(&self, n: usize) -> Option<&TrigPoly> {
        self.orders.get(n.checked_sub(1)?)
    }

    pub fn beta_series(&self) -> BetaSeries {
        BetaSeries::new((0..=self.order()).map(|n| self.order_expr(n)).collect())
    }

    /// `−∫W dθ`, with the sine-power antiderivatives anchored at θ = 0 and
    /// the W₀ part written as `−cot·ln sinθ − csc·ln tan(θ/2)`.
    pub fn log_ground(&self, theta: f64, beta: f64) -> f64 {
        let (s, _) = theta.sin_cos();
        let mut acc = -to_f64(&self.w0.cot) * s.ln() - to_f64(&self.w0.csc) * (0.5 * theta).tan().ln();
        let kmax = self
            .orders
            .iter()
            .map(|p| p.max_b_index())
            .max()
            .unwrap_or(0);
        let p_vals = if kmax > 0 {
            sin_odd_antiderivatives(kmax, theta)
        } else {
            Vec::new()
        };
        let mut bpow = 1.0;
        for w in &self.orders {
            bpow *= beta;
            let mut term = 0.0;
            for (&k, a) in w.cos_part() {
                term += to_f64(a) * s.powi(2 * k as i32) / (2.0 * k as f64);
            }
            for (&k, b) in w.sin_part() {
                term += to_f64(b) * p_vals[k as usize - 1];
            }
            acc -= bpow * term;
        }
        acc
    }

    pub fn eval(&self, theta: f64, beta: f64) -> f64 {
        self.beta_series().eval(theta, beta)
    }

    /// Parameter-free check that the W₀ part makes `exp(−∫W)` vanish at both ends.
    pub fn is_confining(&self) -> bool {
        // Near 0: exponent of θ is −(cot + csc); near π: −(cot − csc).
        let zero = -(&self.w0.cot + &self.w0.csc);
        let pi = &self.w0.csc - &self.w0.cot;
        zero > Rational::zero() && pi > Rational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::series::build_series;
    use std::f64::consts::PI;

    #[test]
    fn beta_series_product_and_eval() {
        let a = BetaSeries::new(vec![TrigExpr::cos(), TrigExpr::constant(rat(1, 2))]);
        let b = BetaSeries::new(vec![TrigExpr::constant(rat(2, 1)), TrigExpr::zero(), TrigExpr::cos()]);
        let p = a.mul(&b);
        let (theta, beta) = (0.7, 0.3);
        assert!((p.eval(theta, beta) - a.eval(theta, beta) * b.eval(theta, beta)).abs() < 1e-14);
        assert_eq!(p.len(), 4);
        assert_eq!(BetaSeries::new(vec![TrigExpr::zero(), TrigExpr::zero()]).len(), 0);
        assert_eq!(p.tail(2).lowest_order(), Some(2));
    }

    #[test]
    fn log_ground_derivative_is_minus_w() {
        let series = build_series(&rat(3, 2), 6).unwrap();
        let w = Superpotential::physical(&series);
        let beta = 0.3;
        for &theta in &[0.2, 1.0, 2.0, 2.9] {
            let h = 1e-5;
            let fd = (w.log_ground(theta + h, beta) - w.log_ground(theta - h, beta)) / (2.0 * h);
            let wv = w.eval(theta, beta);
            assert!((fd + wv).abs() < 1e-8 * wv.abs().max(1.0), "theta={theta}");
        }
    }

    #[test]
    fn physical_prefactor_matches_closed_form() {
        let series = build_series(&rat(5, 2), 0).unwrap();
        let w = Superpotential::physical(&series);
        assert!(w.is_confining());
        for &theta in &[0.1, 1.3, PI - 0.1] {
            let closed = (1.0 - theta.cos()).sqrt() * theta.sin().powf(2.5);
            assert!((w.log_ground(theta, 0.0).exp() - closed).abs() < 1e-14);
        }
    }
}
