//! Ground and excited eigenfunctions in Schrödinger form, with residual
//! checks against the angular equation.
//!
//! Every state is stored as `F(θ, β) · exp(−∫W_g)`, where `F` is an exact
//! polynomial in β with trigonometric coefficients and `W_g` is the
//! superpotential whose ground state carries the exponential. Residuals are
//! assembled exactly in β and only the orders beyond the truncation survive.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, DEFAULT_POINTS};
use crate::rational::{to_f64, Rational};
use crate::series::{potential_term, SuperpotentialSeries};
use crate::shape::flow_chain;
use crate::superpotential::{BetaSeries, NumericBetaSeries, Superpotential};

const MODULE: &str = "eigenfunction";
pub const NORM_TOLERANCE: f64 = 1e-12;

/// `Q(θ, β)` in floating point.
pub fn potential(m: f64, theta: f64, beta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let inner = m + 0.5 * c;
    0.75 + beta * beta * c * c - beta * c - (inner * inner - 0.25) / (s * s)
}

fn potential_series(m: &Rational) -> BetaSeries {
    BetaSeries::new((0..=2).map(|n| potential_term(m, n)).collect())
}

/// Uniform grid on `[0.05, π − 0.05]`.
pub fn residual_grid(points: usize) -> Vec<f64> {
    let (a, b) = (0.05, PI - 0.05);
    if points < 2 {
        return vec![0.5 * (a + b)];
    }
    (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect()
}

/// A state `F(θ, β) exp(−∫W_g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderState {
    prefactor: BetaSeries,
    ground: Superpotential,
}

impl LadderState {
    /// `exp(−∫W)` itself.
    pub fn ground(w: Superpotential) -> Self {
        Self {
            prefactor: BetaSeries::one(),
            ground: w,
        }
    }

    pub fn prefactor(&self) -> &BetaSeries {
        &self.prefactor
    }

    pub fn ground_superpotential(&self) -> &Superpotential {
        &self.ground
    }

    pub fn value(&self, theta: f64, beta: f64) -> f64 {
        self.prefactor.eval(theta, beta) * self.ground.log_ground(theta, beta).exp()
    }

    /// `(F′ − W_g F) exp(−∫W_g)`.
    pub fn derivative(&self, theta: f64, beta: f64) -> f64 {
        let f = self.prefactor.eval(theta, beta);
        let df = self.prefactor.derivative().eval(theta, beta);
        (df - self.ground.eval(theta, beta) * f) * self.ground.log_ground(theta, beta).exp()
    }

    /// `S` in `ψ″ + (Q + E)ψ = S exp(−∫W_g)`:
    /// `F″ − 2F′W_g + F(W_g² − W_g′ + Q + E)`.
    pub fn residual_series(&self, energy: &[Rational]) -> BetaSeries {
        let w = self.ground.beta_series();
        let f = &self.prefactor;
        let df = f.derivative();
        let base = w
            .mul(&w)
            .sub(&w.derivative())
            .add(&potential_series(self.ground.m()))
            .add(&BetaSeries::from_constants(energy));
        let two_w = BetaSeries::from_constants(&[Rational::from_integer(2.into())]).mul(&w);
        df.derivative().sub(&df.mul(&two_w)).add(&f.mul(&base))
    }
}

/// `A† = −d/dθ + W` applied to a ladder state; exact in β.
pub fn ladder_apply(w: &Superpotential, psi: &LadderState) -> LadderState {
    let f = &psi.prefactor;
    let sum = w.beta_series().add(&psi.ground.beta_series());
    LadderState {
        prefactor: sum.mul(f).sub(&f.derivative()),
        ground: psi.ground.clone(),
    }
}

/// Verifies that every order ≤ N of a residual series is exactly zero.
fn check_low_orders(s: &BetaSeries, order: usize, op: &'static str) -> Result<()> {
    for n in 0..=order.min(s.len().saturating_sub(1)) {
        let t = s.term(n);
        if !t.is_zero() {
            return Err(Error::verification(MODULE, op, n, format!("residual term {t} survives")));
        }
    }
    Ok(())
}

fn l2_normalizer<F: Fn(f64) -> f64>(f: F, points: usize) -> Result<f64> {
    let integral = GaussLegendre::new(points).integrate(|t| f(t).powi(2), 0.0, PI, NORM_TOLERANCE)?;
    if !(integral > 0.0 && integral.is_finite()) {
        return Err(Error::Numeric {
            detail: "state has zero or non-finite L2 norm".into(),
            achieved: integral,
        });
    }
    Ok(integral.sqrt().recip())
}

/// Normalized ground state `Ψ₀` at fixed β.
#[derive(Clone, Debug)]
pub struct GroundState<'a> {
    series: &'a SuperpotentialSeries,
    beta: f64,
    norm: f64,
    w: Superpotential,
    tail: NumericBetaSeries,
}

impl<'a> GroundState<'a> {
    /// Normalized so that `∫₀^π Ψ₀² dθ = 1`.
    pub fn new(series: &'a SuperpotentialSeries, beta: f64) -> Result<Self> {
        let mut g = Self::unnormalized(series, beta)?;
        g.norm = g.normalize()?;
        Ok(g)
    }

    /// Constant N = 1.
    pub fn unnormalized(series: &'a SuperpotentialSeries, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::Domain(format!("beta = {beta} is not finite")));
        }
        let w = Superpotential::physical(series);
        let s = LadderState::ground(w.clone()).residual_series(series.energy());
        check_low_orders(&s, series.order(), "schrodinger_residual")?;
        Ok(Self {
            series,
            beta,
            norm: 1.0,
            w,
            tail: s.to_numeric(),
        })
    }

    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = norm;
        self
    }

    pub fn series(&self) -> &SuperpotentialSeries {
        self.series
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn ground_psi(&self, theta: f64) -> f64 {
        self.norm * self.w.log_ground(theta, self.beta).exp()
    }

    pub fn ground_theta(&self, theta: f64) -> f64 {
        self.ground_psi(theta) / theta.sin().sqrt()
    }

    /// N with `∫ Ψ₀² = 1` (independent of the current norm).
    pub fn normalize(&self) -> Result<f64> {
        self.normalize_with_points(DEFAULT_POINTS)
    }

    pub fn normalize_with_points(&self, points: usize) -> Result<f64> {
        l2_normalizer(|t| self.w.log_ground(t, self.beta).exp(), points)
    }

    /// `Ψ₀″ + (Q + E₀(β))Ψ₀` at one angle, from the exact residual series.
    pub fn residual_at(&self, theta: f64) -> f64 {
        self.ground_psi(theta) * self.tail.eval(theta, self.beta)
    }

    /// Max |residual| over the grid.
    pub fn schrodinger_residual(&self, grid: &[f64]) -> f64 {
        grid.iter().map(|&t| self.residual_at(t).abs()).fold(0.0, f64::max)
    }

    /// The same residual evaluated directly in floating point,
    /// `Ψ₀ (W² − W′ + Q + E₀(β))`.
    pub fn direct_residual(&self, grid: &[f64]) -> f64 {
        let w = self.w.beta_series();
        let (wn, dwn) = (w.to_numeric(), w.derivative().to_numeric());
        let m = to_f64(self.series.m());
        let e = self.series.energy_sum(self.beta, self.series.order());
        grid.iter()
            .map(|&t| {
                let wv = wn.eval(t, self.beta);
                let bracket = wv * wv - dwn.eval(t, self.beta) + potential(m, t, self.beta) + e;
                (self.ground_psi(t) * bracket).abs()
            })
            .fold(0.0, f64::max)
    }

    /// CSV with columns `theta,psi0,theta0,residual`.
    pub fn to_csv(&self, grid: &[f64]) -> String {
        let mut out = String::from("theta,psi0,theta0,residual\n");
        for &t in grid {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                t,
                self.ground_psi(t),
                self.ground_theta(t),
                self.residual_at(t)
            ));
        }
        out
    }
}

/// Level-l state `A†(a₁)⋯A†(a_l) Ψ₀(a_{l+1})`, normalized at the end.
#[derive(Clone, Debug)]
pub struct ExcitedState {
    level: usize,
    order: usize,
    beta: f64,
    norm: f64,
    energy: Vec<Rational>,
    state: LadderState,
    prefactor: NumericBetaSeries,
    tail: NumericBetaSeries,
}

impl ExcitedState {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn state(&self) -> &LadderState {
        &self.state
    }

    /// Exact `E_{l;m}` coefficients through the series order.
    pub fn energy(&self) -> &[Rational] {
        &self.energy
    }

    pub fn energy_sum(&self, beta: f64) -> f64 {
        self.energy.iter().rev().fold(0.0, |acc, e| acc * beta + to_f64(e))
    }

    fn raw(&self, theta: f64) -> f64 {
        self.prefactor.eval(theta, self.beta) * self.state.ground.log_ground(theta, self.beta).exp()
    }

    pub fn psi(&self, theta: f64) -> f64 {
        self.norm * self.raw(theta)
    }

    pub fn residual_at(&self, theta: f64) -> f64 {
        self.norm * self.state.ground.log_ground(theta, self.beta).exp() * self.tail.eval(theta, self.beta)
    }

    pub fn schrodinger_residual(&self, grid: &[f64]) -> f64 {
        grid.iter().map(|&t| self.residual_at(t).abs()).fold(0.0, f64::max)
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

/// Builds the level-l ladder state from the flow chain of the physical set.
pub fn excited_wavefunction(series: &SuperpotentialSeries, level: usize, beta: f64) -> Result<ExcitedState> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta} is not finite")));
    }
    let chain = flow_chain(series, level)?;
    let physical = Superpotential::physical(series);
    // W(a_k) for k = 1..=l+1.
    let mut ws = vec![physical];
    ws.extend(chain.iter().map(|s| s.flowed.clone()));
    let mut state = LadderState::ground(ws[level].clone());
    for w in ws[..level].iter().rev() {
        state = ladder_apply(w, &state);
    }
    let mut energy = series.energy().to_vec();
    for step in &chain {
        for (e, r) in energy.iter_mut().zip(&step.remainder) {
            *e += r;
        }
    }
    let s = state.residual_series(&energy);
    check_low_orders(&s, series.order(), "excited_wavefunction")?;
    let mut out = ExcitedState {
        level,
        order: series.order(),
        beta,
        norm: 1.0,
        energy,
        prefactor: state.prefactor.to_numeric(),
        tail: s.to_numeric(),
        state,
    };
    out.norm = l2_normalizer(|t| out.raw(t), DEFAULT_POINTS)?;
    Ok(out)
}

/// `∫₀^π f g dθ`.
pub fn overlap<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, g: G) -> Result<f64> {
    GaussLegendre::new(DEFAULT_POINTS).integrate(|t| f(t) * g(t), 0.0, PI, NORM_TOLERANCE)
}

/// Largest `|x|` of a state over a grid; a cheap nondegeneracy probe.
pub fn max_abs<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> f64 {
    grid.iter().map(|&t| f(t).abs()).fold(0.0, f64::max)
}
