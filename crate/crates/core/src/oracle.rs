//! Non-perturbative reference solver: Galerkin matrix of the angular
//! operator in the spin-weighted spherical-harmonic basis.
//!
//! `M = diag(l(l+1) − 3/4) + 2sβ C − β² C²` over `l = m, m+1, …`, with `C`
//! the tridiagonal `cosθ` matrix. `C²` is formed one row beyond the
//! truncation and then cut, so the `β²` block is exact within the window.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, DEFAULT_POINTS};
use crate::rational::{int, rat, to_f64, validate_m, Rational};
use crate::series::SuperpotentialSeries;

pub const SELF_CONVERGENCE: f64 = 1e-12;
const MAX_LMAX: usize = 512;
const JACOBI_SWEEPS: usize = 100;

fn spin_f64() -> f64 {
    0.5
}

/// `⟨l|cosθ|l⟩ = −ms/(l(l+1))`.
pub fn cos_diagonal(m: f64, l: f64) -> f64 {
    -m * spin_f64() / (l * (l + 1.0))
}

/// `⟨l+1|cosθ|l⟩`.
pub fn cos_offdiagonal(m: f64, l: f64) -> f64 {
    let s = spin_f64();
    let l1 = l + 1.0;
    ((l1 * l1 - m * m) * (l1 * l1 - s * s)).sqrt() / (l1 * ((2.0 * l + 1.0) * (2.0 * l + 3.0)).sqrt())
}

#[derive(Clone, Debug)]
pub struct SpectralProblem {
    pub m: Rational,
    pub beta: f64,
    pub lmax: usize,
    pub matrix: DMatrix<f64>,
}

fn cos_matrix(m: f64, size: usize) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(size, size);
    for i in 0..size {
        let l = m + i as f64;
        c[(i, i)] = cos_diagonal(m, l);
        if i + 1 < size {
            let v = cos_offdiagonal(m, l);
            c[(i, i + 1)] = v;
            c[(i + 1, i)] = v;
        }
    }
    c
}

pub fn assemble(m: &Rational, beta: f64, lmax: usize) -> Result<SpectralProblem> {
    validate_m(m)?;
    if lmax < 4 {
        return Err(Error::Domain(format!("lmax = {lmax} must be at least 4")));
    }
    if !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta} is not finite")));
    }
    let mf = to_f64(m);
    let c = cos_matrix(mf, lmax + 1);
    let c2 = &c * &c;
    let s = spin_f64();
    let mut a = DMatrix::zeros(lmax, lmax);
    for i in 0..lmax {
        let l = mf + i as f64;
        for j in i.saturating_sub(2)..(i + 3).min(lmax) {
            let mut v = 2.0 * s * beta * c[(i, j)] - beta * beta * c2[(i, j)];
            if i == j {
                v += l * (l + 1.0) - s * (s + 1.0);
            }
            a[(i, j)] = v;
        }
    }
    // Exact symmetry.
    for i in 0..lmax {
        for j in 0..i {
            a[(j, i)] = a[(i, j)];
        }
    }
    Ok(SpectralProblem {
        m: m.clone(),
        beta,
        lmax,
        matrix: a,
    })
}

/// Cyclic Jacobi rotations; eigenvalues ascending with matching columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut off = 0.0;
    for _ in 0..JACOBI_SWEEPS {
        off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            return Ok(sorted_pairs(&a, &v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Numeric {
        detail: format!("Jacobi iteration did not converge in {JACOBI_SWEEPS} sweeps"),
        achieved: off.sqrt(),
    })
}

fn sorted_pairs(a: &DMatrix<f64>, v: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let vals = idx.iter().map(|&i| a[(i, i)]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &v.column(i));
    }
    (vals, vecs)
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub eigenvalues: Vec<f64>,
    /// Columns in the harmonic basis, one per returned level.
    pub eigenvectors: Option<DMatrix<f64>>,
    /// Largest change of a returned eigenvalue when lmax doubles.
    pub truncation_error: f64,
    pub lmax: usize,
}

pub fn default_lmax(k: usize) -> usize {
    32.max(4 * k)
}

/// The k smallest eigenvalues, doubling lmax until they move by at most
/// [`SELF_CONVERGENCE`].
pub fn lowest_eigenvalues(p: &SpectralProblem, k: usize) -> Result<OracleResult> {
    if k == 0 || 2 * k > p.lmax {
        return Err(Error::Domain(format!("k = {k} needs 1 <= k <= lmax/2 = {}", p.lmax / 2)));
    }
    let mut current = p.clone();
    let (mut vals, mut vecs) = jacobi_eigen(&current.matrix)?;
    loop {
        let next_lmax = 2 * current.lmax;
        let next = assemble(&current.m, current.beta, next_lmax)?;
        let (nvals, nvecs) = jacobi_eigen(&next.matrix)?;
        let delta = (0..k).map(|i| (nvals[i] - vals[i]).abs()).fold(0.0, f64::max);
        if delta <= SELF_CONVERGENCE {
            return Ok(OracleResult {
                eigenvalues: vals[..k].to_vec(),
                eigenvectors: Some(vecs.columns(0, k).into_owned()),
                truncation_error: delta,
                lmax: current.lmax,
            });
        }
        if next_lmax >= MAX_LMAX {
            return Err(Error::Numeric {
                detail: format!("oracle not self-converged at lmax = {next_lmax}"),
                achieved: delta,
            });
        }
        current = next;
        vals = nvals;
        vecs = nvecs;
    }
}

/// Convenience: assemble at the default size and solve.
pub fn oracle_eigenvalues(m: &Rational, beta: f64, k: usize) -> Result<OracleResult> {
    lowest_eigenvalues(&assemble(m, beta, default_lmax(k))?, k)
}

// ---------------------------------------------------------------------------
// Exact-rational refinement.
//
// With `T = S⁻¹ C S` for a diagonal S (ones above the diagonal, squared
// couplings below), the rational matrix `M′ = D + 2sβT − β²T²` has the same
// leading principal minors as M. The count of negative pivots of `M′ − λ`
// therefore counts the eigenvalues below λ, and bisection on dyadic λ pins an
// eigenvalue far beyond double precision.
// ---------------------------------------------------------------------------

fn rational_matrix(m: &Rational, beta: &Rational, size: usize) -> Vec<Vec<Rational>> {
    let s = rat(1, 2);
    let n = size + 1;
    let ls: Vec<Rational> = (0..n).map(|i| m + int(i as i64)).collect();
    let mut t = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        let l = &ls[i];
        t[i][i] = -(m * &s / (l * (l + Rational::one())));
        if i + 1 < n {
            let l1 = l + Rational::one();
            let q = (&l1 * &l1 - m * m) * (&l1 * &l1 - &s * &s)
                / (&l1 * &l1 * (int(2) * l + int(1)) * (int(2) * l + int(3)));
            t[i][i + 1] = Rational::one();
            t[i + 1][i] = q;
        }
    }
    let mut out = vec![vec![Rational::zero(); size]; size];
    for i in 0..size {
        for j in i.saturating_sub(2)..(i + 3).min(size) {
            let mut t2 = Rational::zero();
            for k in i.saturating_sub(1)..(i + 2).min(n) {
                if !t[i][k].is_zero() && !t[k][j].is_zero() {
                    t2 += &t[i][k] * &t[k][j];
                }
            }
            let mut v = int(2) * &s * beta * &t[i][j] - beta * beta * t2;
            if i == j {
                v += &ls[i] * (&ls[i] + Rational::one()) - rat(3, 4);
            }
            out[i][j] = v;
        }
    }
    out
}

/// Inertia and determinant of `A − λ` by elimination without pivoting:
/// (number of negative pivots, det). `None` on an exact zero pivot.
fn inertia(a: &[Vec<Rational>], lambda: &Rational) -> Option<(usize, Rational)> {
    let n = a.len();
    let mut w: Vec<Vec<Rational>> = a.to_vec();
    for (i, row) in w.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut negatives = 0;
    let mut det = Rational::one();
    for k in 0..n {
        let pivot = w[k][k].clone();
        if pivot.is_zero() {
            return None;
        }
        if pivot.is_negative() {
            negatives += 1;
        }
        for i in k + 1..(k + 3).min(n) {
            if w[i][k].is_zero() {
                continue;
            }
            let factor = &w[i][k] / &pivot;
            for j in k..(k + 3).min(n) {
                if !w[k][j].is_zero() {
                    let d = &factor * &w[k][j];
                    w[i][j] -= d;
                }
            }
        }
        det *= pivot;
    }
    Some((negatives, det))
}

fn dyadic(x: f64) -> Rational {
    Rational::from_float(x).expect("finite")
}

/// Nearest-below multiple of 2^-bits.
fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let scaled = num_integer::Integer::div_floor(&(x.numer() << bits as usize), x.denom());
    Rational::new(scaled, num_bigint::BigInt::one() << bits as usize)
}

/// Pins the `level`-th eigenvalue of the rational matrix to width 2^-bits:
/// an inertia-checked bracket around the double estimate, then Illinois
/// steps on the exact determinant.
fn refine_root(a: &[Vec<Rational>], level: usize, guess: f64, bits: u32) -> Result<Rational> {
    let tiny = Rational::new(One::one(), num_bigint::BigInt::one() << (bits as usize + 8));
    let eval = |x: &Rational| -> (Rational, usize, Rational) {
        let mut x = x.clone();
        loop {
            if let Some((c, d)) = inertia(a, &x) {
                return (x, c, d);
            }
            x += &tiny;
        }
    };
    let mut width = 1e-12 * guess.abs().max(1.0);
    let (mut lo, mut hi, mut f_lo, mut f_hi);
    loop {
        let (l, cl, dl) = eval(&dyadic(guess - width));
        let (h, ch, dh) = eval(&dyadic(guess + width));
        if cl == level && ch == level + 1 {
            (lo, hi, f_lo, f_hi) = (l, h, dl, dh);
            break;
        }
        width *= 16.0;
        if width > 1e6 {
            return Err(Error::Numeric {
                detail: format!("could not isolate eigenvalue {level} near {guess}"),
                achieved: width,
            });
        }
    }
    // One simple root inside: det changes sign across the bracket.
    let target = Rational::new(One::one(), num_bigint::BigInt::one() << bits as usize);
    let mut side = 0i8;
    for _ in 0..400 {
        if &hi - &lo <= target {
            break;
        }
        let mut x = round_dyadic(&((&lo * &f_hi - &hi * &f_lo) / (&f_hi - &f_lo)), bits + 4);
        // Keep the probe strictly inside and nudge it off a stalled end.
        let margin = &target / int(4);
        if x <= &lo + &margin {
            x = &lo + &margin;
        } else if x >= &hi - &margin {
            x = &hi - &margin;
        }
        let (x, _, fx) = eval(&x);
        if (fx.is_negative()) == (f_lo.is_negative()) {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi /= int(2);
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo /= int(2);
            }
            side = 1;
        }
    }
    if &hi - &lo > target {
        return Err(Error::Numeric {
            detail: format!("eigenvalue {level} refinement stalled"),
            achieved: to_f64(&(&hi - &lo)),
        });
    }
    Ok((lo + hi) / int(2))
}

/// High-precision eigenvalue from the exact similar matrix.
#[derive(Clone, Debug)]
pub struct RefinedEigenvalue {
    pub value: Rational,
    /// `|λ(L) − λ(L−8)|` between the two window sizes used.
    pub self_convergence: f64,
    pub lmax: usize,
}

/// `level`-th eigenvalue at β converted exactly from the double, to
/// roughly 1e−33 absolute.
pub fn refined_eigenvalue(m: &Rational, beta: f64, level: usize) -> Result<RefinedEigenvalue> {
    validate_m(m)?;
    let guess = oracle_eigenvalues(m, beta, level + 1)?.eigenvalues[level];
    let b = dyadic(beta);
    let bits = 110;
    let mut lmax = 16.max(level + 12);
    let mut prev = refine_root(&rational_matrix(m, &b, lmax - 8), level, guess, bits)?;
    loop {
        let cur = refine_root(&rational_matrix(m, &b, lmax), level, guess, bits)?;
        let diff = to_f64(&(&cur - &prev)).abs();
        if diff <= 1e-30 {
            return Ok(RefinedEigenvalue {
                value: cur,
                self_convergence: diff,
                lmax,
            });
        }
        if lmax >= 128 {
            return Err(Error::Numeric {
                detail: format!("refined eigenvalue not converged at lmax = {lmax}"),
                achieved: diff,
            });
        }
        prev = cur;
        lmax += 8;
    }
}

// ---------------------------------------------------------------------------
// Fits and comparisons.
// ---------------------------------------------------------------------------

/// Chebyshev points on `[−h, h]`.
pub fn chebyshev_samples(count: usize, half_width: f64) -> Vec<f64> {
    (0..count)
        .map(|i| half_width * (PI * (i as f64 + 0.5) / count as f64).cos())
        .collect()
}

/// Least-squares coefficients `c₀ … c_orders` of the oracle ground
/// eigenvalue `E₀(β) ≈ Σ cₙ βⁿ`.
pub fn series_fit(m: &Rational, orders: usize, samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() <= orders {
        return Err(Error::Domain(format!(
            "{} samples cannot determine {} coefficients",
            samples.len(),
            orders + 1
        )));
    }
    let scale = samples.iter().map(|b| b.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Domain("all fit samples are zero".into()));
    }
    let values = samples
        .iter()
        .map(|&b| Ok(oracle_eigenvalues(m, b, 1)?.eigenvalues[0]))
        .collect::<Result<Vec<f64>>>()?;
    let vander = DMatrix::from_fn(samples.len(), orders + 1, |i, j| (samples[i] / scale).powi(j as i32));
    let svd = vander.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond > 1e12 {
        return Err(Error::Numeric {
            detail: "series fit is ill-conditioned".into(),
            achieved: cond,
        });
    }
    let rhs = DVector::from_vec(values);
    let coeffs = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Numeric {
            detail: format!("least-squares solve failed: {e}"),
            achieved: cond,
        })?;
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c / scale.powi(j as i32))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub beta: f64,
    pub series: f64,
    pub oracle: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub m: Rational,
    pub order: usize,
    pub rows: Vec<CompareRow>,
    /// Slope of `ln|diff|` against `ln|β|` over the nonzero rows.
    pub fitted_order: Option<f64>,
}

impl CompareReport {
    /// `beta,E_series,E_oracle,abs_diff,fitted_order`.
    pub fn to_csv(&self) -> String {
        let slope = self.fitted_order.map(|s| format!("{s:.16e}")).unwrap_or_default();
        let mut out = String::from("beta,E_series,E_oracle,abs_diff,fitted_order\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                r.beta, r.series, r.oracle, r.abs_diff, slope
            ));
        }
        out
    }
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x != 0.0 && **y > 0.0)
        .map(|(x, y)| (x.abs().ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Exact series sum at the double β, as a rational.
fn exact_series_sum(series: &SuperpotentialSeries, beta: f64) -> Rational {
    let b = dyadic(beta);
    series
        .energy()
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, e| acc * &b + e)
}

/// Ground-eigenvalue comparison at each β. The difference is formed
/// between the exact series sum and the refined eigenvalue, so it stays
/// meaningful far below double-precision resolution of E itself.
pub fn compare_report(series: &SuperpotentialSeries, betas: &[f64]) -> Result<CompareReport> {
    let rows = betas
        .iter()
        .map(|&b| compare_row(series, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_report(series, rows))
}

pub fn compare_row(series: &SuperpotentialSeries, beta: f64) -> Result<CompareRow> {
    let exact = exact_series_sum(series, beta);
    let (oracle, diff) = if beta == 0.0 {
        let l = series.m().clone();
        let e00 = &l * (&l + Rational::one()) - rat(3, 4);
        (to_f64(&e00), (&exact - &e00).abs())
    } else {
        let r = refined_eigenvalue(series.m(), beta, 0)?;
        (to_f64(&r.value), (&exact - &r.value).abs())
    };
    Ok(CompareRow {
        beta,
        series: to_f64(&exact),
        oracle,
        abs_diff: to_f64(&diff),
    })
}

pub fn finish_report(series: &SuperpotentialSeries, rows: Vec<CompareRow>) -> CompareReport {
    let xs: Vec<f64> = rows.iter().map(|r| r.beta).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.abs_diff).collect();
    CompareReport {
        m: series.m().clone(),
        order: series.order(),
        fitted_order: log_log_slope(&xs, &ys),
        rows,
    }
}

/// `dE_level/dβ` at β = 0 from central differences with step h and h/2,
/// Richardson-combined.
pub fn eigenvalue_slope(m: &Rational, level: usize, h: f64) -> Result<f64> {
    let e = |b: f64| -> Result<f64> { Ok(oracle_eigenvalues(m, b, level + 1)?.eigenvalues[level]) };
    let d = |h: f64| -> Result<f64> { Ok((e(h)? - e(-h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Ok((4.0 * d2 - d1) / 3.0)
}

// ---------------------------------------------------------------------------
// Eigenvectors as functions of θ.
// ---------------------------------------------------------------------------

/// Orthonormal basis `ψₙ(θ) = √sinθ φₙ(cosθ)`, `φ₀ ∝ (1−x)^{(m+½)/2}(1+x)^{(m−½)/2}`,
/// generated by the three-term recurrence of the `cosθ` matrix.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    m: f64,
    size: usize,
    phi0_norm: f64,
}

impl HarmonicBasis {
    pub fn new(m: &Rational, size: usize) -> Result<Self> {
        validate_m(m)?;
        let mf = to_f64(m);
        let mut basis = Self {
            m: mf,
            size,
            phi0_norm: 1.0,
        };
        let integral = GaussLegendre::new(DEFAULT_POINTS).integrate(
            |t| basis.phi0_raw(t.cos()).powi(2) * t.sin(),
            0.0,
            PI,
            1e-13,
        )?;
        basis.phi0_norm = integral.sqrt().recip();
        Ok(basis)
    }

    fn phi0_raw(&self, x: f64) -> f64 {
        (1.0 - x).max(0.0).powf(0.5 * (self.m + 0.5)) * (1.0 + x).max(0.0).powf(0.5 * (self.m - 0.5))
    }

    /// `ψ₀ … ψ_{size−1}` at θ.
    pub fn eval_all(&self, theta: f64) -> Vec<f64> {
        let x = theta.cos();
        let w = theta.sin().sqrt();
        let mut out = Vec::with_capacity(self.size);
        let mut prev = 0.0;
        let mut cur = self.phi0_norm * self.phi0_raw(x);
        for n in 0..self.size {
            out.push(w * cur);
            let l = self.m + n as f64;
            let d = cos_diagonal(self.m, l);
            let up = cos_offdiagonal(self.m, l);
            let down = if n == 0 { 0.0 } else { cos_offdiagonal(self.m, l - 1.0) };
            let next = ((x - d) * cur - down * prev) / up;
            prev = cur;
            cur = next;
        }
        out
    }

    /// `Σ vₙ ψₙ(θ)`.
    pub fn eval(&self, coeffs: &[f64], theta: f64) -> f64 {
        let vals = self.eval_all(theta);
        coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }
}

/// Level-k oracle eigenfunction in Schrödinger form, unit L² norm in dθ.
#[derive(Clone, Debug)]
pub struct OracleEigenfunction {
    basis: HarmonicBasis,
    coeffs: Vec<f64>,
    pub eigenvalue: f64,
}

impl OracleEigenfunction {
    pub fn new(m: &Rational, beta: f64, level: usize) -> Result<Self> {
        let res = oracle_eigenvalues(m, beta, level + 1)?;
        let vecs = res.eigenvectors.expect("eigenvectors requested");
        let coeffs: Vec<f64> = vecs.column(level).iter().copied().collect();
        Ok(Self {
            basis: HarmonicBasis::new(m, coeffs.len())?,
            coeffs,
            eigenvalue: res.eigenvalues[level],
        })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.basis.eval(&self.coeffs, theta)
    }
}

/// Max-norm distance between two unit-normalized functions after choosing
/// the relative sign that minimizes it.
pub fn aligned_max_distance<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, g: G, grid: &[f64]) -> f64 {
    let plus = grid.iter().map(|&t| (f(t) - g(t)).abs()).fold(0.0, f64::max);
    let minus = grid.iter().map(|&t| (f(t) + g(t)).abs()).fold(0.0, f64::max);
    plus.min(minus)
}
