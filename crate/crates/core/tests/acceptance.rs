//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the summary lines are
//! printed on every run, passing or not.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use swsh_core::eigenfunction::{excited_wavefunction, residual_grid, GroundState};
use swsh_core::oracle::{
    aligned_max_distance, chebyshev_samples, compare_report, eigenvalue_slope, oracle_eigenvalues,
    refined_eigenvalue, series_fit, OracleEigenfunction,
};
use swsh_core::rational::{int, rat, to_f64};
use swsh_core::reference;
use swsh_core::series::{build_series, crosscheck_identities, riccati_residual};
use swsh_core::shape::{excited_energy, solve_flow_step, verify_invariance, ShapeParamSet};
use swsh_core::verify::{verify, VerifyConfig, PAPER_DIVERGENCE};
use swsh_core::Rational;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn half_integers(max_twice: i64) -> Vec<Rational> {
    (1..=max_twice).step_by(2).map(|p| rat(p, 2)).collect()
}

fn within(elapsed: Duration, limit_s: f64) -> Outcome {
    let t = elapsed.as_secs_f64();
    if t < limit_s {
        Ok(format!("{t:.2}s"))
    } else {
        Err(format!("runtime {t:.2}s exceeds {limit_s}s"))
    }
}

fn golden_coefficients() -> Outcome {
    let start = Instant::now();
    for m in half_integers(7) {
        let s = build_series(&m, 4).map_err(|e| e.to_string())?;
        for n in 1..=4 {
            let printed = reference::w_published(n, &m).expect("printed through order 4");
            ensure!(&printed == s.w(n), "W_{n} differs at m={m}");
        }
        let e = s.energy();
        ensure!(e[1] == rat(-1, 1) / (int(2) * &m + int(2)), "E_01 at m={m}");
        ensure!(e[1] == reference::e01(&m), "E_01 form at m={m}");
        ensure!(e[3] == reference::e03(&m), "E_03 at m={m}");
        ensure!(e[4] == reference::e04(&m), "E_04 at m={m}");
    }
    let t = within(start.elapsed(), 1.0)?;
    Ok(format!("m=1/2..7/2, W_1..W_4 and E_01, E_03, E_04 exact; {t}"))
}

fn riccati_exactness() -> Outcome {
    let start = Instant::now();
    for m in half_integers(9) {
        let s = build_series(&m, 12).map_err(|e| e.to_string())?;
        for n in 0..=12 {
            let r = riccati_residual(&s, n).map_err(|e| e.to_string())?;
            ensure!(r.is_zero(), "residual at m={m}, n={n}: {r}");
        }
    }
    let t = within(start.elapsed(), 10.0)?;
    Ok(format!("m=1/2..9/2, n<=12 all exact zero; {t}"))
}

fn discrepancy_adjudication() -> Outcome {
    for m in half_integers(9) {
        let s = build_series(&m, 2).map_err(|e| e.to_string())?;
        let d = int(2) * &m + int(2);
        let expected = -(int(4) * &m * &m + int(10) * &m + int(5)) / (&d * &d * &d);
        ensure!(s.energy()[2] == expected, "E_02 at m={m} is {}", s.energy()[2]);
    }
    let half = rat(1, 2);
    let s = build_series(&half, 4).map_err(|e| e.to_string())?;
    ensure!(s.energy()[2] == rat(-11, 27), "E_02(1/2) = {}", s.energy()[2]);
    let fit = series_fit(&half, 8, &chebyshev_samples(24, 0.05)).map_err(|e| e.to_string())?;
    let err = (fit[2] + 11.0 / 27.0).abs();
    ensure!(err <= 1e-6, "oracle fit E_02 = {} (err {err:e})", fit[2]);
    let rep = verify(&VerifyConfig { m: half, order: 4, levels: 0 }).map_err(|e| e.to_string())?;
    let printed = reference::e02_published(&rat(1, 2)).to_string();
    let notice = rep.divergences().iter().any(|d| {
        d["class"] == PAPER_DIVERGENCE && d["item"] == "E_{0,2;m}" && d["printed"] == printed.as_str()
    });
    ensure!(notice, "no PAPER-DIVERGENCE notice for E_{{0,2;m}}");
    Ok(format!("E_02 = -(4m^2+10m+5)/(2m+2)^3; fit error {err:.1e}; notice against printed {printed}"))
}

fn identity_suite() -> Outcome {
    let mut total = 0;
    for m in half_integers(9) {
        let s = build_series(&m, 12).map_err(|e| e.to_string())?;
        let rep = crosscheck_identities(&s).map_err(|e| e.to_string())?;
        if let Some(c) = rep.checks.iter().find(|c| !c.holds()) {
            return Err(format!("{} fails at m={m}, n={}, l={}", c.name, c.n, c.l));
        }
        for n in (2..=12).step_by(2) {
            let top = (n / 2 + 1) as u32;
            ensure!(s.w(n).a(top).eq(&int(0)) && s.w(n).b(top).eq(&int(0)), "top coefficient at n={n}");
        }
        total += rep.checks.len();
    }
    Ok(format!("{total} exact identity checks over m=1/2..9/2, n<=12"))
}

fn eigenvalue_agreement() -> Outcome {
    let start = Instant::now();
    let m = rat(1, 2);
    let s = build_series(&m, 8).map_err(|e| e.to_string())?;
    let o = oracle_eigenvalues(&m, 0.1, 1).map_err(|e| e.to_string())?;
    ensure!(o.truncation_error <= 1e-12, "oracle self-convergence {:e}", o.truncation_error);
    let diff = (s.energy_sum(0.1, 8) - o.eigenvalues[0]).abs();
    ensure!(diff <= 1e-7, "|series - oracle| = {diff:e}");
    let rep = compare_report(&s, &[0.2, 0.1, 0.05, 0.025]).map_err(|e| e.to_string())?;
    let slope = rep.fitted_order.ok_or("no slope")?;
    ensure!((slope - 9.0).abs() <= 0.3, "difference slope {slope}");
    let t = within(start.elapsed(), 5.0)?;
    Ok(format!("|diff|(0.1) = {diff:.2e}, slope {slope:.3}; {t}"))
}

fn local_exponent(psi: impl Fn(f64) -> f64, at: f64, step: f64) -> f64 {
    (psi(at + step).abs() / psi(at).abs()).ln() / ((at + step) / at).ln()
}

fn ground_wavefunction() -> Outcome {
    let grid = residual_grid(201);
    let betas = [0.2, 0.1, 0.05, 0.025];
    let mut slopes = Vec::new();
    for n in [2usize, 4, 8] {
        for m in [rat(1, 2), rat(3, 2)] {
            let s = build_series(&m, n).map_err(|e| e.to_string())?;
            let g0 = GroundState::new(&s, 0.0).map_err(|e| e.to_string())?;
            let r0 = g0.direct_residual(&grid);
            ensure!(r0 <= 1e-12, "beta=0 residual {r0:e} (N={n}, m={m})");
            for beta in [-0.5, 0.3, 0.5] {
                let g = GroundState::new(&s, beta).map_err(|e| e.to_string())?;
                let peak = g.ground_psi(PI / 2.0).abs();
                let mf = to_f64(&m);
                // ψ ~ θ^{m+1} at 0 and (π−θ)^m at π.
                let left = local_exponent(|t| g.ground_psi(t), 1e-4, 1e-4);
                let right = local_exponent(|t| g.ground_psi(PI - t), 1e-4, 1e-4);
                ensure!((left - (mf + 1.0)).abs() < 0.01, "exponent at 0 is {left}");
                ensure!((right - mf).abs() < 0.01, "exponent at pi is {right}");
                ensure!(g.ground_psi(1e-3).abs() < 1e-2 * peak, "no decay at 0");
                ensure!(g.ground_psi(PI - 1e-6).abs() < 1e-2 * peak, "no decay at pi");
            }
            let res: Vec<f64> = betas
                .iter()
                .map(|&b| GroundState::new(&s, b).map(|g| g.schrodinger_residual(&grid)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let slope = swsh_core::oracle::log_log_slope(&betas, &res).ok_or("no slope")?;
            ensure!((slope - (n as f64 + 1.0)).abs() <= 0.3, "residual slope {slope} for N={n}, m={m}");
            if m == rat(1, 2) {
                slopes.push(format!("N={n}: {slope:.2}"));
            }
        }
    }
    Ok(format!("endpoint exponents m+1 and m; residual slopes {}", slopes.join(", ")))
}

fn shape_invariance() -> Outcome {
    for m in [rat(1, 2), rat(3, 2), rat(5, 2)] {
        let s = build_series(&m, 8).map_err(|e| e.to_string())?;
        let step = solve_flow_step(&ShapeParamSet::all_ones(8), &s, 8).map_err(|e| e.to_string())?;
        let orders = verify_invariance(&step, &s, &residual_grid(41)).map_err(|e| e.to_string())?;
        ensure!(orders.len() == 9, "checked {} orders", orders.len());
        ensure!(step.remainder[0] == int(2) * &m + int(2), "R_0 = {}", step.remainder[0]);
        let r1 = rat(1, 1) / ((&m + int(1)) * (&m + int(2)));
        ensure!(step.remainder[1] == r1, "R_1 = {}", step.remainder[1]);
    }
    let s = build_series(&rat(1, 2), 8).map_err(|e| e.to_string())?;
    let step = solve_flow_step(&ShapeParamSet::all_ones(8), &s, 8).map_err(|e| e.to_string())?;
    ensure!(step.remainder[1] == rat(4, 15), "R_1(1/2) = {}", step.remainder[1]);
    let rep = verify(&VerifyConfig { m: rat(1, 2), order: 2, levels: 0 }).map_err(|e| e.to_string())?;
    ensure!(
        rep.divergences().iter().any(|d| d["class"] == PAPER_DIVERGENCE && d["item"] == "R_{1;m}"),
        "no PAPER-DIVERGENCE notice for R_{{1;m}}"
    );
    Ok("n<=8 exact, R_0 = 2m+2, R_1 = 1/((m+1)(m+2)) = 4/15 at m=1/2; notice emitted".into())
}

fn excited_level() -> Outcome {
    let m = rat(1, 2);
    let e = excited_energy(&m, 1, 2).map_err(|e| e.to_string())?;
    ensure!(e[0] == int(3) && e[1] == rat(-1, 15), "E_1 = {} + {} beta", e[0], e[1]);
    let slope = eigenvalue_slope(&m, 1, 1e-3).map_err(|e| e.to_string())?;
    let err = (slope + 1.0 / 15.0).abs();
    ensure!(err <= 1e-6, "oracle slope {slope} (err {err:e})");
    let s = build_series(&m, 4).map_err(|e| e.to_string())?;
    let ladder = excited_wavefunction(&s, 1, 0.0).map_err(|e| e.to_string())?;
    let orc = OracleEigenfunction::new(&m, 0.0, 1).map_err(|e| e.to_string())?;
    let d = aligned_max_distance(|t| ladder.psi(t), |t| orc.eval(t), &residual_grid(401));
    ensure!(d <= 1e-6, "ladder vs oracle eigenvector {d:e}");
    // Cross-check the refined second eigenvalue at small β.
    let b = 1e-2;
    let r = refined_eigenvalue(&m, b, 1).map_err(|e| e.to_string())?;
    let sum = ladder.energy_sum(b);
    ensure!((sum - to_f64(&r.value)).abs() < 1e-9, "E_1 series vs refined at beta={b}");
    Ok(format!("slope err {err:.1e}, eigenvector distance {d:.1e}"))
}

fn determinism() -> Outcome {
    let cfg = VerifyConfig { m: rat(1, 2), order: 8, levels: 1 };
    let a = verify(&cfg).map_err(|e| e.to_string())?;
    let b = verify(&cfg).map_err(|e| e.to_string())?;
    ensure!(a.passed, "verify reported failures: {:?}", a.failures());
    ensure!(a.render() == b.render(), "reports differ");
    Ok(format!("{} identical bytes", a.render().len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden coefficients", golden_coefficients),
        ("Riccati exactness", riccati_exactness),
        ("discrepancy adjudication", discrepancy_adjudication),
        ("identity suite", identity_suite),
        ("series-oracle eigenvalue agreement", eigenvalue_agreement),
        ("ground wavefunction", ground_wavefunction),
        ("shape invariance", shape_invariance),
        ("excited level vs oracle", excited_level),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
