use std::path::PathBuf;
use std::process::{Command, Output};

fn swsh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swsh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("swsh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn coeffs_energy_table() {
    let o = swsh(&["coeffs", "--m", "1/2", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    let e: Vec<&str> = v["energy"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(e, ["0", "-1/3", "-11/27", "-64/1215", "-224/10935"]);
}

#[test]
fn eigen_sweep_has_exact_zero_row() {
    let o = swsh(&["eigen", "--m", "1/2", "--order", "4", "--beta", "0.0:0.2:5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "beta,E_series,E_oracle,abs_diff,fitted_order");
    assert_eq!(lines.len(), 6);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(first[3].parse::<f64>().unwrap(), 0.0);
    let betas: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(betas.windows(2).all(|w| w[0] < w[1]), "rows keep sweep order");
}

#[test]
fn sweep_output_independent_of_thread_count() {
    let args = ["oracle", "--m", "3/2", "--beta", "-0.2:0.2:7", "--level", "2"];
    let one = Command::new(env!("CARGO_BIN_EXE_swsh"))
        .args(args)
        .env("SWSH_SEED_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_swsh"))
        .args(args)
        .env("SWSH_SEED_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one).lines().count(), 1 + 7 * 3);
}

#[test]
fn bad_thread_count_is_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_swsh"))
        .args(["coeffs", "--order", "1"])
        .env("SWSH_SEED_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn wavefunc_columns() {
    let o = swsh(&["wavefunc", "--m", "1/2", "--order", "2", "--beta", "0.1", "--level", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "theta,psi0,theta0,residual");
    assert!(text.lines().count() > 100);
}

#[test]
fn excited_writes_flow_and_energy() {
    let out = tmp("flow.json");
    let o = swsh(&["excited", "--m", "1/2", "--order", "2", "--level", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let orders = v["steps"][0]["orders"].as_array().unwrap();
    assert_eq!(orders[0]["R"], "3");
    assert_eq!(orders[1]["R"], "4/15");
    assert!(orders.iter().all(|o| o["theta_independence"] == "exact"));
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert!(csv.starts_with("level,order,coefficient\n"));
    assert!(csv.contains("1,1,-1/15\n"));
}

#[test]
fn verify_is_byte_identical_and_passes() {
    let (a, b) = (tmp("v1.json"), tmp("v2.json"));
    for p in [&a, &b] {
        let o = swsh(&["verify", "--m", "1/2", "--order", "8", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["schema"], 1);
    let ric = v["riccati"].as_array().unwrap();
    assert_eq!(ric.len(), 8);
    assert!(ric.iter().all(|r| r["status"] == "exact-zero"));
    assert!(v["divergences"].as_array().unwrap().iter().any(|d| d["class"] == "PAPER-DIVERGENCE"));
}

#[test]
fn config_errors_exit_one() {
    for args in [
        &["coeffs", "--m", "-1/2"][..],
        &["coeffs", "--m", "x"],
        &["eigen", "--beta", "0:1:0"],
        &["eigen", "--beta", "nan"],
        &["frobnicate"],
        &["excited", "--level", "0"],
        &["oracle", "--lmax", "2"],
    ] {
        assert_eq!(swsh(args).status.code(), Some(1), "{args:?}");
    }
}
