use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn eqlcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqlcd"))
        .args(args)
        .env("THREADS", "2")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eqlcd-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn run_writes_solution_difference_and_metrics() {
    let dir = scratch("run");
    let out = eqlcd(&["run", "--example", "1", "--scheme", "1", "--nx", "40", "--tfinal", "0.1", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["solution.csv", "difference.csv", "metrics.csv"] {
        assert!(dir.join("example1-scheme1").join(file).exists(), "{file}");
    }
    let solution = fs::read_to_string(dir.join("example1-scheme1/solution.csv")).unwrap();
    assert!(solution.starts_with("x,sigma_rho,sigma_rho_u,q,E\n"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_runs_and_rejects_unknown_keys() {
    let dir = scratch("config");
    fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.toml");
    fs::write(
        &good,
        format!(
            "[run]\nexample = 7\nscheme = \"A\"\n[grid]\ncells = 20\n[time]\nt_final = 0.01\n[output]\ndir = \"{}\"\n",
            dir.join("out").display()
        ),
    )
    .unwrap();
    let out = eqlcd(&["run", "--config", good.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("out/example7-schemeA/solution.csv").exists());

    let bad = dir.join("bad.toml");
    fs::write(&bad, "[run]\nexample = 7\nflux = \"upwind\"\n").unwrap();
    let out = eqlcd(&["run", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("flux"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn steady_writes_reference_states() {
    let dir = scratch("steady");
    let out = eqlcd(&["steady", "--example", "2", "--nx", "30", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.join("example2-steady.csv")).unwrap();
    assert_eq!(text.lines().count(), 31);

    let out = eqlcd(&["steady", "--example", "7", "--out", dir.to_str().unwrap()]);
    assert!(!out.status.success());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn converge_prints_an_order_table() {
    let out = eqlcd(&["converge", "--model", "advection", "--meshes", "10,30,90"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("model,scheme,cells,difference,order,exact_error,exact_order\n"));
    let order: f64 = table.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!(order > 4.5, "{table}");
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    for args in [
        &["run", "--example", "9"][..],
        &["run", "--example", "1", "--scheme", "7"],
        &["converge", "--model", "advection", "--meshes", "10,20"],
    ] {
        let out = eqlcd(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_eqlcd"))
        .args(["converge", "--model", "advection", "--meshes", "10,30"])
        .env("THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("THREADS"));
}
