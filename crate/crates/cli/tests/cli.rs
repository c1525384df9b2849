use std::process::{Command, Output};

use serde_json::Value;

fn thetawell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetawell"))
        .args(args)
        .env_remove("THETAWELL_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV output, split into cells.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(text: &str) -> &str {
    text.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn density_csv_layout_and_determinism() {
    let args = ["density", "--mu", "5", "--beta", "0.01", "--grid-x", "32", "--grid-t", "8"];
    let first = thetawell(&args);
    assert!(first.status.success());
    let text = stdout(&first);
    assert!(text.starts_with("# thetawell"));
    assert!(text.contains("# mu=5 beta=0.01"));
    assert!(text.contains("units: natural"));
    assert_eq!(header(&text), "x,t,value,tag");
    let data = rows(&text);
    assert_eq!(data.len(), 32 * 8);
    for row in &data {
        assert_eq!(row.len(), 4);
        assert_eq!(row[3], "finite");
        assert!(row[2].parse::<f64>().unwrap() >= 0.0);
    }
    // ordered by t, then x
    assert_eq!(data[0][1], data[31][1]);
    assert_ne!(data[31][1], data[32][1]);
    let second = thetawell(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn density_json_mirrors_csv() {
    let base = ["density", "--mu", "1", "--beta", "0.1", "--grid-x", "5", "--grid-t", "3"];
    let csv = stdout(&thetawell(&base));
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let json: Value = serde_json::from_slice(&thetawell(&json_args).stdout).unwrap();
    let records = json.as_array().unwrap();
    let data = rows(&csv);
    assert_eq!(records.len(), data.len());
    for (record, row) in records.iter().zip(&data) {
        let keys: Vec<&String> = record.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["x", "t", "value", "tag"]);
        assert_eq!(record["value"].as_f64().unwrap(), row[2].parse::<f64>().unwrap());
    }
}

#[test]
fn tagged_samples_have_empty_values() {
    let text = stdout(&thetawell(&["velocity", "--mu", "2", "--beta", "0.3", "--grid-x", "5", "--grid-t", "3"]));
    let data = rows(&text);
    for row in &data {
        let x: f64 = row[0].parse().unwrap();
        if x == 0.0 || x == 0.5 || x == 1.0 {
            assert_eq!(row[3], "node-undefined");
            assert_eq!(row[2], "");
        } else {
            assert_eq!(row[3], "finite");
        }
    }
    let text = stdout(&thetawell(&["energy", "--mu", "1", "--beta", "0.1", "--grid-x", "3", "--grid-t", "2"]));
    let data = rows(&text);
    assert_eq!(data[0][3], "pole");
    assert_eq!(data[1][3], "finite");
    assert_eq!(data[2][3], "pole");
}

#[test]
fn averaged_density_has_no_time() {
    let text = stdout(&thetawell(&["averaged-density", "--mu", "1", "--beta", "10", "--grid-x", "3"]));
    let data = rows(&text);
    assert_eq!(data.len(), 3);
    assert_eq!(data[1][1], "");
    assert!((data[1][2].parse::<f64>().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn wigner_atoms_sum_to_density() {
    let common = ["--mu", "1", "--beta", "0.2", "--grid-x", "3", "--grid-t", "2"];
    let comb = stdout(&thetawell(&[&["wigner"][..], &common[..]].concat()));
    assert_eq!(header(&comb), "x,t,p,value,tag");
    let dens = stdout(&thetawell(&[&["density"][..], &common[..]].concat()));
    for row in rows(&dens) {
        let total: f64 = rows(&comb)
            .iter()
            .filter(|r| r[0] == row[0] && r[1] == row[1])
            .map(|r| r[3].parse::<f64>().unwrap())
            .sum();
        assert!((total.max(0.0) - row[2].parse::<f64>().unwrap()).abs() < 1e-10);
    }
}

#[test]
fn thermo_table_over_mu_range() {
    let out = thetawell(&["thermo", "--mu", "1..5", "--beta-sweep", "0.05:2:40"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(header(&text), "beta,mu,mean_energy,entropy,partition");
    let data = rows(&text);
    assert_eq!(data.len(), 5 * 40);
    let entropy_at = |mu: &str| -> Vec<f64> {
        data.iter().filter(|r| r[1] == mu).map(|r| r[3].parse().unwrap()).collect()
    };
    let one = entropy_at("1");
    assert!(one.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(one, entropy_at("4"));
}

#[test]
fn verify_passes_for_reference_state() {
    let out = thetawell(&["verify", "--mu", "1", "--beta", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let data = rows(&stdout(&out));
    assert!(data.len() >= 20);
    assert!(data.iter().all(|r| r[5] == "pass"));
}

#[test]
fn verify_failure_exit_code() {
    // a coarse truncation breaks the exact identities
    let out = thetawell(&["verify", "--mu", "1", "--beta", "0.1", "--tol", "1e-5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(rows(&stdout(&out)).iter().any(|r| r[5] == "fail"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| thetawell(args).status.code();
    assert_eq!(code(&["density", "--mu", "1"]), Some(1));
    assert_eq!(code(&["density", "--mu", "1", "--beta", "0.1", "--grid-x", "1"]), Some(1));
    assert_eq!(code(&["density", "--mu", "1", "--beta", "0.1", "--tol", "1e-3"]), Some(1));
    assert_eq!(code(&["density", "--mu", "1..3", "--beta", "0.1"]), Some(1));
    assert_eq!(code(&["density", "--mu", "1", "--beta", "0.1", "--format", "xml"]), Some(1));
    assert_eq!(code(&["nonsense"]), Some(1));
    assert_eq!(code(&["density", "--mu", "1", "--beta", "1e-9", "--grid-x", "2", "--grid-t", "2"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "# job\nmu = 3\nbeta = 0.5\ngrid_x = 4\ngrid-t = 2\ntol = 1e-10\n").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_thetawell"))
        .args(["density", "--config", cfg.to_str().unwrap(), "--grid-x", "6", "--out", out.to_str().unwrap()])
        .env("THETAWELL_TOL", "1e-8")
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("mu=3 beta=0.5"));
    assert!(text.contains("tol=1e-10"));
    assert_eq!(rows(&text).len(), 6 * 2);

    let env_only = Command::new(env!("CARGO_BIN_EXE_thetawell"))
        .args(["density", "--mu", "1", "--beta", "1", "--grid-x", "2", "--grid-t", "2"])
        .env("THETAWELL_TOL", "1e-8")
        .output()
        .unwrap();
    assert!(stdout(&env_only).contains("tol=1e-8"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let bad = thetawell(&["density", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn explicit_units_are_echoed() {
    let text = stdout(&thetawell(&[
        "density", "--mu", "1", "--beta", "1", "--m", "2", "--l", "3", "--grid-x", "3", "--grid-t", "2",
    ]));
    assert!(text.contains("units: explicit m=2 l=3 hbar=1"));
    let last_x: f64 = rows(&text)[2][0].parse().unwrap();
    assert_eq!(last_x, 3.0);
}
