use std::io::Write;
use std::process::{Command, Output};

fn bivar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bivar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn converged_exits_zero() {
    let out = bivar(&[
        "variation",
        "--fn",
        "linear_ii",
        "--interval",
        "0,1",
        "--k",
        "sqrt(2)",
        "--pairing",
        "euclidean-modulus",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!((doc["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    for key in ["value", "status", "trace", "partition_size", "config"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    let trace = doc["trace"].as_array().unwrap();
    assert_eq!(trace.last().unwrap()["sum"], doc["value"]);
}

#[test]
fn diverging_exits_two() {
    let out = bivar(&[
        "variation",
        "--fn",
        "xsin_inv_x",
        "--interval",
        "0,1",
        "--k",
        "1",
        "--pairing",
        "modulus-product",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "diverging");
    let out = bivar(&[
        "bvnorm",
        "--f",
        "xsin_inv_x",
        "--h",
        "t",
        "--pairing",
        "modulus-product",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["value"].is_null());
}

#[test]
fn budget_exhausted_exits_three() {
    let args = [
        "variation",
        "--fn",
        "x2sin_inv_x",
        "--pairing",
        "modulus-product",
        "--max-points",
        "200",
    ];
    let out = bivar(&args);
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&out);
    assert_eq!(doc["status"], "budget_exhausted");
    assert!(doc["partition_size"].as_u64().unwrap() <= 200);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["variation", "--fn", "("][..],
        &["variation"],
        &["variation", "--fn", "t", "--interval", "1,0"],
        &["variation", "--fn", "t", "--k", "t"],
        &[
            "variation",
            "--fn",
            "linear_ii",
            "--pairing",
            "modulus-product",
        ],
        &["bvnorm", "--f", "linear_ii", "--h", "2*linear"],
        &["check", "--suite", "everything"],
        &["check", "--suite", "all", "--trials", "0"],
        &["frobnicate"],
    ] {
        let out = bivar(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn evaluation_errors_exit_one() {
    let out = bivar(&[
        "variation",
        "--fn",
        "t*sin(1/t)",
        "--pairing",
        "modulus-product",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t = 0"));
}

#[test]
fn help_exits_zero() {
    let out = bivar(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("bvnorm"));
}

#[test]
fn check_failures_exit_four() {
    let out = bivar(&[
        "check",
        "--suite",
        "axioms",
        "--pairing",
        "broken-g3",
        "--trials",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let doc = json(&out);
    let g3 = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "broken-g3:G3")
        .unwrap();
    assert!(g3["failures"].as_u64().unwrap() > 0);
    assert!(
        g3["worst_witness"]["lhs"].as_f64().unwrap() > g3["worst_witness"]["rhs"].as_f64().unwrap()
    );
}

#[test]
fn check_suites_pass() {
    let out = bivar(&[
        "check", "--suite", "axioms", "--trials", "1000", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["seed"], 7);
    let out = bivar(&[
        "check",
        "--suite",
        "2g",
        "--trials",
        "50",
        "--interval",
        "1,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bvnorm_values() {
    let out = bivar(&[
        "bvnorm",
        "--f",
        "linear_ii",
        "--h",
        "linear_ii",
        "--interval",
        "1,2",
        "--k",
        "sqrt(2)",
        "--pairing",
        "euclidean-modulus",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!((doc["value"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    let out = bivar(&["bvnorm", "--f", "const_c", "--h", "const_c"]);
    assert_eq!(json(&out)["value"], 0.0);
    let out = bivar(&[
        "bvnorm",
        "--f",
        "linear_ii",
        "--h",
        "2*linear_ii",
        "--interval",
        "1,2",
        "--k",
        "sqrt(2)",
        "--output",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((row[0].parse::<f64>().unwrap() - 16.0).abs() < 1e-9);
}

#[test]
fn config_file_and_overrides() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# defaults for a scalar run\nfunction = t\npairing = modulus-product\nk = 3\ninterval = 0,2").unwrap();
    let path = file.path().to_str().unwrap();
    let out = bivar(&["variation", "--config", path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 6.0);
    let out = bivar(&[
        "variation",
        "--config",
        path,
        "--k",
        "-1/2",
        "--interval=-1,1",
    ]);
    assert_eq!(json(&out)["value"], 1.0);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "pairing = modulus-product\ncolour = blue").unwrap();
    let out = bivar(&[
        "variation",
        "--fn",
        "t",
        "--config",
        bad.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn repeated_runs_are_identical() {
    for args in [
        &[
            "variation",
            "--fn",
            "x2sin_inv_x",
            "--pairing",
            "modulus-product",
            "--max-points",
            "5000",
            "--output",
            "csv",
        ][..],
        &[
            "check", "--suite", "theorems", "--trials", "20", "--seed", "3",
        ],
    ] {
        let (a, b) = (bivar(args), bivar(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}
