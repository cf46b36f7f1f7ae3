use std::process::Command;

use stimclone::cli::{main_with_args, CSV_HEADER, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("stimclone").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn atoms_csv_shape() {
    let (code, out, _) = run(&[
        "atoms",
        "--n-atoms",
        "3",
        "--gamma-t-max",
        "1",
        "--steps",
        "10",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[1], "0,,,,1.00000000000,1.00000000000");
    assert!(!out.contains('\r'));
    for row in &lines[2..] {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 6);
        assert!(fields[5] <= fields[4]);
    }
}

#[test]
fn atoms_json_parses() {
    let (code, out, _) = run(&[
        "atoms",
        "--n-atoms",
        "2",
        "--gamma-t-max",
        "0.5",
        "--steps",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows[0]["f_clones"].is_null());
    assert!(rows[1]["f_clones"].as_f64().unwrap() > 0.8);
}

#[test]
fn atoms_writes_file() {
    let dir = std::env::temp_dir().join(format!("stimclone-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&[
        "atoms",
        "--n-atoms",
        "1",
        "--gamma-t-max",
        "1",
        "--steps",
        "4",
        "--out",
        p,
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written.lines().count(), 6);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn atoms_rejects_bad_input() {
    assert_eq!(
        run(&[
            "atoms",
            "--n-atoms",
            "0",
            "--gamma-t-max",
            "1",
            "--steps",
            "4"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(
        run(&[
            "atoms",
            "--n-atoms",
            "2",
            "--gamma-t-max",
            "-1",
            "--steps",
            "4"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(
        run(&[
            "atoms",
            "--n-atoms",
            "-3",
            "--gamma-t-max",
            "1",
            "--steps",
            "4"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(run(&["atoms", "--n-atoms", "2"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
}

#[test]
fn pdc_fidelity_text() {
    let (code, out, _) = run(&["pdc", "--n-in", "1", "--m-out", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("clone_fidelity 5/6"), "{out}");
    assert!(out.contains("anticlone_fidelity 2/3"), "{out}");
}

#[test]
fn pdc_fidelity_without_anticlones() {
    let (code, out, err) = run(&["pdc", "--n-in", "2", "--m-out", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("clone_fidelity 1 "), "{out}");
    assert!(!out.contains("anticlone"));
    assert!(!err.is_empty());
}

#[test]
fn pdc_fidelity_csv() {
    let (code, out, _) = run(&["pdc", "--n-in", "2", "--m-out", "5", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "quantity,exact,decimal");
    // (2*5 + 2 + 5) / (5 * 4)
    assert!(lines[1].starts_with("clone_fidelity,17/20,0.85"), "{out}");
    assert!(lines[2].starts_with("anticlone_fidelity,3/4,0.75"), "{out}");
}

#[test]
fn pdc_rejects_m_below_n() {
    let (code, _, err) = run(&["pdc", "--n-in", "3", "--m-out", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!err.is_empty());
}

#[test]
fn pdc_weights_sum_below_one() {
    let (code, out, _) = run(&[
        "pdc",
        "--n-in",
        "1",
        "--gamma-t",
        "0.3",
        "--weights",
        "--m-max",
        "6",
    ]);
    assert_eq!(code, EXIT_OK);
    let weights: Vec<f64> = out
        .lines()
        .filter(|l| l.starts_with("weight "))
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert_eq!(weights.len(), 6);
    let sum: f64 = weights.iter().sum();
    assert!(sum > 0.0 && sum <= 1.0 + 1e-12);
    assert!(weights.windows(2).all(|w| w[0] > w[1]), "{weights:?}");
}

#[test]
fn verify_single_check() {
    let (code, out, _) = run(&["verify", "--only", "anticlone"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("PASS anticlone"), "{out}");
    assert!(out.contains("1 of 1 checks passed"));
}

#[test]
fn verify_reports_ordering_failure() {
    let (code, out, _) = run(&["verify", "--only", "bound-ordering", "--max-atoms", "2"]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(out.starts_with("FAIL bound-ordering"), "{out}");
}

#[test]
fn verify_unknown_check() {
    assert_eq!(run(&["verify", "--only", "nonsense"]).0, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_stimclone");
    let ok = Command::new(bin)
        .args(["pdc", "--n-in", "1", "--m-out", "2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(
        String::from_utf8_lossy(&ok.stdout).lines().next(),
        Some("clone_fidelity 5/6 0.833333")
    );
    let usage = Command::new(bin)
        .args(["atoms", "--steps", "x"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));
}
