//! End-to-end CLI tests: golden JSON reports for the demo systems, exit
//! codes, and the factor round trip.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zeromod"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zeromod-cli-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Structural JSON comparison with numeric tolerance: integers and strings
/// exact, floats within 1e-6 absolute or relative.
fn json_close(a: &serde_json::Value, b: &serde_json::Value, path: &str) -> Result<(), String> {
    use serde_json::Value::*;
    match (a, b) {
        (Number(x), Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            let tol = 1e-6 * x.abs().max(y.abs()).max(1.0);
            if (x - y).abs() <= tol {
                Ok(())
            } else {
                Err(format!("{path}: {x} vs {y}"))
            }
        }
        (Array(xs), Array(ys)) => {
            if xs.len() != ys.len() {
                return Err(format!("{path}: array lengths {} vs {}", xs.len(), ys.len()));
            }
            for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                json_close(x, y, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        (Object(xs), Object(ys)) => {
            if xs.len() != ys.len() {
                return Err(format!("{path}: key sets differ"));
            }
            for (k, x) in xs {
                let y = ys.get(k).ok_or_else(|| format!("{path}: missing key {k}"))?;
                json_close(x, y, &format!("{path}.{k}"))?;
            }
            Ok(())
        }
        _ => {
            if a == b {
                Ok(())
            } else {
                Err(format!("{path}: {a} vs {b}"))
            }
        }
    }
}

#[test]
fn analyze_golden_reports() {
    for name in ["scalar", "row", "column"] {
        let out = bin()
            .args(["analyze"])
            .arg(data(&format!("{name}.json")))
            .arg("--json")
            .output()
            .unwrap();
        assert!(out.status.success(), "analyze {name} failed: {out:?}");
        let actual: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let expected: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(golden(&format!("analyze_{name}.json"))).unwrap())
                .unwrap();
        if let Err(e) = json_close(&actual, &expected, name) {
            panic!("golden mismatch: {e}");
        }
    }
}

#[test]
fn analyze_exit_codes() {
    // Missing file -> 2.
    let out = bin().args(["analyze", "/nonexistent/system.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Bad JSON -> 2.
    let dir = tmp_dir("badjson");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = bin().arg("analyze").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // NaN rejected -> 2 (invalid JSON token already).
    std::fs::write(&bad, r#"{"A": [[NaN]], "B": [[1]], "C": [[1]], "D": [[0]]}"#).unwrap();
    let out = bin().arg("analyze").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_observable_needs_force() {
    let dir = tmp_dir("force");
    let file = dir.join("unobs.json");
    std::fs::write(
        &file,
        r#"{"A": [[-1, 0], [0, -2]], "B": [[1], [1]], "C": [[1, 0]], "D": [[0]]}"#,
    )
    .unwrap();
    let out = bin().arg("analyze").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin().arg("analyze").arg(&file).arg("--force").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("observable: no"), "flag not surfaced:\n{text}");
}

#[test]
fn factorize_round_trip_and_values() {
    let dir = tmp_dir("fac");
    let out = bin()
        .arg("factorize")
        .arg(data("row.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    for name in ["K.json", "L.json", "K_left.json", "L_left.json", "F_r.json", "F_rl.json", "certificates.json"] {
        assert!(dir.join(name).exists(), "{name} missing");
    }
    // The worked example: F_r ~ (-1, -(sqrt2+1), 1, 1).
    let fr: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("F_r.json")).unwrap()).unwrap();
    let b = fr["B"][0][0].as_f64().unwrap();
    assert!((b + (2f64.sqrt() + 1.0)).abs() < 1e-9, "B = {b}");
    let a = fr["A"][0][0].as_f64().unwrap();
    assert!((a + 1.0).abs() < 1e-12);
    // Stored factors verify cleanly against the same system.
    let out = bin()
        .arg("verify")
        .arg(data("row.json"))
        .args(["--samples", "0", "--factors"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn factorize_missing_out_is_usage_error() {
    let out = bin().arg("factorize").arg(data("row.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_detects_perturbed_system_against_stored_factors() {
    let dir = tmp_dir("pert");
    let out = bin()
        .arg("factorize")
        .arg(data("row.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let perturbed = dir.join("perturbed.json");
    std::fs::write(
        &perturbed,
        r#"{"A": [[-1]], "B": [[0, 1]], "C": [[1]], "D": [[1, 0.35]]}"#,
    )
    .unwrap();
    let out = bin()
        .arg("verify")
        .arg(&perturbed)
        .args(["--samples", "0", "--factors"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[FAIL] factors: annihilation"), "{text}");
}

#[test]
fn verify_samples_reproducible() {
    let run = |seed: &str| {
        let out = bin()
            .arg("verify")
            .arg(data("scalar.json"))
            .args(["--samples", "4", "--seed", seed, "--json"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        String::from_utf8(out.stdout).unwrap()
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn oracle_demo_systems_match() {
    for name in ["scalar", "row", "column"] {
        let out = bin().arg("oracle").arg(data(&format!("{name}.json"))).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "oracle {name}: {out:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(!text.contains("MISMATCH"), "{text}");
    }
}

#[test]
fn oracle_rejects_non_rational() {
    let dir = tmp_dir("pi");
    let file = dir.join("pi.json");
    std::fs::write(
        &file,
        r#"{"A": [[-1]], "B": [[1]], "C": [[3.141592653589793]], "D": [[1]]}"#,
    )
    .unwrap();
    let out = bin().arg("oracle").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn oracle_accepts_fraction_strings() {
    let dir = tmp_dir("frac");
    let file = dir.join("frac.json");
    // (z - 1/2)/(z + 1/2): A = -1/2, B = 1, C = -1, D = 1.
    std::fs::write(
        &file,
        r#"{"A": [["-1/2"]], "B": [[1]], "C": [[-1]], "D": [[1]]}"#,
    )
    .unwrap();
    let out = bin().arg("oracle").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1/2"), "exact rational zero not reported:\n{text}");
}

#[test]
fn invalid_tol_is_parse_error() {
    let out = bin()
        .arg("analyze")
        .arg(data("scalar.json"))
        .args(["--tol", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tol_flag_propagates() {
    // An absurdly loose tolerance collapses the numerical rank of
    // everything; the command still runs and reports.
    let out = bin()
        .arg("analyze")
        .arg(data("scalar.json"))
        .args(["--tol", "1e-2", "--force"])
        .output()
        .unwrap();
    assert!(out.status.success() || out.status.code() == Some(3));
}
