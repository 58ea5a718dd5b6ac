//! End-to-end runs of the `nzeta` binary against golden outputs.
//!
//! Regenerate the golden files with `UPDATE_GOLDEN=1 cargo test -p nielsen-zeta-cli`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nielsen_zeta::document::{parse_descriptor, RadicalDocument};
use nielsen_zeta::zeta::exp_sum_series;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn nzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nzeta"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("nzeta runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str, args: &[&str], code: i32) {
    let out = nzeta(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let actual = stdout(&out);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output of {args:?} differs from {name}");
}

#[test]
fn zeta_periodic_text() {
    golden("zeta_periodic.txt", &["zeta", "data/periodic_m2.json"], 0);
    let out = stdout(&nzeta(&["zeta", "data/periodic_m2.json"]));
    assert!(out.starts_with("(1 - z)^(-1) · (1 - z^2)^(-1)\nrational: yes\n"));
}

#[test]
fn zeta_seifert_preserving_is_one() {
    golden("zeta_seifert_preserving.txt", &["zeta", "data/seifert_preserving.json"], 0);
}

#[test]
fn zeta_golden_mean_with_series() {
    golden(
        "zeta_golden_mean.txt",
        &["zeta", "data/golden_mean.json", "--order", "8", "--series"],
        0,
    );
}

#[test]
fn zeta_decomposition_and_torus() {
    golden("zeta_decomposition.txt", &["zeta", "data/decomposition.json"], 0);
    golden("zeta_torus.txt", &["zeta", "data/torus_cat.json"], 0);
}

#[test]
fn verify_exit_codes() {
    for d in ["periodic_m2", "seifert_reversing", "torus_cat", "golden_mean", "decomposition"] {
        let out = nzeta(&["verify", &format!("data/{d}.json")]);
        assert_eq!(out.status.code(), Some(0), "{d}");
    }
    golden("verify_corrupt.txt", &["verify", "data/periodic_m2.json", "--debug-corrupt"], 1);
    golden("verify_order_zero.txt", &["verify", "data/torus_cat.json", "--order", "0"], 0);
}

#[test]
fn nielsen_listings() {
    golden("nielsen_seifert.txt", &["nielsen", "data/seifert_reversing.json", "--n-max", "6"], 0);
    golden("nielsen_torus.txt", &["nielsen", "data/torus_cat.json", "--n-max", "3"], 0);
}

#[test]
fn twisted_commands() {
    golden(
        "twisted_check.txt",
        &["twisted", "check", "--phi", "a -> a b, b -> a", "--x", "a", "--y", "a b"],
        0,
    );
    golden("twisted_classes_identity.txt", &["twisted", "classes", "--phi", "a -> a", "--length", "3"], 0);
    golden(
        "twisted_classes_anosov.txt",
        &["twisted", "classes", "--endomorphism", "data/anosov.json", "--length", "6", "--bound", "4"],
        0,
    );
    golden(
        "twisted_crosscheck.txt",
        &["twisted", "lemma8", "--endomorphism", "data/anosov.json", "--samples", "10", "--bound", "4"],
        0,
    );
}

#[test]
fn asym_commands() {
    golden("asym_eval.txt", &["asym", "eval", "--coeffs", "1", "--x", "1,4"], 0);
    golden(
        "asym_fit.txt",
        &["asym", "fit", "data/synthetic_h2.csv", "--terms", "2", "--odd-zero"],
        0,
    );
    golden(
        "asym_ratio.txt",
        &["asym", "ratio", "data/leading_only_h2.csv", "--coeffs", "3.7"],
        0,
    );
}

#[test]
fn fit_recovers_bundled_coefficients() {
    let out = nzeta(&["asym", "fit", "data/synthetic_h2.csv", "--odd-zero", "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c: Vec<f64> = v["coeffs"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(((c[0] - 3.7) / 3.7).abs() < 1e-6);
    assert_eq!(c[1], 0.0);
    assert!(((c[2] - 1.2) / 1.2).abs() < 1e-6);
}

#[test]
fn ratio_on_leading_only_data_is_one() {
    let out = nzeta(&["asym", "ratio", "data/leading_only_h2.csv", "--coeffs", "3.7", "--format", "machine"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!((row["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn machine_output_reexpands_to_the_exponential_sum() {
    for d in ["periodic_m2", "seifert_reversing", "torus_cat", "golden_mean", "decomposition"] {
        let file = format!("data/{d}.json");
        let out = nzeta(&["zeta", &file, "--format", "machine"]);
        assert_eq!(out.status.code(), Some(0));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        let doc: RadicalDocument = serde_json::from_value(v["closed_form"].clone()).unwrap();
        let descriptor = parse_descriptor(&std::fs::read_to_string(root().join(&file)).unwrap()).unwrap();
        assert_eq!(
            doc.to_expr().unwrap().expand(64).unwrap(),
            exp_sum_series(&descriptor, 64).unwrap(),
            "{d}"
        );
    }
}

#[test]
fn machine_series_matches_text_series() {
    let m = nzeta(&["zeta", "data/golden_mean.json", "--order", "12", "--series", "--format", "machine"]);
    let v: Value = serde_json::from_slice(&m.stdout).unwrap();
    let series: Vec<&str> = v["series"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(series, ["1", "1", "2", "3", "5", "8", "13", "21", "34", "55", "89", "144", "233"]);
}

#[test]
fn parse_errors_exit_3_with_a_diagnostic() {
    let dir = std::env::temp_dir().join(format!("nzeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        ("truncated.json", r#"{"type": "periodic", "period": "2""#, "line 1"),
        ("typo.json", r#"{"type": "seifert_fibered", "fibre_action": "reversing"}"#, "fibre_action"),
        ("number.json", r#"{"type": "periodic", "period": 2, "nielsen": {"1": "1"}}"#, "period"),
    ];
    for (name, text, needle) in cases {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        let out = nzeta(&["zeta", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(3), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
    let out = nzeta(&["asym", "fit", "Cargo.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invariant_violations_exit_4_and_name_the_rule() {
    let dir = std::env::temp_dir().join(format!("nzeta-cli-inv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        (r#"{"type": "periodic", "period": "2", "nielsen": {"1": "1"}}"#, "divisor"),
        (r#"{"type": "torus_linear", "matrix": [["2", "0"], ["0", "1"]]}"#, "det"),
        (r#"{"type": "subshift_markov", "terms": [{"matrix": [["1", "-1"], ["0", "1"]], "sign": "+1"}]}"#, "negative entry"),
        (r#"{"type": "decomposition", "pieces": []}"#, "nonempty"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = dir.join(format!("case{i}.json"));
        std::fs::write(&path, text).unwrap();
        let out = nzeta(&["zeta", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(4), "{text}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{text}: {err}");
    }
}

#[test]
fn other_exit_codes() {
    assert_eq!(nzeta(&["zeta"]).status.code(), Some(2));
    assert_eq!(nzeta(&["zeta", "data/does-not-exist.json"]).status.code(), Some(7));
    // too few samples for the requested number of coefficients
    assert_eq!(
        nzeta(&["asym", "fit", "data/leading_only_h2.csv", "--terms", "40"]).status.code(),
        Some(5)
    );
    // the torus has no closed form with a linear denominator
    let out = nzeta(&["zeta", "data/torus_cat.json", "--max-den-degree", "1"]);
    assert_eq!(out.status.code(), Some(6));
    let out = nzeta(&["zeta", "data/torus_cat.json", "--max-den-degree", "1", "--series", "--order", "4"]);
    assert_eq!(out.status.code(), Some(6));
    assert!(stdout(&out).contains("n,coefficient"));
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("nzeta-out-{}.txt", std::process::id()));
    let out = nzeta(&["zeta", "data/periodic_m2.json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("rational: yes"));
}
