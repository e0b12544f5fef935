use std::path::PathBuf;
use std::process::Command;

use clap::Parser;
use ultracon_cli::{run, RunConfig, EXIT_FAILED, EXIT_INPUT, EXIT_OK};
use ultracon_core::format::{algebra_from_json, parse_algebra_file};
use ultracon_core::{corpus, find_isomorphism, VerificationReport};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

/// Runs in-process; returns (exit code, stdout, stderr).
fn ultracon(args: &[&str]) -> (i32, String, String) {
    let config = RunConfig::try_parse_from(std::iter::once("ultracon").chain(args.iter().copied()))
        .expect("arguments parse");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&config, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn data_files_match_corpus() {
    for name in ["C3", "C4", "S2", "Z2", "Z3", "G3", "U3", "L3", "S3", "Z2g"] {
        let text = std::fs::read_to_string(data(&format!("{}.json", name.to_lowercase()))).unwrap();
        assert_eq!(
            algebra_from_json(&text).unwrap(),
            corpus::by_name(name).unwrap()
        );
    }
}

#[test]
fn con_lists_lattice_in_canonical_order() {
    let (code, out, _) = ultracon(&["con", &data("c3.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "[[0],[1],[2]]\n[[0,1],[2]]\n[[0],[1,2]]\n[[0,1,2]]\n");

    let (_, out, _) = ultracon(&["con", &data("s2.json"), "--format", "json"]);
    assert_eq!(out.trim(), "[[[0],[1]],[[0,1]]]");

    let (_, out, _) = ultracon(&["con", &data("c3.json"), "--format", "dot"]);
    assert!(out.starts_with("digraph \"Con(C3)\""));
    assert_eq!(out.matches("arrowhead=none").count(), 4);
}

#[test]
fn ultrafilters_lists_principal_ones() {
    let (code, out, _) = ultracon(&["ultrafilters", "3"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "principal:1 [[1],[0,1],[1,2],[0,1,2]]");
    let (code, _, err) = ultracon(&["ultrafilters", "5"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error"));
}

#[test]
fn product_quotient_and_ultraproduct() {
    let dir = tempfile::tempdir().unwrap();
    let prod = dir.path().join("prod.json");
    let (code, _, _) = ultracon(&[
        "product",
        &data("c3.json"),
        &data("s2.json"),
        "--out",
        prod.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let p = algebra_from_json(&std::fs::read_to_string(&prod).unwrap()).unwrap();
    assert_eq!(p.size(), 6);
    assert_eq!(p.apply("mul", &[5, 3]).unwrap(), 3);

    let (code, out, _) = ultracon(&["quotient", &data("c3.json"), "--partition", "[[0,1],[2]]"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(algebra_from_json(&out).unwrap().size(), 2);
    let (code, _, err) = ultracon(&["quotient", &data("c3.json"), "--partition", "[[0,2],[1]]"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("not a congruence"), "{err}");

    let (code, out, _) = ultracon(&[
        "ultraproduct",
        "--factors",
        &data("c3.json"),
        &data("s2.json"),
        &data("c3.json"),
        "--ultrafilter",
        "principal:2",
    ]);
    assert_eq!(code, EXIT_OK);
    let file = parse_algebra_file(&out).unwrap();
    let up = file.to_algebra().unwrap();
    assert!(find_isomorphism(&up, &corpus::c3()).unwrap().found);
    let prov = file.provenance.unwrap();
    assert_eq!(prov["ultrafilter"], "principal:2");
    assert_eq!(prov["factors"].as_array().unwrap().len(), 3);
    assert_eq!(prov["representatives"].as_array().unwrap().len(), 3);
}

#[test]
fn ultrafilter_errors_name_the_axiom() {
    let (code, _, err) = ultracon(&[
        "ultraproduct",
        "--factors",
        &data("c3.json"),
        &data("c3.json"),
        &data("c3.json"),
        "--ultrafilter",
        "[[1],[0,1],[1,2]]",
    ]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("axiom (1)"), "{err}");
    let (_, _, err) = ultracon(&[
        "ultraproduct",
        "--factors",
        &data("c3.json"),
        &data("c3.json"),
        "--ultrafilter",
        "[[0],[1],[0,1]]",
    ]);
    assert!(err.contains("axiom (2)"), "{err}");
    let (code, _, err) = ultracon(&[
        "ultraproduct",
        "--factors",
        &data("c3.json"),
        "--ultrafilter",
        "principal:1",
    ]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn iso_exit_codes() {
    let (code, out, _) = ultracon(&["iso", &data("z2.json"), &data("z2.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "isomorphic: [0,1]");
    let (code, out, _) = ultracon(&["iso", &data("s2.json"), &data("z2.json")]);
    assert_eq!(code, EXIT_FAILED);
    assert_eq!(out.trim(), "not isomorphic");
    let (code, _, err) = ultracon(&["iso", &data("c3.json"), &data("l3.json")]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("signature"), "{err}");
}

#[test]
fn verify_thm3_example() {
    let (code, out, _) = ultracon(&[
        "verify",
        "thm3",
        "--algebra",
        &data("c3.json"),
        "--sigma",
        "[[0,1],[2]]",
        "--sigma",
        "[[0],[1,2]]",
        "--ultrafilter",
        "principal:1",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.starts_with("thm3 [C3, C3] over principal:1: PASS"));
}

#[test]
fn verify_reports_and_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, _, _) = ultracon(&[
        "verify",
        "thm1",
        "--factors",
        &data("c3.json"),
        &data("c3.json"),
        "--ultrafilter",
        "principal:0",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let report: VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.instance.families, 16);
    assert_eq!(report.info["phi_image_size"], 4);

    let (code, out, _) = ultracon(&[
        "verify",
        "thm2",
        "--factors",
        &data("c3.json"),
        &data("c3.json"),
        "--sigma",
        "[[0,1],[2]]",
        "--sigma",
        "[[0],[1,2]]",
        "--ultrafilter",
        "principal:0",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let report: VerificationReport = serde_json::from_str(&out).unwrap();
    assert_eq!(report.checks.len(), 7);

    let (code, _, _) = ultracon(&[
        "verify",
        "thm2",
        "--factors",
        &data("s2.json"),
        &data("z2.json"),
        &data("g3.json"),
        "--ultrafilter",
        "principal:2",
    ]);
    assert_eq!(code, EXIT_OK);
    let (code, _, _) = ultracon(&[
        "verify",
        "collapse",
        "--factors",
        &data("u3.json"),
        &data("u3.json"),
        "--ultrafilter",
        "principal:1",
    ]);
    assert_eq!(code, EXIT_OK);

    let (code, _, err) = ultracon(&[
        "verify",
        "thm2",
        "--factors",
        &data("c3.json"),
        &data("c3.json"),
        "--sigma",
        "[[0,1],[2]]",
        "--ultrafilter",
        "principal:0",
    ]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("one --sigma per factor"), "{err}");
    let (code, _, err) = ultracon(&[
        "verify",
        "thm3",
        "--algebra",
        &data("c3.json"),
        "--ultrafilter",
        "principal:0",
    ]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("--index-size"), "{err}");
    let (code, _, _) = ultracon(&[
        "verify",
        "thm1",
        "--factors",
        "missing.json",
        "--ultrafilter",
        "principal:0",
    ]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn sweep_over_files() {
    let (code, out, _) = ultracon(&[
        "sweep",
        "all",
        "--corpus",
        &data("s2.json"),
        &data("c3.json"),
        "--max-product",
        "9",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.ends_with("PASS")));
}

#[test]
fn help_documents_layout_and_partitions() {
    let out = Command::new(env!("CARGO_BIN_EXE_ultracon"))
        .arg("--help")
        .output()
        .unwrap();
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    assert!(help.contains("row-major"));
    assert!(help.contains("most significant argument first"));
    assert!(help.contains("a1*n^(k-1) + a2*n^(k-2) + ... + ak*n^0"));
    assert!(help
        .contains("Partition text form: sorted blocks of sorted elements, e.g. \"[[0,1],[2]]\""));

    let bad = Command::new(env!("CARGO_BIN_EXE_ultracon"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
}
