use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use walkforge_core::partition::{HFun, Instance, PrInstance};
use walkforge_core::{
    ColourTable, InstanceFile, PartitionParams, SearchBounds, TableCSequence, Theta, Variant, SCHEMA,
};

const SYSTEM: &str = include_str!("../../../data/system-n64.json");

fn walkforge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkforge"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn finite_walk_counts_down() {
    let dir = tempfile::tempdir().unwrap();
    let o = walkforge(&["walk", "--model", "finite:8", "5", "2"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("steps: 5,4,3,2\n"), "{}", stdout(&o));
}

#[test]
fn cnf_walk_through_the_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let o = walkforge(&["walk", "--model", "cnf:w^3", "w*2+1", "w", "--json"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rho"], serde_json::json!(["w*2+1", "w*2"]));
    assert_eq!(v["k"], 2);
}

#[test]
fn ordinal_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let o = walkforge(&["ord", "compare", "w^2", "w*5+7"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "greater\n");
    let o = walkforge(&["ord", "add", "3", "w"], dir.path());
    assert_eq!(stdout(&o), "w\n");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["walk", "5", "2"],
        &["walk", "--model", "finite:x", "5", "2"],
        &["walk", "--model", "finite:8", "2", "5"],
        &["verify", "coherence"],
        &["ord", "parse", "w+"],
    ] {
        let o = walkforge(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn corrupted_table_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = TableCSequence::new(vec![vec![], vec![0], vec![0], vec![1]]);
    fs::write(dir.path().join("bad.json"), bad.to_json()).unwrap();
    let o = walkforge(
        &[
            "verify",
            "walk-lemmas",
            "--model",
            "finite:4",
            "--csequences",
            "0",
            "--csequence",
            "bad.json",
            "--out",
            "report.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report["violation_count"].as_u64().unwrap() > 0);
    assert_eq!(report["violations"][0]["lemma"], "provider");
}

#[test]
fn walk_lemma_suite_passes_and_writes_default_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = walkforge(
        &[
            "verify",
            "walk-lemmas",
            "--model",
            "finite:24",
            "--csequences",
            "10",
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(dir.path().join("walkforge-walk-lemmas.json").exists());
}

#[test]
fn claim_e4_report_matches_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = walkforge(
        &[
            "verify",
            "claim-e4",
            "--k0",
            "3",
            "--k1",
            "3",
            "--max-len",
            "4",
            "--out",
            "e4.json",
        ],
        dir.path(),
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("e4.json")).unwrap()).unwrap();
    let clean = report["inconsistencies"] == 0 && report["structural_mismatches"] == 0;
    assert_eq!(o.status.code(), Some(if clean { 0 } else { 1 }));
    assert_eq!(report["schema"], SCHEMA);
}

#[test]
fn colour_table_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sys.json"), SYSTEM).unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_walkforge"))
            .args([
                "colour",
                "table",
                "--model",
                "finite:16",
                "--system",
                "sys.json",
                "--out",
                out,
            ])
            .env("WALKFORGE_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success());
        fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("1", "a.json");
    let b = run("4", "b.json");
    assert_eq!(a, b);
    let table = ColourTable::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(table.n(), 16);
    assert_eq!(table.rows().len(), 16);
    assert!(table.rows().iter().enumerate().all(|(i, r)| r.len() == 15 - i));
}

fn pr1_files(dir: &Path) {
    let c = ColourTable::constant(6, 0);
    fs::write(dir.join("colouring.json"), c.to_json()).unwrap();
    let params = PartitionParams {
        lambda: 6,
        mu: 6,
        sigma: 2,
        theta: Theta::Single(2),
        variant: Variant::Pr1,
        iota: None,
    };
    let file = InstanceFile {
        schema: SCHEMA.to_string(),
        params,
        instance: Instance::Pr(PrInstance {
            i0: 1,
            i1: 1,
            zeta0: vec![vec![0], vec![2], vec![4]],
            zeta1: vec![vec![1], vec![3], vec![5]],
            h: HFun::Constant(1),
            ultra: None,
        }),
    };
    fs::write(dir.join("instance.json"), serde_json::to_string(&file).unwrap()).unwrap();
    fs::write(dir.join("params.json"), serde_json::to_string(&params).unwrap()).unwrap();
    fs::write(
        dir.join("bounds.json"),
        serde_json::to_string(&SearchBounds::new(2, 1, 1)).unwrap(),
    )
    .unwrap();
}

#[test]
fn check_reports_missing_witness() {
    let dir = tempfile::tempdir().unwrap();
    pr1_files(dir.path());
    let o = walkforge(
        &["check", "--colouring", "colouring.json", "--instance", "instance.json"],
        dir.path(),
    );
    // A constant colouring never takes colour 1.
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "no witness\n");
}

#[test]
fn check_echoes_witness() {
    let dir = tempfile::tempdir().unwrap();
    pr1_files(dir.path());
    let text = fs::read_to_string(dir.path().join("instance.json")).unwrap();
    fs::write(
        dir.path().join("instance.json"),
        text.replace(r#""constant":1"#, r#""constant":0"#),
    )
    .unwrap();
    let o = walkforge(
        &[
            "check",
            "--colouring",
            "colouring.json",
            "--instance",
            "instance.json",
            "--json",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness"], serde_json::json!([0, 1]));
}

#[test]
fn random_search_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    pr1_files(dir.path());
    let run = |out: &str| {
        let o = walkforge(
            &[
                "search",
                "--colouring",
                "colouring.json",
                "--params",
                "params.json",
                "--bounds",
                "bounds.json",
                "--random",
                "--seed",
                "42",
                "--trials",
                "1000",
                "--out",
                out,
            ],
            dir.path(),
        );
        (o.status.code(), fs::read(dir.path().join(out)).unwrap())
    };
    let (code_a, a) = run("a.json");
    let (code_b, b) = run("b.json");
    assert_eq!(a, b);
    assert_eq!(code_a, code_b);
    // Colour 1 is never used, so h ≡ 1 has no witness.
    assert_eq!(code_a, Some(1));
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["strategy"], "random");
    assert!(report["counterexample"].is_object());
}

#[test]
fn random_search_needs_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    pr1_files(dir.path());
    let o = walkforge(
        &[
            "search",
            "--colouring",
            "colouring.json",
            "--params",
            "params.json",
            "--bounds",
            "bounds.json",
            "--random",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dfun_reports_conflicting_decompositions() {
    let dir = tempfile::tempdir().unwrap();
    let o = walkforge(&["dfun", "--f0", "0,0,1,0", "--f1", "1,0,0,0", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["d"]["status"], "conflict");
    assert_eq!(v["d"]["candidates"], serde_json::json!([0, 1]));
}

#[test]
fn labels_follow_the_system() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sys.json"), SYSTEM).unwrap();
    let o = walkforge(
        &["labels", "--model", "finite:64", "--system", "sys.json", "9", "5"],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o), "labels: 8,7,6,5\nf0: 2,1,0,2\nf1: 0,7,6,5\nf2: 8,7,6,5\n");
}
