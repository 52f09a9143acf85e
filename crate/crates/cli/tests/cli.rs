use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ordspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordspec"))
        .args(args)
        .env_remove("ORDSPEC_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn derive_two_by_two_prints_means() {
    let dir = tempfile::tempdir().unwrap();
    let out = ordspec(&[
        "derive",
        "--m",
        "2",
        "--n",
        "2",
        "--output",
        path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("k=1 normalization=1 mean=0.125"));
    assert!(text.contains("k=2 normalization=1 mean=0.875"));
    for k in 1..=2 {
        assert!(dir.path().join(format!("density_m2_n2_k{k}.json")).exists());
        let csv = fs::read_to_string(dir.path().join(format!("density_m2_n2_k{k}.csv"))).unwrap();
        assert!(csv.starts_with("x,p\n"));
    }
}

#[test]
fn derive_middle_eigenvalue_json_has_both_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = ordspec(&[
        "derive",
        "--m",
        "3",
        "--k",
        "2",
        "--output",
        path(dir.path()),
    ]);
    assert!(out.status.success());
    let json = fs::read_to_string(dir.path().join("density_m3_n3_k2.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let steps: Vec<u64> = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["step_index"].as_u64().unwrap())
        .collect();
    assert_eq!(steps, vec![3, 2]);
    // constant term of 48(1-2x)^3(...) is 48
    assert_eq!(v["terms"][1]["coefficients"][0]["num"], "48");
    assert_eq!(v["terms"][1]["coefficients"][0]["den"], "1");
}

#[test]
fn derive_rectangular_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = ordspec(&[
        "derive",
        "--m",
        "4",
        "--n",
        "5",
        "--output",
        path(dir.path()),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("k=1 normalization=1 mean=0.030517578125"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 8);
}

#[test]
fn invalid_arguments_exit_nonzero() {
    for args in [
        &["derive", "--m", "9", "--n", "9"][..],
        &["derive", "--m", "3", "--n", "2"],
        &["derive", "--m", "1"],
        &["descriptors", "--m", "3", "--k", "4"],
        &["moments", "--m", "2", "--k", "0"],
    ] {
        let out = ordspec(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(stderr(&out).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn descriptors_match_table_values() {
    let out = ordspec(&["descriptors", "--m", "3", "--k", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("2,variance,6499,933120,"));
    assert!(text.contains("2,skewness,241916407220,33214290609379,"));
}

#[test]
fn moments_json_includes_trace_identity() {
    let out = ordspec(&["moments", "--m", "3", "--qmax", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["moments"].as_array().unwrap().len(), 6);
    assert_eq!(v["trace_identity"][1]["expected"]["num"], "3");
    assert_eq!(v["trace_identity"][1]["expected"]["den"], "5");
}

#[test]
fn fixtures_check_passes_and_negative_control_names_fixture() {
    let out = ordspec(&["fixtures-check"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.json");
    assert!(ordspec(&["fixtures-check", "--dump", path(&corpus)])
        .status
        .success());
    let text = fs::read_to_string(&corpus).unwrap();
    let perturbed = text.replacen("\"6499/933120\"", "\"6498/933120\"", 1);
    assert_ne!(perturbed, text);
    fs::write(&corpus, perturbed).unwrap();
    let out = ordspec(&["fixtures-check", "--corpus", path(&corpus)]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("table1.k2.kappa2"), "{err}");
    assert_eq!(err.matches("FAIL ").count(), 1);
}

#[test]
fn fixtures_check_reports_first_differing_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.json");
    ordspec(&["fixtures-check", "--dump", path(&corpus)]);
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&corpus).unwrap()).unwrap();
    let fixture = v["fixtures"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|f| f["id"] == "m4n4.A3")
        .unwrap();
    fixture["poly"]["inner"][2] = serde_json::json!(1309);
    fs::write(&corpus, serde_json::to_string(&v).unwrap()).unwrap();
    let out = ordspec(&["fixtures-check", "--corpus", path(&corpus)]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(
        err.contains("FAIL m4n4.A3: A_3: coefficient of x^2"),
        "{err}"
    );
}

#[test]
fn compare_passes_at_paper_sample_count() {
    let out = ordspec(&[
        "compare",
        "--m",
        "2",
        "--n",
        "2",
        "--samples",
        "100100",
        "--seed",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn compare_three_by_three_echoes_means() {
    let out = ordspec(&["compare", "--m", "3", "--samples", "100100"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let means: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["q"] == 1)
        .map(|r| r["exact"].as_str().unwrap())
        .collect();
    assert_eq!(means[0], "0.037037037037037037");
    assert!(means[1].starts_with("0.2384259259"));
    assert!(means[2].starts_with("0.7245370370"));
}

#[test]
fn undersampled_compare_fails_with_worst_entry() {
    let out = ordspec(&["compare", "--m", "2", "--n", "2", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("fail: worst |difference|"));
}

#[test]
fn montecarlo_exports_are_deterministic_across_threads() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &Path, threads: &str| {
        let out = ordspec(&[
            "montecarlo",
            "--m",
            "3",
            "--n",
            "4",
            "--samples",
            "5000",
            "--seed",
            "4",
            "--bins",
            "20",
            "--threads",
            threads,
            "--output",
            path(dir),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    };
    args(a.path(), "1");
    args(b.path(), "4");
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?}"
        );
    }
    let hist = fs::read_to_string(a.path().join("histogram_m3_n4_k2.csv")).unwrap();
    assert!(hist.starts_with("k,bin_left,bin_right,density\n"));
    assert_eq!(hist.lines().count(), 21);
}

#[test]
fn thread_env_var_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_ordspec"))
        .args(["moments", "--m", "2", "--threads", "2"])
        .env("ORDSPEC_THREADS", "lots")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ORDSPEC_THREADS"));
}

#[test]
fn density_export_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let out = ordspec(&[
        "export",
        "--m",
        "4",
        "--n",
        "5",
        "--k",
        "3",
        "--output",
        path(&first),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = ordspec(&["export", "--input", path(&first), "--output", path(&second)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());

    let csv = ordspec(&[
        "export",
        "--input",
        path(&first),
        "--format",
        "csv",
        "--resolution",
        "10",
    ]);
    assert!(stdout(&csv).starts_with("x,p\n"));
}

#[test]
fn ensemble_export_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = ordspec(&[
        "montecarlo",
        "--m",
        "2",
        "--samples",
        "1000",
        "--output",
        path(dir.path()),
    ]);
    assert!(out.status.success());
    let stats = dir.path().join("ensemble_m2_n2_seed0.json");
    let again = dir.path().join("again.json");
    let out = ordspec(&["export", "--input", path(&stats), "--output", path(&again)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(&stats).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn export_rejects_unknown_json() {
    let dir = tempfile::tempdir().unwrap();
    let bogus = dir.path().join("bogus.json");
    fs::write(&bogus, "{\"hello\": 1}").unwrap();
    let out = ordspec(&["export", "--input", path(&bogus)]);
    assert_eq!(out.status.code(), Some(2));
}
