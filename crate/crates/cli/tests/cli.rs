use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const DISK_STANDARD: &str = r#"{"geometry":{"kind":"disk","radius":1},"medium":{"kappa":-3,"k_plus":2,"k_minus":2}}"#;
const DISK_CRITICAL: &str = r#"{"geometry":{"kind":"disk","radius":1},"medium":{"kappa":-1,"k_plus":1,"k_minus":3}}"#;
const DISK_SUPERCRITICAL: &str = r#"{"geometry":{"kind":"disk","radius":1},"medium":{"kappa":-1,"k_plus":2,"k_minus":2}}"#;

fn run(dir: &TempDir, config: &str, args: &[&str]) -> Output {
    let path = dir.path().join("config.json");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_signflip"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .env("SIGNFLIP_THREADS", "2")
        .output()
        .unwrap()
}

fn out_arg(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn code(output: &Output) -> i32 {
    output.status.code().unwrap()
}

fn json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap()
}

#[test]
fn slopes_pass_for_the_three_disk_regimes() {
    let dir = TempDir::new().unwrap();
    for (config, predicted) in [
        (DISK_STANDARD, [[0, -1], [0, -1]]),
        (DISK_CRITICAL, [[2, 1], [2, 1]]),
        (DISK_SUPERCRITICAL, [[3, 2], [3, 2]]),
    ] {
        let out = run(&dir, config, &["slopes", "--out", &out_arg(&dir, "s"), "--emit", "json"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let summary = json(&out);
        assert_eq!(summary["pass"], true);
        assert_eq!(summary["predicted"], serde_json::json!(predicted));
    }
}

#[test]
fn slopes_csv_layout() {
    let dir = TempDir::new().unwrap();
    let out = run(&dir, DISK_STANDARD, &["slopes", "--out", &out_arg(&dir, "s"), "--modes", "20..40"]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("s/slopes.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "# signflip-modal v1");
    assert!(lines[1].starts_with("m,det_re,det_im,inv11_re,inv11_im,"));
    assert_eq!(lines.len(), 2 + 21);
    assert!(lines[2].starts_with("20,"));
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    assert!(dir.path().join("s/slopes.json").exists());
}

#[test]
fn mode_range_errors_are_configuration_errors() {
    let dir = TempDir::new().unwrap();
    let o = out_arg(&dir, "s");
    assert_eq!(code(&run(&dir, DISK_STANDARD, &["slopes", "--out", &o, "--modes", "9..3"])), 2);
    assert_eq!(code(&run(&dir, DISK_STANDARD, &["slopes", "--out", &o, "--modes", "1..5"])), 2);
    assert_eq!(code(&run(&dir, DISK_STANDARD, &["slopes", "--out", &o, "--modes", "ten"])), 2);
}

#[test]
fn malformed_and_unknown_configuration() {
    let dir = TempDir::new().unwrap();
    let o = out_arg(&dir, "s");
    assert_eq!(code(&run(&dir, "{\"geometry\":", &["classify", "--out", &o])), 2);
    let unknown = r#"{"geometry":{"kind":"torus","radius":1},"medium":{"kappa":-3,"k_plus":2,"k_minus":2}}"#;
    assert_eq!(code(&run(&dir, unknown, &["classify", "--out", &o])), 2);
    let no_command = run(&dir, DISK_STANDARD, &["--out", &o]);
    assert_eq!(code(&no_command), 2);
}

#[test]
fn missing_configuration_file_is_an_io_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_signflip"))
        .args(["classify", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = blocker.join("sub").display().to_string();
    assert_eq!(code(&run(&dir, DISK_STANDARD, &["slopes", "--out", &o])), 3);
}

#[test]
fn identical_configuration_gives_identical_csv() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"geometry":{"kind":"disk","radius":1},"medium":{"kappa":-3,"k_plus":2,"k_minus":2},
        "field":{"decay":0.5,"grid":{"x":[-2,2,9],"y":[-2,2,9]}}}"#;
    let read = |name: &str| std::fs::read(Path::new(&out_arg(&dir, name)).join("field.csv")).unwrap();
    for name in ["a", "b"] {
        assert_eq!(code(&run(&dir, config, &["field", "--out", &out_arg(&dir, name), "--modes", "0..30"])), 0);
    }
    assert_eq!(read("a"), read("b"));
    let out = run(&dir, DISK_STANDARD, &["slopes", "--out", &out_arg(&dir, "c")]);
    assert_eq!(code(&out), 0);
    let out = run(&dir, DISK_STANDARD, &["slopes", "--out", &out_arg(&dir, "d")]);
    assert_eq!(code(&out), 0);
    let slopes = |name: &str| std::fs::read(Path::new(&out_arg(&dir, name)).join("slopes.csv")).unwrap();
    assert_eq!(slopes("c"), slopes("d"));
}

#[test]
fn classify_reports_losses_and_the_classical_case() {
    let dir = TempDir::new().unwrap();
    let o = out_arg(&dir, "s");
    let critical = json(&run(&dir, DISK_CRITICAL, &["classify", "--out", &o, "--emit", "json"]));
    assert_eq!(critical["loss"]["order"], 2);
    let positive = r#"{"geometry":{"kind":"ball","radius":1},"medium":{"kappa":2,"k_plus":1,"k_minus":1}}"#;
    let out = run(&dir, positive, &["classify", "--out", &o, "--emit", "json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["statement"], "positive-positive: classical, p=0");
    assert!(report["notice"].is_string());
    let forced = json(&run(
        &dir,
        DISK_STANDARD,
        &["classify", "--out", &o, "--emit", "json", "--force-case", "super-critical"],
    ));
    assert_eq!(forced["loss"]["order"], 3);
    let waveguide = r#"{"geometry":{"kind":"halfline","basis":{"kind":"dirichlet","length":1}},
        "medium":{"kappa":-1,"k_plus":2,"k_minus":2}}"#;
    let report = json(&run(&dir, waveguide, &["classify", "--out", &o, "--emit", "json"]));
    assert_eq!(report["case"], "supercritical");
}

#[test]
fn media_may_be_given_as_materials() {
    let dir = TempDir::new().unwrap();
    let material = r#"{"geometry":{"kind":"disk","radius":1},
        "medium":{"epsilon_plus":4,"mu_plus":1,"epsilon_minus":-4,"mu_minus":-1,"omega":1}}"#;
    let report = json(&run(&dir, material, &["classify", "--out", &out_arg(&dir, "s"), "--emit", "json"]));
    assert_eq!(report["case"], "supercritical");
}

#[test]
fn kernel_scan_finds_the_engineered_plasmon() {
    let dir = TempDir::new().unwrap();
    // kappa = -2, k+ = 3, k- = 1 puts the plasmon root at lambda = 35/3.
    let config = r#"{"geometry":{"kind":"halfline","basis":{"kind":"user_list","eigenvalues":[2,11.666666666666666,40]}},
        "medium":{"kappa":-2,"k_plus":3,"k_minus":1}}"#;
    let out = run(&dir, config, &["kernel-scan", "--out", &out_arg(&dir, "k"), "--emit", "both"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["worst_residual"].as_f64().unwrap() < 1e-9);
    let csv = std::fs::read_to_string(dir.path().join("k/kernel_scan.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[1], "n,lambda,type,beta_plus_re,beta_plus_im,beta_minus_re,beta_minus_im,residual");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("1,") && lines[2].contains(",surface_plasmon,"));
}

#[test]
fn curvature_deviations_decrease() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"geometry":{"kind":"disk","radius":1},"medium":{"kappa":-3,"k_plus":2,"k_minus":2},
        "curvature":{"xi":3,"n_list":[10,20,40,80]}}"#;
    let out = run(&dir, config, &["curvature", "--out", &out_arg(&dir, "c"), "--emit", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["monotone"], true);
    let missing = run(&dir, DISK_STANDARD, &["curvature", "--out", &out_arg(&dir, "c")]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn slab_field_marks_points_beyond_the_wall() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"command":"field","geometry":{"kind":"slab","length":1,"basis":{"kind":"dirichlet","length":1}},
        "medium":{"kappa":-3,"k_plus":1,"k_minus":2},
        "field":{"data":[{"n":1,"f":[1,0]}],"grid":{"x":[-1,2,4],"y":[0.5,0.5,1]}}}"#;
    let out = run(&dir, config, &["--out", &out_arg(&dir, "f"), "--emit", "both"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["residual"]["jump"].as_f64().unwrap() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("f/field.csv")).unwrap();
    let rows: Vec<_> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].ends_with(",positive"));
    assert!(rows[1].ends_with(",negative"));
    assert!(rows[3].ends_with("NaN,NaN,outside"));
}

#[test]
fn special_table_is_consistent() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"geometry":{"kind":"disk","radius":1},"medium":{"kappa":-3,"k_plus":2,"k_minus":2},
        "special":{"function":"j","orders":[0,1.5,200],"radii":[0.5,10]}}"#;
    let out = run(&dir, config, &["special", "--out", &out_arg(&dir, "p")]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["max_wronskian_residual"].as_f64().unwrap() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("p/special.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 6);
    let bad = config.replace("\"j\"", "\"q\"");
    assert_eq!(code(&run(&dir, &bad, &["special", "--out", &out_arg(&dir, "p")])), 2);
}
