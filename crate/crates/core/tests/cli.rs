use std::io::Write as _;
use std::process::Command;

use neumann_spectra::cli::reproduce::Experiment;
use neumann_spectra::cli::run;
use neumann_spectra::trial::InequalityReport;

fn nspec(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("nspec").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn shell_table() {
    let (code, out, _) = nspec(&["shell", "--alpha", "0", "--beta", "1", "--count", "4"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("k,"), "{header}");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].contains("3.389957717"), "{}", rows[1]);
    assert!(rows[2].contains("3.389957717"), "{}", rows[2]);
}

#[test]
fn shell_json_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let (code, out, _) =
        nspec(&["shell", "--alpha", "0.5", "--dim", "3", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nspec(&[]).0, 2);
    assert_eq!(nspec(&["frobnicate"]).0, 2);
    assert_eq!(nspec(&["reproduce", "nonsense"]).0, 2);
    let (code, _, err) = nspec(&["shell", "--alpha", "1", "--beta", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("error"), "{err}");
    assert_eq!(nspec(&["--help"]).0, 0);
}

#[test]
fn verify_errors_exit_two() {
    let (code, _, err) = nspec(&["verify", "/nonexistent/x.toml"]);
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent/x.toml"), "{err}");
    let bad = config("preset = \"disk\"\nmesh = 3\n");
    assert_eq!(nspec(&["verify", bad.path().to_str().unwrap()]).0, 2);
    let ok = config("preset = \"annulus\"\n");
    assert_eq!(nspec(&["verify", ok.path().to_str().unwrap(), "--expect-fail", "mu9"]).0, 2);
    let three = config("[domain]\ndim = 3\nouter = { kind = \"ball\", center = [0.0, 0.0, 0.0], radius = 1.0 }\n");
    assert_eq!(nspec(&["verify", three.path().to_str().unwrap()]).0, 2);
}

#[test]
fn verify_annulus_json_round_trip() {
    let f = config("preset = \"annulus\"\nname = \"ring\"\n");
    let (code, out, _) = nspec(&["verify", f.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let rep: InequalityReport = serde_json::from_str(&out).unwrap();
    assert_eq!(rep.domain, "ring");
    assert!(rep.pass);
    assert_eq!(rep.inequalities.len(), 4);
    // a satisfied inequality cannot be an expected failure
    assert_eq!(nspec(&["verify", f.path().to_str().unwrap(), "--expect-fail", "mu2"]).0, 1);
}

#[test]
fn verify_rectangle_csv_and_expected_failure() {
    let f = config("preset = \"rectangle-sqrt3\"\nh = 0.1\ntrial = false\n");
    let p = f.path().to_str().unwrap();
    let (code, out, _) = nspec(&["verify", p, "--format", "csv"]);
    assert_eq!(code, 0, "{out}");
    let mu3 = out.lines().find(|l| l.starts_with("mu3")).unwrap();
    assert!(mu3.ends_with("false,false,false"), "{mu3}");
    assert_eq!(nspec(&["verify", p, "--expect-fail", "mu3"]).0, 0);
}

#[test]
fn reproduce_disk_constants() {
    let (code, out, _) = nspec(&["reproduce", "disk-constants", "--format", "json"]);
    assert_eq!(code, 0);
    let e: Experiment = serde_json::from_str(&out).unwrap();
    assert!(e.pass && e.rows.len() == 5);
    let (code, csv, _) = nspec(&["reproduce", "convergence"]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("label,value,reference,tolerance,pass\n"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nspec");
    let ok = Command::new(bin).args(["shell", "--count", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).lines().count() == 3);
    let bad = Command::new(bin).args(["shell", "--dim", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let c = neumann_spectra::cli::config::RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        c.domain().unwrap();
        n += 1;
    }
    assert!(n >= 4);
}
