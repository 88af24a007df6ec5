use std::path::Path;
use std::process::{Command, Output};

use cyclotome_cli::builtins::{builtin_catalog, group_structure, resolve};
use cyclotome_cli::{run, Format, JobSpec};
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclotome"))
        .args(args)
        .env_remove("CYCLOTOME_CACHE")
        .output()
        .expect("binary runs")
}

fn json_report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn hh_of_twisted_kz2() {
    let out = cli(&["hh", "--algebra", "builtin:kZ2", "--p", "2", "--nmax", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_report(&out);
    assert_eq!(v["report"]["dims"], serde_json::json!([2, 2, 2, 2]));
    assert_eq!(v["window"]["nmax"], 4);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["algebra"]["hash"].as_str().unwrap().len(), 64);
}

#[test]
fn hp_of_dual_numbers_is_not_stabilized() {
    let out = cli(&["hp", "--algebra", "builtin:dual2", "--bound", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("not an isomorphism") && err.contains("HC_4"), "{err}");
}

#[test]
fn hp_of_matrix_algebra() {
    let out = cli(&["hp", "--algebra", "builtin:mat2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json_report(&out)["report"]["dims"], serde_json::json!([1, 0]));
}

#[test]
fn cartier_verify_on_kz3() {
    let out = cli(&["cartier", "verify", "--algebra", "builtin:kZ3", "--p", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_report(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["report"]["hp_source"], serde_json::json!([3, 0]));
    assert!(v["report"]["entries"].as_array().unwrap().iter().all(|e| e["iso"] == true));
}

#[test]
fn qf_on_matrix_algebra_is_unsupported() {
    let out = cli(&["qf", "--algebra", "builtin:mat2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unsupported algebra"));
}

#[test]
fn qf_wrong_characteristic_fails_validation() {
    let out = cli(&["qf", "--algebra", "builtin:kZ3/F_3", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("validation failed"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["hc"]).status.code(), Some(1));
    assert_eq!(cli(&["hc", "--algebra", "builtin:nope"]).status.code(), Some(1));
    assert_eq!(cli(&["hc", "--algebra", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["lambda", "p=2 [2]->[1]"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn catalog_is_sorted_and_valid() {
    let cat = builtin_catalog();
    let names: Vec<&str> = cat.iter().map(|b| b.name).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for want in ["kZ2", "kZ3", "kS3", "dual2", "dual3", "mat2", "mat3", "poly"] {
        assert!(names.contains(&want), "{want}");
    }
    assert!(cat.iter().any(|b| b.name == "kZ2" && b.field == 2));
    assert_eq!(cat, builtin_catalog());
    for b in &cat {
        let (a, _) = resolve(b.name).unwrap();
        assert!(cyclotome::algebra::check_algebra(&a).is_empty(), "{}", b.name);
    }
    let out = cli(&["check-algebra"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn field_suffix_and_group_detection() {
    let (a, g) = resolve("kZ3/F_3").unwrap();
    assert_eq!(a.field().p(), 3);
    assert_eq!(group_structure(&a), g);
    let (m, _) = resolve("mat2").unwrap();
    assert!(group_structure(&m).is_none());
    assert!(resolve("kZ2/F_4").is_err());
}

#[test]
fn algebra_files_behave_like_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kz2.json");
    std::fs::write(&path, resolve("kZ2").unwrap().0.to_json()).unwrap();
    let p = path.to_str().unwrap();
    let from_file = cli(&["hc", "--algebra", p, "--nmax", "5", "--format", "json"]);
    let builtin = cli(&["hc", "--algebra", "builtin:kZ2", "--nmax", "5", "--format", "json"]);
    assert_eq!(json_report(&from_file)["report"], json_report(&builtin)["report"]);
    assert_eq!(cli(&["qf", "--algebra", p, "--p", "2"]).status.code(), Some(0));
    std::fs::write(&path, "{\"p\": 2").unwrap();
    assert_eq!(cli(&["hc", "--algebra", p]).status.code(), Some(1));
}

fn files_under(dir: &Path) -> usize {
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        n += if e.file_type().unwrap().is_dir() { files_under(&e.path()) } else { 1 };
    }
    n
}

#[test]
fn cache_hits_and_misses_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let args = ["hh", "--algebra", "builtin:dual2", "--p", "2", "--nmax", "3"];
    let plain = cli(&args);
    let mut with_cache = args.to_vec();
    with_cache.extend(["--cache-dir", c]);
    let miss = cli(&with_cache);
    let stored = files_under(&cache);
    assert!(stored > 0);
    let hit = cli(&with_cache);
    assert_eq!(files_under(&cache), stored);
    assert_eq!(plain.stdout, miss.stdout);
    assert_eq!(miss.stdout, hit.stdout);
    let via_env = Command::new(env!("CARGO_BIN_EXE_cyclotome")).args(args).env("CYCLOTOME_CACHE", c).output().unwrap();
    assert_eq!(via_env.stdout, plain.stdout);
}

#[test]
fn job_specs_are_reproducible() {
    let spec = JobSpec {
        command: "hc".into(),
        algebra: Some("builtin:kZ3".into()),
        p: Some(2),
        n_max: Some(3),
        format: Format::Json,
        ..JobSpec::default()
    };
    let text = serde_json::to_string(&spec).unwrap();
    let back: JobSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
    let (a, b) = (run(&spec), run(&back));
    assert_eq!(a.code, 0);
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, text).unwrap();
    let out = cli(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), a.report.unwrap());
    let dumped = cli(&["hc", "--algebra", "builtin:kZ3", "--p", "2", "--nmax", "3", "--format", "json", "--dump-spec"]);
    let dumped: JobSpec = serde_json::from_slice(&dumped.stdout).unwrap();
    assert_eq!(dumped, spec);
}

#[test]
fn stored_certificates_are_rechecked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let out = cli(&["cartier", "--nvars", "1", "--p", "5", "--weight-cap", "8", "--format", "json", "--output", p]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    assert_eq!(cli(&["verify", p]).status.code(), Some(0));
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["report"]["entries"][1]["rank"] = Value::from(7);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let tampered = cli(&["verify", p]);
    assert_eq!(tampered.status.code(), Some(2));
    assert!(stderr(&tampered).contains("differs"));
}

#[test]
fn identities_tate_lambda_and_derham() {
    let out = cli(&["identities", "--algebra", "builtin:kZ2", "--p", "2", "--nmax", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_report(&out)["report"].as_array().unwrap().iter().all(|c| c["holds"] == true));

    let out = cli(&["tate", "--algebra", "builtin:kZ3", "--p", "2", "--format", "json"]);
    assert_eq!(json_report(&out)["report"][0]["tate"], serde_json::json!([3, 3]));

    let out = cli(&["lambda", "hom", "1", "1", "--p", "2", "--format", "json"]);
    assert_eq!(json_report(&out)["report"]["count"], 2);
    let out = cli(&["lambda", "p=2 [1]->[1] : 1", "p=2 [1]->[1] : 1", "--format", "json"]);
    assert_eq!(json_report(&out)["report"]["morphism"], "p=2 [1]->[1] : 0");

    let out = cli(&["derham", "--nvars", "2", "--p", "0", "--weight-cap", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cli(&["degeneration", "--algebra", "builtin:mat2", "--nmax", "3", "--format", "json"]);
    assert_eq!(json_report(&out)["report"]["degenerate"], true);
}
