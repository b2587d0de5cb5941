use std::path::Path;
use std::process::{Command, Output};

fn fragile(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fragile"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .env_remove("FRAGILE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_f7_prints_a_rank_three_binary_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = fragile(dir.path(), &["construct", "--name", "F7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "fragile-matroid v1");
    assert_eq!(lines[1], "ring gf2");
    assert_eq!(lines[2], "rank 3 cols 7");
    assert!(lines.last().unwrap().starts_with("sha256 "));
}

#[test]
fn construct_glue_prints_a_six_element_matroid() {
    let dir = tempfile::tempdir().unwrap();
    let o = fragile(dir.path(), &["construct", "--glue", "U25:(a,c,b):3", "--delete", "b,c"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(2).unwrap().ends_with("cols 6"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["construct", "--name", "nonsense"],
        vec!["construct", "--glue", "U25:(a,c):3"],
        vec!["construct", "--glue", "U25:(a,c,b):3", "--delete", "b"],
        vec!["verify", "--task", "M9_3"],
        vec!["catalog", "--class", "h5", "--max-size", "13"],
        vec!["catalog", "--class", "nope", "--max-size", "6"],
        vec!["verify"],
    ] {
        assert_eq!(fragile(dir.path(), &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn catalog_json_report_has_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = fragile(dir.path(), &["catalog", "--class", "h5", "--max-size", "6", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["counts"]["size-5"], 2);
    assert_eq!(v["counts"]["size-6"], 4);
    assert!(v["witnesses"].as_array().unwrap().is_empty());
    assert!(v["millis"].is_u64());
    assert!(v["task"].is_string());
    assert!(dir.path().join("v1/h5/manifest.json").exists());
}

#[test]
fn cache_flag_overrides_the_environment() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fragile"))
        .args(["catalog", "--class", "fano", "--max-size", "7", "--cache-dir"])
        .arg(flag.path())
        .env("FRAGILE_CACHE_DIR", env.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag.path().join("v1/fano/manifest.json").exists());
    assert!(!env.path().join("v1").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_fragile"))
        .args(["catalog", "--class", "fano", "--max-size", "7"])
        .env("FRAGILE_CACHE_DIR", env.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env.path().join("v1/fano/manifest.json").exists());
}

#[test]
fn jobs_flag_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = fragile(dir.path(), &["--jobs", "1", "--seed", "7", "catalog", "--class", "h5", "--max-size", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("size-5=2"));
}
