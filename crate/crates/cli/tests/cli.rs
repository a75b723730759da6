use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn endspace(args: &[&str], cwd: &Path, cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_endspace"));
    cmd.args(args)
        .current_dir(cwd)
        .env_remove("ENDSPACE_LEVEL")
        .env_remove("ENDSPACE_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("ENDSPACE_CACHE_DIR", dir);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ray = endspace(&["verify", "ray"], dir.path(), None);
    assert_eq!(ray.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ray.stdout).unwrap();
    assert_eq!(report["passed"], true);

    let broom = endspace(&["verify", "broom"], dir.path(), None);
    assert_eq!(broom.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&broom.stdout).unwrap();
    let has_class = report["classes"].as_array().unwrap().iter().any(|c| {
        let m: Vec<&str> = c["members"]
            .as_array()
            .unwrap()
            .iter()
            .filter_map(|x| x.as_str())
            .collect();
        m.contains(&"v") && m.contains(&"ω0")
    });
    assert!(has_class);

    fs::write(
        dir.path().join("bad.igp"),
        "graph bad { layer n: v; edges: v[n]-w[n]; }",
    )
    .unwrap();
    let bad = endspace(&["verify", "file:bad.igp"], dir.path(), None);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown template `w`"));

    let small = endspace(&["verify", "ray", "--level", "2"], dir.path(), None);
    assert_eq!(small.status.code(), Some(2));
    let unknown = endspace(&["cuts", "nothing"], dir.path(), None);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn failing_tower_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Each of these star cuts puts two leaves on one disconnected side.
    let pairs = "E:c-l[n]@0&E:c-l[n]@2,E:c-l[n]@0&E:c-l[n]@5,E:c-l[n]@0&E:c-l[n]@9";
    let o = endspace(&["tree", "star", "--cuts", pairs], dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["consistency"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());

    let leaves = "E:c-l[n]@0,E:c-l[n]@2,E:c-l[n]@5";
    let o = endspace(&["tree", "star", "--cuts", leaves], dir.path(), None);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dot_exports() {
    let dir = tempfile::tempdir().unwrap();
    let q = endspace(
        &["quotient", "ray", "--cuts", "E:v[n]-v[n+1]@2", "--dot", "q.dot"],
        dir.path(),
        None,
    );
    assert_eq!(q.status.code(), Some(0));
    let dot = fs::read_to_string(dir.path().join("q.dot")).unwrap();
    assert_eq!(dot.matches("[label=\"").count(), 3);
    assert!(dot.contains("loops: 2") && dot.contains("loops: ω"));

    let e = endspace(&["export", "ray", "quotient", "--format", "dot"], dir.path(), None);
    assert_eq!(stdout(&e).matches("loops:").count(), 1);

    let rails = "E:a[n]-a[n+1]@1&E:b[n]-b[n+1]@1,E:a[n]-a[n+1]@4&E:b[n]-b[n+1]@4";
    let t = endspace(
        &[
            "tree",
            "ladder",
            "--cuts",
            rails,
            "--depth",
            "2",
            "--dot",
            "tower_j.dot",
        ],
        dir.path(),
        None,
    );
    assert_eq!(t.status.code(), Some(0));
    for j in 0..2 {
        assert!(dir.path().join(format!("tower_{j}.dot")).is_file());
    }
    assert!(!dir.path().join("tower_2.dot").exists());
}

#[test]
fn outputs_are_reproducible_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["cuts", "ladder"][..],
        &["ends", "double_ray"],
        &["classes", "broom"],
        &["verify", "star"],
    ] {
        let a = endspace(args, dir.path(), None);
        let b = endspace(args, dir.path(), None);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let text = stdout(&endspace(&["cuts", "ray", "--size", "1"], dir.path(), None));
    let budget = text.find("\"budget_warning\"").unwrap();
    let cuts = text.find("\"cuts\"").unwrap();
    assert!(budget < cuts);
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    for args in [
        &["verify", "ladder"][..],
        &["quotient", "ray", "--cuts", "0,3", "--format", "text"],
        &["ends", "broom"],
    ] {
        let plain = endspace(args, dir.path(), None);
        let cold = endspace(args, dir.path(), Some(&cache));
        let warm = endspace(args, dir.path(), Some(&cache));
        assert_eq!(plain.stdout, cold.stdout, "{args:?}");
        assert_eq!(plain.stdout, warm.stdout, "{args:?}");
        assert_eq!(plain.status.code(), warm.status.code());
    }
    let entries: Vec<_> = fs::read_dir(&cache).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries.len(), 3);
    assert!(entries.iter().all(|n| n.to_string_lossy().ends_with(".json")));
}

#[test]
fn level_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let flag = endspace(&["cuts", "ray", "--size", "1", "--level", "10"], dir.path(), None);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_endspace"));
    let env = cmd
        .args(["cuts", "ray", "--size", "1"])
        .env("ENDSPACE_LEVEL", "10")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    let v: serde_json::Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["cuts"].as_array().unwrap().len(), 6);
}

#[test]
fn parse_reports_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let o = endspace(&["parse", "broom", "--truncate", "1"], dir.path(), None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["truncation"]["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(v["truncation"]["edges"].as_array().unwrap().len(), 6);
    assert_eq!(v["truncation"]["frontier"], serde_json::json!(["b[1]", "t[1]", "v"]));
}
