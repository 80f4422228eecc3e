//! End-to-end runs of the `vdtool` binary: outputs, determinism and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vdtool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdtool")).args(args).output().expect("spawn vdtool")
}

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("vdtool-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn p(d: &Path, f: &str) -> String {
    d.join(f).display().to_string()
}

#[test]
fn build_then_verify_dump_and_detect_corruption() {
    let d = workdir("verify");
    assert_eq!(vdtool(&["--seed", "4", "gen", "--kind", "boxes", "--n", "5", "--out", &p(&d, "s.json")]).status.code(), Some(0));
    let out = vdtool(&["--seed", "4", "build", "--scene", &p(&d, "s.json"), "--out", &p(&d, "vd.json"), "--trace", &p(&d, "t.csv")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(d.join("t.csv")).unwrap();
    assert!(trace.starts_with("round,k,size_Rk,prisms,sum_conflicts,max_conflict,millis\n"));

    let ok = vdtool(&["verify", "--scene", &p(&d, "s.json"), "--prisms", &p(&d, "vd.json"), "--report", &p(&d, "r.json")]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);

    let mut dump: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("vd.json")).unwrap()).unwrap();
    let first = dump["prisms"][0].clone();
    dump["prisms"].as_array_mut().unwrap().push(first);
    std::fs::write(d.join("bad.json"), dump.to_string()).unwrap();
    let bad = vdtool(&["verify", "--scene", &p(&d, "s.json"), "--prisms", &p(&d, "bad.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL Volumes/disjoint"));
    std::fs::remove_dir_all(&d).ok();
}

#[test]
fn builds_are_deterministic() {
    let d = workdir("det");
    vdtool(&["--seed", "9", "gen", "--kind", "polytopes", "--n", "4", "--out", &p(&d, "s.json")]);
    for f in ["a.json", "b.json"] {
        vdtool(&["--seed", "9", "build", "--scene", &p(&d, "s.json"), "--out", &p(&d, f)]);
    }
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());
    std::fs::remove_dir_all(&d).ok();
}

#[test]
fn enclosure_batch_queries() {
    let d = workdir("enclose");
    vdtool(&["--seed", "2", "gen", "--kind", "nested", "--n", "6", "--out", &p(&d, "s.json")]);
    assert_eq!(vdtool(&["enclose", "build", "--scene", &p(&d, "s.json"), "--index", &p(&d, "i.bin")]).status.code(), Some(0));
    std::fs::write(d.join("q.csv"), "x,y,z\n32,32,65/2\n1,1,1\n").unwrap();
    let out = vdtool(&["enclose", "query", "--index", &p(&d, "i.bin"), "--points", &p(&d, "q.csv")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        let count: usize = r[1].parse().unwrap();
        assert_eq!(r.len(), count + 4);
    }
    assert_eq!(rows[1][1], "0");
    std::fs::remove_dir_all(&d).ok();
}

#[test]
fn cutting_and_envelope_outputs() {
    let d = workdir("cut");
    vdtool(&["--seed", "1", "gen", "--n", "8", "--out", &p(&d, "s.json")]);
    let out = vdtool(&["cutting", "--scene", &p(&d, "s.json"), "--r", "2", "--out", &p(&d, "c.json"), "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cut: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
    assert!(cut["attempts"].as_u64().unwrap() >= 1);
    let env = vdtool(&["envelope", "--random", "linear", "--n", "5", "--stats", &p(&d, "m.csv")]);
    assert_eq!(env.status.code(), Some(0));
    assert!(std::fs::read_to_string(d.join("m.csv")).unwrap().starts_with("function,cell_volume,prisms\n"));
    std::fs::remove_dir_all(&d).ok();
}

#[test]
fn bench_writes_fixed_schema() {
    let out = vdtool(&["bench", "--sizes", "0,2", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,trial,prisms,visib,psi,build_ms,max_hdag_depth,cutting_size,cutting_max_conflict,error"));
    assert!(lines.next().unwrap().starts_with("0,0,1,0,26,"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(vdtool(&[]).status.code(), Some(2));
    assert_eq!(vdtool(&["build"]).status.code(), Some(2));
    assert_eq!(vdtool(&["bench", "--sizes", "8,4"]).status.code(), Some(2));
    assert_eq!(vdtool(&["gen", "--kind", "spheres", "--n", "3", "--out", "x.json"]).status.code(), Some(2));
    assert_eq!(vdtool(&["build", "--scene", "/nonexistent/scene.json"]).status.code(), Some(2));
    assert_eq!(vdtool(&["enclose", "query", "--index", "/nonexistent/i.bin", "--point", "1,2"]).status.code(), Some(2));
}
