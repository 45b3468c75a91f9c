use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dlfrontier"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Setup {
    _dir: TempDir,
    dir: PathBuf,
    o: PathBuf,
    q: PathBuf,
}

fn cycle_setup() -> Setup {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().to_path_buf();
    let o = write(&dir, "cycle.dlo", "A sub some r\nsome r sub A\nr rsub s\n");
    let q = write(&dir, "ab.cq", "eliq: A & B\n");
    Setup {
        _dir: tmp,
        dir,
        o,
        q,
    }
}

#[test]
fn frontier_of_a_and_b_has_two_members() {
    let e = cycle_setup();
    let out = run(&["frontier", "-o", s(&e.o), "-q", s(&e.q)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["member_count"], 2);
    assert_eq!(json["members"].as_array().unwrap().len(), 2);
    assert!(json["total_vars"].as_u64().unwrap() >= 6);
}

#[test]
fn frontier_json_is_stable() {
    let e = cycle_setup();
    let a = run(&["frontier", "-o", s(&e.o), "-q", s(&e.q)]);
    let b = run(&["frontier", "-o", s(&e.o), "-q", s(&e.q)]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_contains_on_empty_ontology() {
    let e = cycle_setup();
    let empty = write(&e.dir, "empty.dlo", "");
    let q = write(&e.dir, "q.cq", "q(x) :- A(x), r(x,y)\n");
    let out = run(&["check", "--contains", s(&q), s(&q), "-o", s(&empty)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "yes");
    let weaker = write(&e.dir, "w.cq", "q(x) :- A(x)\n");
    let out = run(&["check", "--contains", s(&weaker), s(&q), "-o", s(&empty)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "no");
}

#[test]
fn check_uses_the_ontology() {
    let e = cycle_setup();
    let a = write(&e.dir, "a.cq", "eliq: A\n");
    let r = write(&e.dir, "r.cq", "eliq: some s\n");
    let out = run(&["check", "--contains", s(&a), s(&r), "-o", s(&e.o)]);
    assert_eq!(stdout(&out).trim(), "yes");
    let out = run(&["check", "--entails", "some r", "A", "-o", s(&e.o)]);
    assert_eq!(stdout(&out).trim(), "yes");
    let out = run(&["check", "--dialect", "-o", s(&e.o)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn non_restricted_ontology_is_rejected() {
    let e = cycle_setup();
    let o = write(
        &e.dir,
        "unrestricted.dlo",
        "A sub some r\nsome r- sub some r\nsome r sub some s\nfunc r-\n",
    );
    let q = write(&e.dir, "a.cq", "eliq: A\n");
    let out = run(&["frontier", "-o", s(&o), "-q", s(&q)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("not_f_restricted"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn errors_exit_with_two() {
    let e = cycle_setup();
    let bad = write(&e.dir, "bad.dlo", "A sub sub\n");
    let out = run(&["frontier", "-o", s(&bad), "-q", s(&e.q)]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frontier", "-o", "/nonexistent.dlo", "-q", s(&e.q)]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frontier"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn version_and_help() {
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(env!("CARGO_PKG_VERSION")));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for cmd in [
        "normalize",
        "check",
        "answer",
        "frontier",
        "learn",
        "characterize",
        "verify",
    ] {
        assert!(stdout(&out).contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn normalize_lists_fresh_names() {
    let e = cycle_setup();
    let o = write(&e.dir, "n.dlo", "A sub some r . (B & C)\n");
    let out = run(&["normalize", "-o", s(&o)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("# ")), "{text}");
    assert!(
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .all(|l| !l.contains('&')),
        "{text}"
    );
}

#[test]
fn answer_and_model_dump() {
    let e = cycle_setup();
    let a = write(&e.dir, "d.abox", "A(a)\nB(b)\n");
    let q = write(&e.dir, "s.cq", "eliq: some s\n");
    let out = run(&["answer", "-o", s(&e.o), "-a", s(&a), "-q", s(&q)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "a");
    let out = run(&[
        "answer",
        "-o",
        s(&e.o),
        "-a",
        s(&a),
        "-q",
        s(&q),
        "--ind",
        "b",
    ]);
    assert_eq!(stdout(&out).trim(), "no");
    let out = run(&["answer", "-o", s(&e.o), "-a", s(&a), "--dump-model", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json.is_object());
}

#[test]
fn learn_writes_a_trace() {
    let e = cycle_setup();
    let t = write(&e.dir, "t.cq", "eliq: B & some s . B\n");
    let trace = e.dir.join("trace.json");
    let out = run(&[
        "learn",
        "--ontology",
        s(&e.o),
        "--target",
        s(&t),
        "--trace",
        s(&trace),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(json["outcome"], "success");
    assert!(json["membership_queries"].as_u64().unwrap() > 0);
    assert!(!json["hypotheses"].as_array().unwrap().is_empty());
    let out = run(&["learn", "-o", s(&e.o), "--target", s(&t), "--budget", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn characterize_then_verify() {
    let e = cycle_setup();
    let out_dir = e.dir.join("examples");
    let out = run(&[
        "characterize",
        "-o",
        s(&e.o),
        "-q",
        s(&e.q),
        "--out-dir",
        s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out_dir.join("positive_0.abox").exists());
    assert!(out_dir.join("negative_0.abox").exists());
    assert!(out_dir.join("negative_1.abox").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["examples"].as_array().unwrap().len(), 3);
    assert_eq!(manifest["examples"][0]["polarity"], "positive");
    let out = run(&["verify", "unique", "-o", s(&e.o), "-q", s(&e.q)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run(&[
        "verify",
        "frontier",
        "-o",
        s(&e.o),
        "-q",
        s(&e.q),
        "--bound",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).trim(), "ok");
}
