//! End-to-end runs of the `dlseq` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;

static NEXT_FILE: AtomicUsize = AtomicUsize::new(0);

/// Writes `contents` to a fresh file under the target temp directory.
fn file(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    let n = NEXT_FILE.fetch_add(1, Ordering::Relaxed);
    let path = dir.join(format!("{}-{n}-{name}", std::process::id()));
    fs::write(&path, contents).unwrap();
    path
}

fn dlseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlseq")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rule names of a JSON proof in preorder.
fn json_rule_names(v: &Value, out: &mut Vec<String>) {
    out.push(v["rule"].as_str().unwrap_or("open").to_string());
    for c in v["children"].as_array().unwrap() {
        json_rule_names(c, out);
    }
}

#[test]
fn valid_sequent_exits_zero_with_a_proof() {
    let seq = file("trans.seq", "Trans(r), r(a,b), r(b,c) |- r(a,c)\n");
    let out = dlseq(&["prove", path(&seq)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("verdict: proved"));
    assert!(text.contains("proof:"));
    assert!(text.contains("Trans_l"));
}

#[test]
fn text_and_json_proofs_use_the_same_rules() {
    let seq = file("and.seq", "a:some r C, a:all r D |- a:some r (C and D)\n");
    let text = stdout(&dlseq(&["prove", path(&seq)]));
    let text_names: Vec<String> = text
        .lines()
        .skip_while(|l| *l != "proof:")
        .skip(1)
        .map(|l| l.trim_start().split(':').next().unwrap().to_string())
        .collect();
    let out = dlseq(&["prove", path(&seq), "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["verdict"], "proved");
    let mut json_names = Vec::new();
    json_rule_names(&v["proof"], &mut json_names);
    assert!(!json_names.is_empty());
    assert_eq!(text_names, json_names);
}

#[test]
fn invalid_sequent_exits_one_with_a_model() {
    let seq = file("open.seq", "a:some r C |- a:all r C\n");
    let out = dlseq(&["prove", path(&seq), "--format", "json", "--oracle", "2"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["verdict"], "countermodel");
    assert!(v.get("proof").is_none());
    let model = &v["model"];
    assert!(model["domain"].as_array().unwrap().len() >= 2);
    assert!(model["individuals"].get("a").is_some());
    assert_eq!(v["oracle"]["agrees"], true);
    assert!(v["oracle"]["model"].is_object());
    for key in ["steps", "branches", "max_branch_size"] {
        assert!(v["stats"][key].as_u64().is_some(), "{key}");
    }
}

#[test]
fn emit_selects_the_artifacts() {
    let valid = file("id.seq", "a:C |- a:C\n");
    let invalid = file("atom.seq", "|- a:C\n");
    let v = json(&dlseq(&["prove", path(&valid), "--format", "json", "--emit", "model"]));
    assert!(v.get("proof").is_none());
    let v = json(&dlseq(&["prove", path(&invalid), "--format", "json", "--emit", "proof"]));
    assert!(v.get("model").is_none());
    let v = json(&dlseq(&["prove", path(&invalid), "--format", "json", "--emit", "both"]));
    assert!(v.get("model").is_some());
}

#[test]
fn exhausted_budget_exits_two() {
    let seq = file("loop.seq", "C sub some r C, a:C |- a:D\n");
    let out = dlseq(&["prove", path(&seq), "--budget", "20"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("verdict: unknown"));
}

#[test]
fn input_errors_exit_three() {
    let bad = file("bad.seq", "a:(C or |- a:C\n");
    let out = dlseq(&["prove", path(&bad)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(code(&dlseq(&["prove", "/nonexistent/input.seq"])), 3);

    let profile = file("alc.profile", "# plain ALC\n");
    let nominal = file("nominal.seq", "|- a:{a}\n");
    assert_eq!(code(&dlseq(&["prove", path(&nominal), "--profile", path(&profile)])), 3);
    assert_eq!(code(&dlseq(&["prove", path(&nominal)])), 0);

    let undefined = file("sym.seq", "Sym(r), r(a,b) |- r(b,a)\n");
    assert_eq!(code(&dlseq(&["prove", path(&undefined)])), 3);
    assert_eq!(code(&dlseq(&["prove", path(&nominal), "--budget", "0"])), 3);
}

#[test]
fn user_definitions_extend_the_calculus() {
    let ddr = file("sym.ddr", "def Sym(r): forall x y . r(x,y) -> r(y,x)\n");
    let seq = file("sym.seq", "Sym(r), r(a,b) |- r(b,a)\n");
    let out = dlseq(&["prove", path(&seq), "--ddr", path(&ddr)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("Sym_l"));
    let broken = file("broken.ddr", "def Bad(r): forall x . r(x,x) -> r(x,y)\n");
    assert_eq!(code(&dlseq(&["prove", path(&seq), "--ddr", path(&broken)])), 3);
}

const FAMILY: &str = "\
# a small family knowledge base
tbox: Parent sub some hasChild top
tbox: some hasChild top sub Parent
tbox: Mother sub (Parent and Female)
abox: ann:Mother
abox: hasChild(bob,carl)
";

#[test]
fn knowledge_base_queries() {
    let kb = file("family.kb", FAMILY);
    let out = dlseq(&["consistent", path(&kb)]);
    assert_eq!(code(&out), 1, "a consistent KB has a model");
    assert!(stdout(&out).contains("verdict: consistent"));

    let out = dlseq(&["subsumes", path(&kb), "Mother", "some hasChild top"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: entailed"));

    let out = dlseq(&["subsumes", path(&kb), "Parent", "Mother", "--format", "json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["verdict"], "not entailed");

    let out = dlseq(&["instance", path(&kb), "bob", "Parent"]);
    assert_eq!(code(&out), 0);
    let out = dlseq(&["instance", path(&kb), "carl", "Parent"]);
    assert_eq!(code(&out), 1);

    assert_eq!(code(&dlseq(&["instance", path(&kb), "Bob", "Parent"])), 3);
    assert_eq!(code(&dlseq(&["subsumes", path(&kb), "Parent and", "Mother"])), 3);
}

#[test]
fn inconsistent_knowledge_base_exits_zero() {
    let kb = file("bad.kb", "tbox: A sub not A\nabox: a:A\n");
    let out = dlseq(&["consistent", path(&kb), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["task"], "consistency");
    assert_eq!(v["verdict"], "inconsistent");
    assert!(v["proof"].is_object());
    let kb = file("worse.kb", "abox: A sub B\n");
    assert_eq!(code(&dlseq(&["consistent", path(&kb)])), 3);
}
