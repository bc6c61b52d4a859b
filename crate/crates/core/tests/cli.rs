use std::process::Command;

use serde_json::Value;

fn treelip(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_treelip"))
        .args(args)
        .env("TREELIP_THREADS", "2")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("JSON report")
}

#[test]
fn gen_tree_then_norm_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.tree");
    let (code, _, _) = treelip(&["gen-tree", "regular:q=2,depth=6", "--output", tree.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&tree).unwrap();
    assert!(text.starts_with("tree v127\n"));

    let func = dir.path().join("f.func");
    std::fs::write(&func, "func k=1\n0 1\n3 1\n").unwrap();
    let (code, out, err) = treelip(&["norm", "--tree", tree.to_str().unwrap(), "--func", func.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    // f = χ_o + χ_3 on the binary tree: |f(o)| = 1, D at vertex 1 is 1 (μ_1(1)=1),
    // at 3 it is 1·μ_1(2) = 2, at the two children of 3 it is μ_1(3) = 3
    assert_eq!(r["report"]["value"], 4.0);
    assert_eq!(r["report"]["per_depth_sup"][3], 3.0);
}

#[test]
fn norm_of_inline_constant() {
    let (code, out, _) = treelip(&["norm", "--k", "2", "--func", "dsl: expr = 1, root = 1", "--tree", "random:seed=1,max=3,depth=6"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["report"]["value"], 1.0);
}

#[test]
fn classify_zero_symbol() {
    let (code, out, _) = treelip(&["classify", "--k", "1", "--symbol", "expr = 0, root = 0"]);
    assert_eq!(code, 0);
    let a = &json(&out)["report"]["analysis"];
    assert_eq!(a["bounded_verdict"]["verdict"], "yes");
    assert_eq!(a["compact_verdict"]["verdict"], "yes");
    assert_eq!(a["bounded_below_verdict"]["verdict"], "no");
}

#[test]
fn classify_from_symbol_file_embeds_config() {
    let dir = tempfile::tempdir().unwrap();
    let sym = dir.path().join("s.sym");
    std::fs::write(&sym, "expr = 1/n\nroot = 1\n").unwrap();
    let args = ["classify", "--symbol-file", sym.to_str().unwrap(), "--k", "2", "--window", "6", "--tol", "0.01"];
    let (code, out, _) = treelip(&args);
    // unknown tail on a 256-deep ray: compactness is not decided
    assert_eq!(code, 2);
    let r = json(&out);
    assert_eq!(r["config"]["k"], 2);
    assert_eq!(r["config"]["window"], 6);
    assert_eq!(r["report"]["tree"], "regular:q=1,depth=256");
    let (_, again, _) = treelip(&args);
    assert_eq!(out, again);
}

#[test]
fn spectrum_and_essnorm() {
    let (code, out, _) = treelip(&["spectrum", "--symbol", "expr = 1, root = 2, patch 3 = -1"]);
    assert_eq!(code, 0);
    let s = &json(&out)["report"]["analysis"];
    assert_eq!(s["spectrum"]["sigma"].as_array().unwrap().len(), 3);
    assert_eq!(json(&out)["report"]["tree"], "regular:q=2,depth=12");

    let (code, out, _) = treelip(&["essnorm", "--symbol", "expr = 1/2 + 1/n, root = 1, tail = monotone-decreasing-modulus to 0.5", "--tree", "regular:q=1,depth=2000"]);
    assert_eq!(code, 0);
    let b = &json(&out)["report"]["analysis"]["bounds"];
    assert!((b["a_n"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert!(b["history"].as_array().unwrap().len() == 2000);
}

#[test]
fn errors_exit_one() {
    let (code, _, err) = treelip(&["classify", "--symbol", "expr = n +"]);
    assert_eq!(code, 1);
    assert!(err.contains("1:10: expected factor, found 'end of input'"), "{err}");
    let (code, _, err) = treelip(&["spectrum", "--symbol", "expr = ell(1,n)"]);
    assert_eq!(code, 1);
    assert!(err.contains("unbounded"), "{err}");
    let (code, _, _) = treelip(&["norm", "--func", "/nonexistent/file"]);
    assert_eq!(code, 1);
    let (code, _, _) = treelip(&["classify", "--symbol", "expr = 1", "--window", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn verify_commands() {
    let (code, out, _) = treelip(&["verify-weights", "--k", "3", "--max-n", "20000"]);
    assert_eq!(code, 0);
    let checks = json(&out)["report"]["checks"].as_array().unwrap().clone();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks.iter().all(|c| c.get("worst_violation").is_some() && c.get("range").is_some()));

    let (code, out, _) = treelip(&["verify-space", "--k", "2", "--seed", "9", "--pretty"]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
    assert!(out.contains("growth-bound"));
}
