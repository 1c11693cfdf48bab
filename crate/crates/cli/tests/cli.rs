use std::path::PathBuf;
use std::process::{Command, Output};

fn workspace(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("workspaces").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unibraid")).args(args).output().expect("binary runs")
}

fn run_ws(args: &[&str], ws: &str) -> (i32, String, String) {
    let path = workspace(ws);
    let mut all: Vec<&str> = args.to_vec();
    all.push(path.to_str().unwrap());
    let o = run(&all);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn machine(args: &[&str], ws: &str) -> (i32, serde_json::Value) {
    let mut all = vec!["--format", "machine"];
    all.extend_from_slice(args);
    let (code, out, err) = run_ws(&all, ws);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}")))
}

#[test]
fn validate_shipped_workspaces() {
    for ws in ["h3.ws", "abelian1.ws", "abelian2.ws", "h3w.ws", "f5.ws"] {
        let (code, out, err) = run_ws(&["validate"], ws);
        assert_eq!(code, 0, "{ws}: {out}{err}");
    }
    let (code, out, _) = run_ws(&["validate"], "sl2.ws");
    assert_eq!(code, 1);
    assert!(out.contains("not nilpotent"), "{out}");
    let (code, out, _) = run_ws(&["validate"], "h3_cobracket.ws");
    assert_eq!(code, 1);
    assert!(out.contains("[FAIL] co-leibniz"), "{out}");
}

#[test]
fn coherence_on_h3() {
    let (code, doc) = machine(&["coherence", "--modules", "V2,V3", "--tensor", "t"], "h3.ws");
    assert_eq!(code, 0);
    let checks = doc["checks"].as_array().unwrap();
    for name in ["pentagon", "hexagon1", "hexagon2"] {
        let row = checks.iter().find(|c| c["check"] == name).unwrap();
        assert_eq!(row["pass"], true);
        assert!(row["witness"].is_null());
        assert_eq!(row["cutoff-degree"], 2);
    }
    assert_eq!(doc["tool"], "unibraid");
    assert!(doc["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn cybe_witness() {
    let (code, doc) = machine(&["cybe", "--rmatrix", "r_xy"], "h3.ws");
    assert_eq!(code, 1);
    let row = &doc["checks"][0];
    assert_eq!(row["pass"], false);
    assert_eq!(row["witness"], "-1 : x z y");
    let (code, _, _) = run_ws(&["cybe", "--rmatrix", "r_zz,r_xz"], "h3.ws");
    assert_eq!(code, 0);
}

#[test]
fn cybe_search_over_a_family() {
    let (code, out, _) = run_ws(&["cybe", "--ansatz", "r_xz,r_xy", "--height", "1"], "h3.ws");
    assert_eq!(code, 0, "{out}");
    // Only multiples of x ^ z survive: the x (x) y part always leaves -x z y.
    assert!(out.contains("2 solutions"), "{out}");
    assert!(out.contains("1 r_xz = x*z - z*x\n"), "{out}");
}

#[test]
fn degree_too_small_is_an_input_error() {
    let (code, _, err) = run_ws(&["coherence", "--degree", "1"], "h3.ws");
    assert_eq!(code, 2);
    assert!(err.contains("at least 2 is required"), "{err}");
    let (code, _, err) = run_ws(&["twist", "--degree", "2"], "h3w.ws");
    assert_eq!(code, 2);
    assert!(err.contains("at least 3 is required"), "{err}");
}

#[test]
fn input_errors_carry_locations() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.ws");
    std::fs::write(&p, "[algebra a]\nbasis = x y\n[module M]\nalgebra = b\ndim = 1\n").unwrap();
    let o = run(&["coherence", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.ws:4: unknown algebra `b`"), "{err}");

    std::fs::write(&p, "[algebra a]\nbasis = x\n[algebra a]\nbasis = y\n").unwrap();
    let o = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("bad.ws:3: duplicate algebra name `a`"));

    let (code, _, err) = run_ws(&["coherence", "--modules", "V9"], "h3.ws");
    assert_eq!(code, 2);
    assert!(err.contains("unknown module `V9`"));
    let (code, _, _) = run_ws(&["correspondence", "--rmatrix", "r_xy"], "h3.ws");
    assert_eq!(code, 2);
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rescale_and_recover_t() {
    let (code, out, _) = run_ws(&["rescale", "--lambda", "0"], "h3.ws");
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[PASS] symmetric 25 pairs"));
    let (code, out, _) = run_ws(&["rescale", "--lambda", "-3/2"], "f5.ws");
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run_ws(&["recover-t"], "f5.ws");
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[PASS] infinitesimal-hexagon"));
}

#[test]
fn twist_chain_on_h3w() {
    for cmd in ["twist", "qybe", "recover-r", "correspondence"] {
        let (code, out, err) = run_ws(&[cmd], "h3w.ws");
        assert_eq!(code, 0, "{cmd}: {out}{err}");
    }
    let (_, out, _) = run_ws(&["qybe"], "h3w.ws");
    assert!(out.contains("== R ==\n[0] 1 : 1 | 1\n[1] 1 : x | w\n[1] -1 : w | x\n"), "{out}");
}

#[test]
fn hopf_commands() {
    let o = run(&["coradical", "--example", "two-group-like"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout).unwrap().contains("[FAIL] coconnected Q[C2]: C_0 has dimension 2"));
    let o = run(&["coradical", "--example", "polynomial"]);
    assert_eq!(o.status.code(), Some(0));
    let (code, out, _) = run_ws(&["coradical", "--rmatrix", "r_xz"], "h3.ws");
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run_ws(&["enveloping"], "h3.ws");
    assert_eq!(code, 0, "{out}");
    let (code, doc) = machine(&["twist-ohg"], "h3w.ws");
    assert_eq!(code, 0);
    let row = |name: &str| doc["checks"].as_array().unwrap().iter().find(|c| c["check"] == name).unwrap().clone();
    assert_eq!(row("product-changed")["witness"], "yes");
    assert_eq!(row("degree-two-commutator")["witness"], "[w] [z] - [z] [w] = 1*[y]");
    let (_, doc) = machine(&["twist-ohg", "--rmatrix", "r_xz"], "h3.ws");
    assert_eq!(doc["checks"].as_array().unwrap().iter().find(|c| c["check"] == "product-changed").unwrap()["witness"], "no");
}

#[test]
fn associator_out_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    for n in 1..=3 {
        let p = dir.path().join(format!("phi{n}.txt"));
        let o = run(&["associator", "--degree", &n.to_string(), "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../core/golden/associator_{n}.txt"));
        assert_eq!(std::fs::read_to_string(p).unwrap(), std::fs::read_to_string(golden).unwrap());
    }
}

#[test]
fn machine_reports_are_deterministic() {
    let cases: &[(&[&str], &str)] = &[
        (&["coherence"], "h3.ws"),
        (&["coherence"], "f5.ws"),
        (&["qybe"], "h3w.ws"),
        (&["twist-ohg"], "h3w.ws"),
        (&["cybe"], "h3.ws"),
        (&["validate"], "h3.ws"),
    ];
    for (args, ws) in cases {
        let path = workspace(ws);
        let mut all = vec!["--format", "machine"];
        all.extend_from_slice(args);
        all.push(path.to_str().unwrap());
        let outputs: Vec<Vec<u8>> = ["1", "4", "1", "8"]
            .iter()
            .map(|threads| {
                Command::new(env!("CARGO_BIN_EXE_unibraid")).args(&all).env("RAYON_NUM_THREADS", threads).output().unwrap().stdout
            })
            .collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?} on {ws}");
    }
}
