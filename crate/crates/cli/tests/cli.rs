use std::process::{Command, Output};

fn tautcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tautcalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn wk_prints_lowest_terms() {
    let o = tautcalc(&["wk", "--g", "2", "--exps", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/1152");
    let o = tautcalc(&["wk", "--g", "0", "--exps", "0,0,0"]);
    assert_eq!(stdout(&o), "1");
}

#[test]
fn integrate_and_json() {
    let o = tautcalc(&["--json", "integrate", "--g", "2", "--markings", "w1,w2", "H(2,0,0)*psi[w1]^3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "1/384");
}

#[test]
fn pairings() {
    let o = tautcalc(&["pair", "--curve", "conj-pair", "--free", "2", "H(0,1,2)"]);
    assert_eq!(stdout(&o), "-2");
    let o = tautcalc(&["--json", "pair", "--curve", "b-curve", "--free", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "-1/8");
    assert_eq!(v["negative"], true);
}

#[test]
fn class_header_names_source() {
    let o = tautcalc(&["class", "--ell", "0", "--m", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# H_{2,0,2,0}"), "{}", stdout(&o));
    assert!(stdout(&o).contains("logan-2003"));
}

#[test]
fn exit_codes() {
    // parse error
    assert_eq!(tautcalc(&["integrate", "--g", "1", "--markings", "a", "psi[a"]).status.code(), Some(2));
    // degree below the dimension
    assert_eq!(tautcalc(&["integrate", "--g", "1", "--markings", "a,b", "psi[a]"]).status.code(), Some(3));
    // unstable space
    assert_eq!(tautcalc(&["integrate", "--g", "0", "--markings", "a", "1"]).status.code(), Some(3));
    // genus gate
    assert_eq!(tautcalc(&["wk", "--g", "3", "--exps", "6"]).status.code(), Some(5));
    // unknown verify group
    assert_eq!(tautcalc(&["verify", "--only", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_filter() {
    let o = tautcalc(&["verify", "--only", "omega"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).all(|l| l.contains("[omega]")));
    assert!(!out.contains("[logan]"));
}

#[test]
fn push_and_pull() {
    let o = tautcalc(&["push", "--g", "2", "--markings", "w,p", "--label", "p", "psi[p]"]);
    assert_eq!(stdout(&o), "3");
    let o = tautcalc(&["pull", "--g", "1", "--markings", "a", "--label", "b", "psi[a]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("psi"));
}

#[test]
fn dump_graph_emits_json_graphs() {
    let o = tautcalc(&["--dump-graph", "normalize", "--g", "1", "--markings", "a", "d_irr"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let (expr, graph) = out.split_once('\n').unwrap();
    assert_eq!(expr, "1*d_irr");
    let g: serde_json::Value = serde_json::from_str(graph).unwrap();
    assert_eq!(g["edges"].as_array().unwrap().len(), 1);
}
