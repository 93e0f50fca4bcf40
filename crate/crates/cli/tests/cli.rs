use std::io::Write;
use std::process::{Command, Output, Stdio};

fn lmu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmu")).args(args).env("LMU_COLOR", "0").output().unwrap()
}

fn lmu_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lmu"))
        .args(args)
        .env("LMU_COLOR", "0")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_line(o: &Output) -> String {
    stdout(o).lines().last().unwrap_or_default().to_string()
}

#[test]
fn reduce_identity() {
    let o = lmu(&["reduce", "-e", "(\\x.x)y", "--fuel", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "y");
    assert!(stdout(&o).contains("[beta at root]"));
}

#[test]
fn reduce_omega_runs_out_of_fuel() {
    let o = lmu(&["reduce", "-e", "(\\x.x x)(\\x.x x)", "--fuel", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 12);
}

#[test]
fn reduce_mu_application() {
    let o = lmu(&["reduce", "-e", "(mu b.[b]x)y"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "mu g.[g] x y");
}

#[test]
fn reduce_random_needs_seed() {
    assert_eq!(lmu(&["reduce", "-e", "x", "--strategy", "random"]).status.code(), Some(2));
    let o = lmu(&["reduce", "-e", "(\\x.x)((\\y.y)z)", "--strategy", "random", "--seed", "7"]);
    assert_eq!(last_line(&o), "z");
}

#[test]
fn reduce_json() {
    let o = lmu(&["reduce", "-e", "(\\x.x)y", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["final"], "y");
    assert_eq!(v["status"], "Normal");
    assert_eq!(v["steps"][0]["kind"], "beta");
}

#[test]
fn parse_errors_are_malformed() {
    let o = lmu(&["parse", "-e", "\\x."]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn parse_round_trip() {
    let o = lmu(&["parse", "-e", "mu a . [a] (\\x . x)   y"]);
    assert_eq!(last_line(&o), "mu a.[a] (\\x.x) y");
}

#[test]
fn subtype_examples() {
    let o = lmu(&["subtype", "-t", "('a)->'p & ('b)->'p", "-t", "('a)->'p"]);
    assert_eq!((o.status.code(), last_line(&o).as_str()), (Some(0), "true"));
    let o = lmu(&["subtype", "-t", "('a)->'p", "-t", "('a)->'p & ('b)->'p"]);
    assert_eq!((o.status.code(), last_line(&o).as_str()), (Some(1), "false"));
    let o = lmu(&["subtype", "--cont", "-t", "'a * 'b * O", "-t", "'a * O"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn join_examples() {
    let o = lmu(&["join", "-e", "bot", "-e", "x"]);
    assert_eq!((o.status.code(), last_line(&o).as_str()), (Some(0), "x"));
    let o = lmu(&["join", "-e", "x", "-e", "y"]);
    assert_eq!((o.status.code(), last_line(&o).as_str()), (Some(1), "undefined"));
}

#[test]
fn classify_omega_agrees() {
    let o = lmu(&["classify", "-e", "(\\x.x x)(\\x.x x)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agree"));
}

#[test]
fn classify_json() {
    let o = lmu(&["classify", "-e", "\\x.x", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sn_by_graph"], "Yes");
    assert_eq!(v["typeable_sn"]["answer"], "yes");
    assert_eq!(v["disagreement"], false);
}

#[test]
fn approx_lists_maximal() {
    let o = lmu(&["approx", "-e", "x ((\\y.y y)(\\y.y y))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "x bot");
}

#[test]
fn infer_then_check() {
    let o = lmu(&["infer", "-e", "\\x.x", "--system", "sn", "--tree", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d = v["derivations"][0].to_string();
    for sys in ["s", "sn"] {
        let c = lmu_stdin(&["check", "-", "--system", sys], &d);
        assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stdout));
        assert_eq!(last_line(&c), "ok");
    }
}

#[test]
fn check_rejects_omega_in_sn() {
    let d = r#"{"rule": "Inter", "ctx": {}, "term": "x", "type": "w", "nctx": {}, "premises": []}"#;
    let o = lmu_stdin(&["check", "-", "--system", "sn"], d);
    assert_eq!(o.status.code(), Some(1));
    assert!(last_line(&o).starts_with("at root"));
    assert_eq!(lmu_stdin(&["check", "-", "--system", "s"], d).status.code(), Some(0));
}

#[test]
fn check_malformed_input() {
    assert_eq!(lmu_stdin(&["check", "-"], "{not json").status.code(), Some(2));
    assert_eq!(lmu_stdin(&["check", "-"], r#"{"rule": "Nope"}"#).status.code(), Some(2));
}

#[test]
fn infer_omega_finds_nothing_in_sn() {
    let o = lmu(&["infer", "-e", "(\\x.x x)(\\x.x x)", "--system", "sn", "--depth", "4", "--width", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corpus_run_small_file() {
    let dir = std::env::temp_dir().join(format!("lmu-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("small.lmu");
    std::fs::write(&path, "\\x.x  # hnf=yes nf=yes sn=yes\n(\\x.x x)(\\x.x x)  # hnf=no nf=no sn=no\n").unwrap();
    let o = lmu(&["corpus", "run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(last_line(&o).starts_with("2 terms, 0 disagreements, 0 tag mismatches"));

    std::fs::write(&path, "\\x.x  # hnf=no nf=yes sn=yes\n").unwrap();
    assert_eq!(lmu(&["corpus", "run", path.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&path, "\\x.x  # nonsense\n").unwrap();
    assert_eq!(lmu(&["corpus", "run", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn corpus_list_bundled() {
    let o = lmu(&["corpus", "list"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() >= 30);
}
