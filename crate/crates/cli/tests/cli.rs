use std::io::Write;
use std::process::{Command, Output, Stdio};

fn dyckham(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dyckham"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().expect("wait")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn oracle_accepts_member() {
    let out = dyckham(&["--mode", "oracle", "--n", "4", "--json"], "([])");
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "accept");
    assert_eq!(r["distance"], 0);
}

#[test]
fn dyck_fp_member_has_empty_support() {
    let out = dyckham(&["--mode", "dyck-fp", "--n", "8", "--k", "0", "--json"], "(([])[])\n");
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["support"], serde_json::json!([]));
    assert_eq!(r["err_count"], 0);
    for key in ["randomness_bits", "max_live_bytes", "items", "postprocess_steps"] {
        assert!(r["meter"][key].is_u64(), "{key}");
    }
}

#[test]
fn reject_exits_one_with_position() {
    let out = dyckham(&["--mode", "dyck-fp", "--n", "4", "--k", "1"], "())(");
    assert_eq!(out.status.code(), Some(1));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("position 3"), "{s}");
}

#[test]
fn ham_fp_replay_is_byte_identical() {
    let args = ["--mode", "ham-fp", "--n", "8", "--k", "2", "--seed", "42", "--json"];
    let input = "0110100110010111";
    let a = dyckham(&args, input);
    let b = dyckham(&args, input);
    assert_eq!(a.status.code(), b.status.code());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = dyckham(&["--mode", "ham-fp", "--n", "8", "--k", "2", "--seed", "43", "--json"], input);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn zero_trials_is_usage_error() {
    let out = dyckham(&["--bench", "--mode", "ham-fp", "--n", "64", "--trials", "0"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dyckham(&["--mode", "dyck-fp"], "()").status.code(), Some(2));
    assert_eq!(dyckham(&["--mode", "nope", "--n", "2"], "()").status.code(), Some(2));
    let out = dyckham(&["--mode", "dyck-fp", "--n", "4"], "(x)");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 2"));
    assert_eq!(dyckham(&["--mode", "dyck-fp", "--n", "6"], "()").status.code(), Some(2));
    assert_eq!(dyckham(&["--mode", "ham-fp", "--kind", "dyck", "--n", "2"], "()").status.code(), Some(2));
}

#[test]
fn file_input_infers_n() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.txt");
    std::fs::write(&p, "(([])\n[])\n").unwrap();
    let out = dyckham(&["--mode", "oracle", "--json", p.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["params"]["n"], 8);

    std::fs::write(&p, "0110").unwrap();
    let out = dyckham(&["--mode", "ham-fp", "--k", "1", "--json", p.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["params"]["n"], 2);
}

#[test]
fn one_turn_kind_through_ham_mode() {
    let out = dyckham(&["--mode", "ham-fp", "--kind", "one_turn", "--n", "3", "--k", "1"], "([()))");
    assert_eq!(out.status.code(), Some(0));
    let out = dyckham(&["--mode", "ham-fp", "--kind", "one_turn", "--n", "3", "--k", "1"], "([(]))");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn replay_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("inst.txt");
    std::fs::write(&p, "# comment\nham 4 1 1 01100111\ndyck 8 1 1 (([])(])\ndyck 8 1 3 (([)[)])\n").unwrap();
    let out = dyckham(&["--mode", "oracle", "--replay", p.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);

    let out = dyckham(&["--mode", "ham-fp", "--json", "--replay", p.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&p, "one_turn 6 1 2 ([(]))\none_turn 6 1 1 ([()))\n").unwrap();
    for mode in ["oracle", "ham-fp", "ham-lite"] {
        let out = dyckham(&["--mode", mode, "--replay", p.to_str().unwrap()], "");
        assert_eq!(out.status.code(), Some(0), "{mode}");
    }

    std::fs::write(&p, "dyck 8 1 2 (([])(])\n").unwrap();
    let out = dyckham(&["--mode", "oracle", "--replay", p.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn bench_csv() {
    let out = dyckham(&["--bench", "--mode", "dyck-fp", "--n", "64,128", "--k", "1,2", "--trials", "2"], "");
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 1 + 8);
    assert!(lines[0].starts_with("mode,n,k,trial"));
    assert!(lines[1..].iter().all(|l| l.starts_with("dyck-fp,")));
}
