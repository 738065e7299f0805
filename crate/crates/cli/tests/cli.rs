use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn hdpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdpl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn every_built_in_example_replays() {
    for example in ["loop", "pos", "quant", "finite-orders"] {
        let o = hdpl(&["replay", "--example", example, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{example}: {}", stdout(&o));
        assert_eq!(json(&o)["ok"], true);
    }
}

#[test]
fn check_reads_formula_files_and_maps_verdicts_to_exit_codes() {
    let phi = format!("@{}", data("finite_orders.txt"));
    let o = hdpl(&["check", "--model", &data("chain3.json"), "--state", "s0", "--formula", &phi]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "true"));
    let o = hdpl(&["check", "--model", &data("cycle2.json"), "--state", "s0", "--formula", &phi]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "false"));
}

#[test]
fn game_reports_the_refutation() {
    let left = format!("{}:0", data("loop.json"));
    let right = format!("{}:0", data("unfolding4.json"));
    let tree = format!("@{}", data("loop.tree"));
    let o = hdpl(&["--json", "game", "--tree", &tree, "--left", &left, "--right", &right]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["eloise_wins"], false);
    assert_eq!(v["described"], serde_json::json!(["down", "<l> L:1 -> R:1", "<l> L:0 -> R:2"]));

    let o = hdpl(&["game", "--trace", "--tree", &tree, "--left", &left, "--right", &right]);
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["abelard wins", "down", "<l> L:1 -> R:1", "<l> L:0 -> R:2"]);
    let o = hdpl(&["game", "--tree", &tree, "--left", &left, "--right", &right]);
    assert_eq!(stdout(&o).trim(), "abelard wins");
}

#[test]
fn omega_and_bf_on_the_positive_pair() {
    let left = format!("{}:0", data("pos_left.json"));
    let right = format!("{}:0", data("pos_right.json"));
    let o = hdpl(&["omega", "--json", "--fragment", "diamond,store", "--left", &left, "--right", &right]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["eloise_wins"], true);
    let o = hdpl(&["omega", "--fragment", "full", "--left", &left, "--right", &right]);
    assert_eq!(o.status.code(), Some(1));

    let o = hdpl(&[
        "bf", "--json", "--fragment", "diamond,store", "--modelL", &data("pos_left.json"), "--modelR",
        &data("pos_right.json"), "--pair", "0", "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["verdict"], false);
    assert_eq!(v["related"], serde_json::json!([["1", "1"], ["2", "1"]]));
}

#[test]
fn hm_flags_the_divergence_as_predicted() {
    let left = format!("{}:0", data("pos_left.json"));
    let right = format!("{}:0", data("pos_right.json"));
    let o = hdpl(&["hm", "--json", "--fragment", "diamond,store", "--left", &left, "--right", &right]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["all_agree"], false);
    assert_eq!(v["as_predicted"], true);
    assert_eq!(v["report"]["bf_hypotheses"], false);
    let o = hdpl(&["hm", "--fragment", "full", "--left", &left, "--right", &right]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn isomorphism_commands_agree_on_a_renamed_copy() {
    let left = format!("{}:0", data("pos_left.json"));
    let renamed = format!("{}:w", data("pos_left_renamed.json"));
    let o = hdpl(&["iso", "--json", "--left", &left, "--right", &renamed]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["map"]["0"], "w");
    let o = hdpl(&["rootediso", "--left", &left, "--right", &renamed]);
    assert_eq!(o.status.code(), Some(0));
    let other = format!("{}:0", data("pos_right.json"));
    let o = hdpl(&["rootediso", "--json", "--left", &left, "--right", &other]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["report"]["isomorphic"], false);
}

#[test]
fn play_accepts_named_and_suggested_moves() {
    let left = format!("{}:0", data("loop.json"));
    let right = format!("{}:0", data("unfolding4.json"));
    let tree = format!("@{}", data("loop.tree"));
    let mut child = Command::new(env!("CARGO_BIN_EXE_hdpl"))
        .args(["play", "--json", "--tree", &tree, "--left", &left, "--right", &right])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"down\nfollow\n?\n?\n?\n?\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["winner"], "Abelard");
    assert_eq!(v["moves"][0]["choice"], "down");

    let auto = hdpl(&["play", "--auto", "--tree", &tree, "--left", &left, "--right", &right]);
    assert!(stdout(&auto).contains("winner: Abelard"));
}

#[test]
fn play_as_one_side_lets_the_solver_answer() {
    let left = format!("{}:0", data("loop.json"));
    let right = format!("{}:0", data("unfolding4.json"));
    let tree = format!("@{}", data("loop.tree"));
    let mut child = Command::new(env!("CARGO_BIN_EXE_hdpl"))
        .args(["play", "--json", "--as", "eloise", "--tree", &tree, "--left", &left, "--right", &right])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"follow\nR:1\nR:2\n").unwrap();
    let o = child.wait_with_output().unwrap();
    let v = json(&o);
    let players: Vec<&str> = v["moves"].as_array().unwrap().iter().map(|m| m["player"].as_str().unwrap()).collect();
    assert_eq!(players, ["Abelard", "Eloise", "Abelard", "Eloise", "Abelard", "Eloise"]);
    assert_eq!(v["winner"], "Abelard");
}

#[test]
fn trees_print_and_validate() {
    let model = data("pos_right.json");
    let o = hdpl(&["tree", "--complete", "--model", &model, "--fragment", "diamond", "--height", "1"]);
    assert_eq!(stdout(&o).trim(), "(branch (idle leaf) (dia l leaf))");
    let o = hdpl(&["tree", "--model", &model, "--fragment", "diamond", "--validate", "(down leaf)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn normal_form_membership_matches_truth() {
    let o = hdpl(&["normalform", "--json", "--formula", "<l>p & ~p", "--model", &data("pos_right.json"), "--state", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["member"], v["satisfied"]);
    let o = hdpl(&["normalform", "--formula", "<l>p", "--signature", &data("loop_signature.json")]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "(dia l leaf)"));
    let o = hdpl(&["charform", "--lower", "--tree", "(dia l leaf)", "--model", &data("pos_right.json"), "--state", "0"]);
    assert_eq!(stdout(&o).trim(), "~<l>~p & <l>p");
    let pointed = format!("{}:0", data("pos_right.json"));
    let o = hdpl(&["charform", "--tree", "(dia l leaf)", "--model", &pointed]);
    assert_eq!(stdout(&o).trim(), "(dia l {[+p]})");
}

#[test]
fn fuzz_suites_pass_on_a_small_budget() {
    let dir = std::env::temp_dir().join(format!("hdpl-fuzz-{}", std::process::id()));
    for suite in ["omega", "bf", "hm", "fh"] {
        let o = hdpl(&["fuzz", "--json", "--suite", suite, "--cases", "20", "--seed", "3", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
        assert_eq!(json(&o)["counterexamples"], serde_json::json!([]));
    }
    let o = hdpl(&["fuzz", "--suite", "bf", "--cases", "10", "--fragment", "diamond,at,store", "--out", dir.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "bf: 10 cases, 0 counterexamples"));
    let o = hdpl(&["fuzz", "--suite", "hm", "--cases", "1", "--fragment", "full"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    assert_eq!(hdpl(&["omega", "--fragment", "bogus", "--left", "a:0", "--right", "b:0"]).status.code(), Some(2));
    assert_eq!(hdpl(&["check", "--model", "missing.json", "--state", "s0", "--formula", "p"]).status.code(), Some(2));
    let o = hdpl(&["check", "--model", &data("chain3.json"), "--state", "s0", "--formula", "q"]);
    assert_eq!(o.status.code(), Some(2));
}
