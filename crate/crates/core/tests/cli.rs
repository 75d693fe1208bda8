use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use treespace::newick::{format_number, read_trees};
use treespace::distance;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treespace")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TREES: &str = "\
(0:0.5,((1:1,2:1):1.2,3:0.3):0.7,(4:1,5:1):2);
(0:0.1,(1:1,(2:1,3:1):1.5):0.5,4:2,5:1);
# comment
(0:0,((1:1,3:1):0.4,2:1):1,(4:0.5,5:1):0.3);
";

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.nwk"), TREES).unwrap();
    dir
}

#[test]
fn distance_table_matches_library() {
    let dir = setup();
    let o = run(dir.path(), &["distance", "--trees", "t.nwk"]);
    assert!(o.status.success());
    let trees = read_trees(&dir.path().join("t.nwk"), None).unwrap();
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,d"));
    let mut n = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert_eq!(f[2], format_number(distance(&trees[i], &trees[j]).unwrap()));
        if i == j {
            assert_eq!(f[2], "0");
        }
        n += 1;
    }
    assert_eq!(n, 9);
    let o = run(dir.path(), &["distance", "--trees", "t.nwk", "--pair", "2,0", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
}

#[test]
fn mean_of_one_tree_is_itself() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("one.nwk"), "(0:0.5,((1:1,2:1):1.2,3:0.3):0.7,(4:1,5:1):2);\n").unwrap();
    let o = run(dir.path(), &["mean", "--trees", "one.nwk"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mean"], "(0:0.5,((1:1,2:1):1.2,3:0.3):0.7,(4:1,5:1):2);");
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["termination"], "converged");
}

#[test]
fn symmetric_triple_has_star_mean() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t3.nwk"), "(0:0,(1:0,2:0):1,3:0);\n(0:0,(1:0,3:0):1,2:0);\n(0:0,(2:0,3:0):1,1:0);\n").unwrap();
    let o = run(dir.path(), &["mean", "--trees", "t3.nwk"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mean"], "(0:0,1:0,2:0,3:0);");
    assert_eq!(v["stickiness"]["kind"], "sticky");
    let o = run(dir.path(), &["sticky", "--trees", "t3.nwk", "--format", "csv"]);
    assert_eq!(stdout(&o), "kind,m1,m2,m3\nsticky,-0.333333333333,-0.333333333333,-0.333333333333\n");
}

#[test]
fn sticky_fixtures_classify() {
    let dir = tempfile::tempdir().unwrap();
    let heavy = "1 1\n".repeat(8) + "2 1\n3 1\n";
    for (name, text, kind) in [("sym", "1 1\n2 1\n3 1\n".to_string(), "sticky"), ("heavy", heavy, "non_sticky"), ("edge", "1 1\n1 1\n2 1\n3 1\n".to_string(), "partly_sticky")] {
        std::fs::write(dir.path().join(name), text).unwrap();
        let o = run(dir.path(), &["sticky", "--sample", name]);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["kind"], kind);
        assert_eq!(v["perpendicular"]["kind"], kind);
    }
    let o = run(dir.path(), &["sticky", "--sample", "sym", "--mode", "experiment", "--max-n", "200", "--reps", "20"]);
    assert!(stdout(&o).ends_with("200,1\n"));
    std::fs::write(dir.path().join("bad"), "4 1\n").unwrap();
    assert_eq!(run(dir.path(), &["sticky", "--sample", "bad"]).status.code(), Some(1));
}

#[test]
fn smooth_and_repseq_outputs() {
    let dir = setup();
    std::fs::write(dir.path().join("x.txt"), "0\n1\n2\n").unwrap();
    let o = run(dir.path(), &["smooth", "--trees", "t.nwk", "--predictors", "x.txt", "--h", "0.5,100", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["fits"].as_array().unwrap().len(), 3);
    assert!(v[1]["repseq"].as_array().unwrap().len() <= v[0]["repseq"].as_array().unwrap().len());

    let o = run(dir.path(), &["repseq", "--trees", "t.nwk", "--format", "csv"]);
    assert!(stdout(&o).starts_with("block,first,last,splits\n1,1,"));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = setup();
    std::fs::write(dir.path().join("x.txt"), "0\n1\n").unwrap();
    let o = run(dir.path(), &["smooth", "--trees", "t.nwk", "--predictors", "x.txt", "--h", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x.txt"));
    std::fs::write(dir.path().join("bad.nwk"), "(0:1,1:1,2:1,3:1);\n(0:1,(1:1,2:1,3:1);\n").unwrap();
    let o = run(dir.path(), &["distance", "--trees", "bad.nwk"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(run(dir.path(), &["mean", "--trees", "missing.nwk"]).status.code(), Some(1));
    std::fs::write(dir.path().join("cfg.json"), r#"{"nope": 1}"#).unwrap();
    assert_eq!(run(dir.path(), &["mean", "--trees", "t.nwk", "--config", "cfg.json"]).status.code(), Some(1));
}

#[test]
fn iteration_cap_exits_with_two() {
    let dir = setup();
    std::fs::write(dir.path().join("cfg.json"), r#"{"max_outer": 0, "max_newton_iter": 0}"#).unwrap();
    let o = run(dir.path(), &["mean", "--trees", "t.nwk", "--config", "cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["mean"].is_string());
}
