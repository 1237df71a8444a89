use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn demo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forkdelta"))
        .env_remove("FORKDELTA_LOG")
        .args(args)
        .output()
        .unwrap()
}

fn put(root: &Path, rel: &str, text: &[u8]) {
    let p = root.join(rel);
    fs::create_dir_all(p.parent().unwrap()).unwrap();
    fs::write(p, text).unwrap();
}

fn scenario(dir: &Path) -> PathBuf {
    for v in ["ao", "an", "cm"] {
        put(dir, &format!("{v}/app/AndroidManifest.xml"), b"");
        put(
            dir,
            &format!("{v}/app/src/A.java"),
            b"package p; class A { void f() { a(); b(); c(); } }",
        );
    }
    let cfg = dir.join("s.toml");
    fs::write(
        &cfg,
        "scenario_id = \"s\"\nao_root = \"ao\"\nan_root = \"an\"\ncm_root = \"cm\"\n",
    )
    .unwrap();
    cfg
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn missing_root_is_fatal_and_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path());
    fs::remove_dir_all(dir.path().join("cm")).unwrap();
    let out = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(
        err.contains(dir.path().join("cm").to_str().unwrap()),
        "{err}"
    );
}

#[test]
fn unreadable_files_make_the_run_partial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path());
    put(
        dir.path(),
        "an/app/src/Broken.java",
        b"class Broken { void f() { ",
    );
    put(
        dir.path(),
        "cm/app/src/Latin.java",
        b"class L { void f() { s(\"\xe9\"); } }",
    );
    let out_dir = dir.path().join("o");
    let out = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
    let log = fs::read_to_string(out_dir.join("s/skipped.log")).unwrap();
    assert!(log.contains("AN\tapp\tsrc/Broken.java\t"), "{log}");
    assert!(log.contains("CM\tapp\tsrc/Latin.java\t"), "{log}");
    assert!(out_dir.join("s/scenario.json").is_file());
}

#[test]
fn excluded_subsystem_is_not_partial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path());
    put(dir.path(), "ao/gone/AndroidManifest.xml", b"");
    let out = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("1 excluded"));
}

#[test]
fn bad_arguments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path());
    let cfg = cfg.to_str().unwrap();
    for args in [
        vec!["analyze", "--config", cfg, "--jobs", "0"],
        vec!["analyze", "--config", cfg, "--sim-threshold", "1.5"],
        vec!["analyze", "--config", cfg, "--format", "pdf"],
        vec!["matrix", "--format", "text"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(text(&out.stderr).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn several_configs_write_a_corpus() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg_a = scenario(a.path());
    let cfg_b = scenario(b.path());
    fs::write(
        &cfg_b,
        "scenario_id = \"t\"\nao_root = \"ao\"\nan_root = \"an\"\ncm_root = \"cm\"\n",
    )
    .unwrap();
    let out_dir = a.path().join("o");
    let out = run(&[
        "analyze",
        "--config",
        cfg_a.to_str().unwrap(),
        "--config",
        cfg_b.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "report,text",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    for f in [
        "corpus.json",
        "corpus.txt",
        "s/scenario.txt",
        "t/scenario.json",
    ] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
}

#[test]
fn matrix_is_stable_and_has_a_json_form() {
    let a = run(&["matrix"]);
    let b = run(&["matrix", "--format", "grid"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value =
        serde_json::from_slice(&run(&["matrix", "--format", "report"]).stdout).unwrap();
    assert_eq!(doc["an_kinds"].as_array().unwrap().len(), 12);
    assert_eq!(doc["cm_kinds"].as_array().unwrap().len(), 11);
    assert_eq!(
        doc["tally"]["green"].as_u64().unwrap()
            + doc["tally"]["yellow"].as_u64().unwrap()
            + doc["tally"]["red"].as_u64().unwrap(),
        132
    );
}

#[test]
fn log_env_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path());
    put(dir.path(), "ao/gone/AndroidManifest.xml", b"");
    let out_dir = dir.path().join("o");
    let args = [
        "--log",
        "error",
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ];
    let quiet = run(&args);
    assert!(!text(&quiet.stderr).contains("INFO"));
    let loud = Command::new(env!("CARGO_BIN_EXE_forkdelta"))
        .env("FORKDELTA_LOG", "debug")
        .args(args)
        .output()
        .unwrap();
    assert!(loud.status.success());
    assert!(
        text(&loud.stderr).contains("excluding gone"),
        "{}",
        text(&loud.stderr)
    );
}

#[test]
fn empty_plan_copies_the_tree() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "seed/AndroidManifest.xml", b"<manifest/>");
    put(
        dir.path(),
        "seed/src/A.java",
        b"package p; class A { void f() { a(); } }",
    );
    let plan = dir.path().join("plan.toml");
    fs::write(&plan, "seed_root = \"seed\"\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "mutate",
        "--plan",
        plan.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--score",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    for f in ["AndroidManifest.xml", "src/A.java"] {
        assert_eq!(
            fs::read(dir.path().join("seed").join(f)).unwrap(),
            fs::read(out_dir.join(f)).unwrap()
        );
    }
    let expected: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("expected.changeset.json")).unwrap())
            .unwrap();
    assert_eq!(expected["changes"]["p::A::f():void"]["kind"], "Identical");
}

#[test]
fn demo_plans_reproduce_the_expected_change_sets() {
    for v in ["an", "cm"] {
        let dir = tempfile::tempdir().unwrap();
        let plan = demo().join(format!("plans/{v}.toml"));
        let out = run(&[
            "mutate",
            "--plan",
            plan.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--score",
        ]);
        assert!(out.status.success(), "{}", text(&out.stderr));
        let table = text(&out.stdout);
        let scored: Vec<&str> = table.lines().skip(2).collect();
        assert_eq!(scored.len(), 12, "{table}");
        for line in scored {
            assert!(line.matches("1.000").count() >= 2, "{v}: {line}");
        }
        let produced = fs::read_to_string(dir.path().join("expected.changeset.json")).unwrap();
        let checked_in =
            fs::read_to_string(demo().join(format!("expected/{v}.changeset.json"))).unwrap();
        assert_eq!(produced, checked_in, "{v}");
    }
}

#[test]
fn score_accepts_trees_or_documents() {
    let expected = demo().join("expected/cm.changeset.json");
    let expected = expected.to_str().unwrap();
    let from_trees = run(&[
        "score",
        "--expected",
        expected,
        "--base",
        demo().join("ao").to_str().unwrap(),
        "--derived",
        demo().join("cm").to_str().unwrap(),
    ]);
    assert!(from_trees.status.success(), "{}", text(&from_trees.stderr));
    let self_scored = run(&["score", "--expected", expected, "--actual", expected]);
    assert!(self_scored.status.success());
    assert!(
        !text(&self_scored.stdout).contains("0.9"),
        "{}",
        text(&self_scored.stdout)
    );
    let neither = run(&["score", "--expected", expected]);
    assert_eq!(neither.status.code(), Some(1));
}
