use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Path of a file in tests/data.
fn d(name: &str) -> &'static str {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    Box::leak(path.to_str().unwrap().to_owned().into_boxed_str())
}

fn reqc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqc")).args(args).current_dir(cwd).env_remove("REQC_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_example_1_is_silent() {
    let dir = tempfile::tempdir().unwrap();
    for dict in ["example_1_dict.json", "example_1_dict.csv"] {
        let o = reqc(&["check", d("example_1.req"), "--dict", d(dict)], dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(o.stdout.is_empty() && o.stderr.is_empty());
    }
}

#[test]
fn check_reports_unknown_variable_with_location() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("r.req"), "At each time step, [ghost] holds.\n").unwrap();
    let o = reqc(&["check", "r.req", "--dict", d("bools.json")], dir.path());
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("r.req:1:21: error: "), "{err}");
}

#[test]
fn missing_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = reqc(&["check", "nope.req", "--dict", d("bools.json")], dir.path());
    assert_eq!(code(&o), 2);
    let o = reqc(&["check", d("or.req"), "--dict", "nope.json"], dir.path());
    assert_eq!(code(&o), 2);
    let o = reqc(&["check", d("or.req")], dir.path());
    assert_eq!(code(&o), 2, "no dictionary given");
    let o = reqc(&["frobnicate"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn strict_turns_warnings_into_findings() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.json"), r#"[{"name":"f","kind":"signal","data_type":"float"}]"#).unwrap();
    std::fs::write(dir.path().join("r.req"), "At each time step, [f is equal to 1.5] holds.\n").unwrap();
    let o = reqc(&["check", "r.req", "--dict", "d.json"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    let o = reqc(&["check", "r.req", "--dict", "d.json", "--strict"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn export_text_writes_one_file_per_requirement() {
    let dir = tempfile::tempdir().unwrap();
    let o = reqc(&["export", d("three.req"), "--dict", d("example_1_dict.json"), "--format", "text", "--all", "-o", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut files: Vec<_> = std::fs::read_dir(dir.path().join("out")).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert_eq!(files, ["inv.txt", "resp.txt", "start.txt"]);
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn export_selected_id_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = reqc(&["export", d("three.req"), "--dict", d("example_1_dict.json"), "--format", "c", "--id", "resp", "-o", "."], dir.path());
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("resp.c").exists());
    assert!(!dir.path().join("inv.c").exists());
    let o = reqc(&["export", d("three.req"), "--dict", d("example_1_dict.json"), "--format", "c", "--id", "zzz"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn spec_xml_skips_initially_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["export", d("three.req"), "--dict", d("example_1_dict.json"), "--format", "spec-xml", "-o", "x"];
    let o = reqc(&args, dir.path());
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("three.req:5:1: warning: requirement 'start' skipped"), "{}", stderr(&o));
    assert!(dir.path().join("x/inv.spec.xml").exists());
    assert!(!dir.path().join("x/start.spec.xml").exists());
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(code(&reqc(&strict, dir.path())), 1);
}

#[test]
fn export_c_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for out in ["a", "b"] {
        let o = reqc(&["export", d("example_1.req"), "--dict", d("example_1_dict.json"), "--format", "c", "-o", out], dir.path());
        assert_eq!(code(&o), 0);
        runs.push(std::fs::read(dir.path().join(out).join("EX1.c")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let c = String::from_utf8(runs.remove(0)).unwrap();
    assert!(c.contains("__VERIFIER_error()"));
}

#[test]
fn export_widths_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("reqc.toml"), "[widths]\nint_bits = 16\nfloat = \"float\"\n").unwrap();
    let o = reqc(&["export", d("example_1.req"), "--dict", d("example_1_dict.json"), "--format", "c"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = std::fs::read_to_string(dir.path().join("EX1.c")).unwrap();
    assert!(c.contains("int16_t") && c.contains("float"));
    let o = reqc(&["export", d("example_1.req"), "--dict", d("example_1_dict.json"), "--format", "c", "--int-bits", "8"], dir.path());
    assert_eq!(code(&o), 1, "255 does not fit 8 bits");
}

#[test]
fn eval_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["eval", d("or.req"), "--dict", d("bools.json"), "--trace"];
    let mut pass = base.to_vec();
    pass.push(d("or_pass.csv"));
    let o = reqc(&pass, dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "OR: pass\n");
    for form in ["future", "past", "both"] {
        let mut fail = base.to_vec();
        fail.extend([d("or_fail.csv"), "--form", form]);
        let o = reqc(&fail, dir.path());
        assert_eq!(code(&o), 1);
        assert!(stdout(&o).starts_with("OR: fail at steps 2, 4\n"), "{}", stdout(&o));
    }
    let mut blocks = base.to_vec();
    blocks.extend([d("or_fail.csv"), "--form", "blocks"]);
    assert_eq!(stdout(&reqc(&blocks, dir.path())), "OR: fail, proof objective false at steps 2, 4\n");
}

#[test]
fn eval_trace_mismatch_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.csv"), "# step_ms=10\nstep,a,zz\n0,1,1\n").unwrap();
    let o = reqc(&["eval", d("or.req"), "--dict", d("bools.json"), "--trace", "t.csv"], dir.path());
    assert_eq!(code(&o), 2);
    std::fs::write(dir.path().join("t.csv"), "# step_ms=10\nstep,a,b\n0,1,7\n").unwrap();
    let o = reqc(&["eval", d("or.req"), "--dict", d("bools.json"), "--trace", "t.csv"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn eval_both_agrees_on_response_requirements() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("r.req"),
        "At each time step, if [a] has been valid for [2 steps], then in response, after a delay of [1 step], [b] is valid for [2 steps].\n",
    )
    .unwrap();
    let rows: String = (0..30).map(|t| format!("{t},{},{}\n", (t % 7 < 4) as u8, (t % 5 < 3) as u8)).collect();
    std::fs::write(dir.path().join("t.csv"), format!("# step_ms=10\nstep,a,b\n{rows}")).unwrap();
    let o = reqc(&["eval", "r.req", "--dict", d("bools.json"), "--trace", "t.csv", "--form", "both"], dir.path());
    assert!(!stdout(&o).contains("disagree"), "{}", stdout(&o));
    assert!(code(&o) <= 1);
}

#[test]
fn testgen_or_block_full_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let o = reqc(&["testgen", d("or.req"), "--dict", d("bools.json"), "--horizon", "1", "-o", "tg"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("OR: 100.0% coverage (6/6 targets)"), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("tg/OR/coverage.json")).unwrap()).unwrap();
    assert_eq!(report["percentage"], 100.0);
    let vectors = report["vectors"].as_u64().unwrap();
    assert!(vectors <= 3);
    for k in 0..vectors {
        assert!(dir.path().join(format!("tg/OR/vector_{k}.csv")).exists());
    }
}

#[test]
fn testgen_partial_coverage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["testgen", d("contradiction.req"), "--dict", d("bools.json"), "-o", "tg"];
    let o = reqc(&args, dir.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("search-exhausted"));
    let mut partial = args.to_vec();
    partial.push("--allow-partial");
    assert_eq!(code(&reqc(&partial, dir.path())), 0);
}

#[test]
fn testgen_horizon_too_small_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = reqc(&["testgen", d("example_1.req"), "--dict", d("example_1_dict.json"), "--horizon", "3"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("needs at least 7 steps"), "{}", stderr(&o));
}

#[test]
fn testgen_is_reproducible_and_vectors_replay() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str, seed: &str| {
        let o = reqc(
            &["testgen", d("example_1.req"), "--dict", d("example_1_dict.json"), "--seed", seed, "-o", out],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path().join(out).join("EX1"))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let a = run("a", "4");
    assert_eq!(a, run("b", "4"));
    // every vector is a valid trace for eval
    for (name, _) in a.iter().filter(|(n, _)| n.ends_with(".csv")) {
        let trace = dir.path().join("a/EX1").join(name);
        let o = reqc(&["eval", d("example_1.req"), "--dict", d("example_1_dict.json"), "--trace", p(&trace), "--form", "both"], dir.path());
        assert!(code(&o) <= 1, "{}", stderr(&o));
        assert!(!stdout(&o).contains("disagree"));
    }
}

#[test]
fn seed_comes_from_environment_when_no_flag() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str, env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_reqc"));
        c.args(["testgen", d("example_1.req"), "--dict", d("example_1_dict.json"), "-o", out]);
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        c.env_remove("REQC_SEED");
        if let Some(e) = env {
            c.env("REQC_SEED", e);
        }
        assert!(c.current_dir(dir.path()).output().unwrap().status.success());
        std::fs::read(dir.path().join(out).join("EX1/coverage.json")).unwrap()
    };
    assert_eq!(run("env", Some("11"), None), run("flag", None, Some("11")));
    let o = Command::new(env!("CARGO_BIN_EXE_reqc"))
        .args(["testgen", d("or.req"), "--dict", d("bools.json")])
        .env("REQC_SEED", "not-a-number")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn dict_validate_and_convert() {
    let dir = tempfile::tempdir().unwrap();
    let o = reqc(&["dict", "validate", d("example_1_dict.csv")], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with(": 8 variables\n"));
    let o = reqc(&["dict", "convert", d("example_1_dict.csv"), "--to", "json", "-o", "d.json"], dir.path());
    assert_eq!(code(&o), 0);
    let o = reqc(&["dict", "convert", "d.json", "--to", "csv"], dir.path());
    let csv = stdout(&o);
    assert!(csv.starts_with("name,kind,data_type,rows,cols,min,max,value,initial,description\n"));
    assert!(csv.contains("constant_B,constant,float,1,1,0.0,10.0,3.5,,\n"), "{csv}");

    std::fs::write(dir.path().join("bad.csv"), "name,kind,data_type\nx,signal,bool\nx,signal,int\n").unwrap();
    let o = reqc(&["dict", "validate", "bad.csv"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("bad.csv:3:1: error: row 2 (line 3): duplicate"), "{}", stderr(&o));
}

#[test]
fn requirements_are_reported_in_file_order() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = (0..20).map(|i| format!("#id: z{i}\nAt each time step, [ghost{i}] holds.\n\n")).collect();
    std::fs::write(dir.path().join("r.req"), text).unwrap();
    let o = reqc(&["check", "r.req", "--dict", d("bools.json")], dir.path());
    let lines: Vec<usize> = stderr(&o).lines().map(|l| l.split(':').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(lines.len(), 20);
    assert!(lines.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = reqc(&["--help"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("testgen"));
}
