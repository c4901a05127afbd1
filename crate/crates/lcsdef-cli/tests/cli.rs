use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models().join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsdef")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const ZAMBON_GAMMA: &str = "sin(2*pi*y1)*dq1 + sin(2*pi*y2)*dq2";

#[test]
fn zambon_pipeline_prints_the_obstruction() {
    let o = run(&["zambon"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("½ m2(Γ1,Γ1) = −4π²·cos(2π·y1)·cos(2π·y2)·dq1∧dq2"), "{s}");
    assert!(s.contains("mc_solve obstructed at order 2"));
    assert!(s.contains("bulk obstruction at order t^2"));
    assert!(!s.contains("[FAIL]"));
}

#[test]
fn output_is_byte_stable() {
    let a = run(&["zambon"]);
    let b = run(&["zambon"]);
    assert_eq!(a.stdout, b.stdout);
    let f = run(&["grassmann-fuzz", "--n", "3", "--k", "1", "--trials", "200", "--seed", "3"]);
    let g = run(&["grassmann-fuzz", "--n", "3", "--k", "1", "--trials", "200", "--seed", "3"]);
    assert_eq!(f.stdout, g.stdout);
}

#[test]
fn grassmann_fuzz_agrees() {
    let o = run(&["grassmann-fuzz", "--n", "4", "--k", "2", "--trials", "1000", "--seed", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("agreement 1000/1000"));
}

#[test]
fn check_accepts_models_and_rejects_a_non_closed_lee_form() {
    for name in ["zambon.toml", "curved.toml", "twisted_leaf.toml"] {
        assert!(run(&["check", &model(name)]).status.success(), "{name}");
    }
    let o = run(&["check", &model("not_closed.toml")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("lee form not closed"));
}

#[test]
fn missing_file_and_bad_syntax_are_errors() {
    let o = run(&["check", "/nonexistent/model.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["kuranishi", "--gamma1", "sin(2*pi*", &model("zambon.toml")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn thickened_model_round_trips_through_the_file_format() {
    let dir = std::env::temp_dir().join(format!("lcsdef-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.toml"), dir.join("b.toml"));
    let o = run(&["thicken", &model("curved.toml"), "--out", a.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    // the written file parses back; away from p = 0 the curved thickening need not be l.c.s.
    let c = run(&["check", a.to_str().unwrap()]);
    assert_ne!(c.status.code(), Some(2), "{}", String::from_utf8_lossy(&c.stderr));
    assert!(stdout(&c).contains("Pfaffian is not a nonzero constant"));
    let z = dir.join("z.toml");
    assert!(run(&["thicken", &model("zambon.toml"), "--out", z.to_str().unwrap()]).status.success());
    assert!(run(&["check", z.to_str().unwrap()]).status.success());
    let first = std::fs::read_to_string(&a).unwrap();
    assert!(first.contains("fiber = [\"p1\", \"p2\"]"));
    let o = run(&["thicken", &model("curved.toml"), "--out", b.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(first, std::fs::read_to_string(&b).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mc_solve_and_kuranishi() {
    let o = run(&["mc-solve", "--gamma1", ZAMBON_GAMMA, &model("zambon.toml")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("obstructed at order 2"));
    let o = run(&["kuranishi", "--gamma1", ZAMBON_GAMMA, &model("zambon.toml")]);
    assert!(stdout(&o).contains("class nonzero"));
    let o = run(&["kuranishi", "--gamma1", "2*pi*cos(2*pi*q1)*dq1", &model("zambon.toml")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("class vanishes"));
    let twisted = "2*pi*cos(2*pi*q2)*dq2 + 2*pi/3*sin(2*pi*q2)*dq1";
    let o = run(&["mc-solve", "--gamma1", twisted, "--order", "4", &model("twisted_leaf.toml")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[PASS] Maurer–Cartan residual: vanishes"));
    let o = run(&["mc-solve", "--gamma1", "sin(2*pi*q1)*dq2", &model("twisted_leaf.toml")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn master_residual_and_bulk_check() {
    let o = run(&["master-residual", &model("zambon.toml"), &model("zambon_section.toml")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("order 2 co-vanishing: graph nonzero, coordinate nonzero"));
    let o = run(&["bulk-check", &model("zambon.toml"), &model("flat_series.toml"), "--order", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["bulk-check", &model("zambon.toml"), &model("zambon_series.toml")]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("[FAIL] order 2\n") && s.contains("[PASS] order 2 two-route agreement"), "{s}");
}

#[test]
fn def_dims_and_linfty_check_with_json() {
    let dir = std::env::temp_dir().join(format!("lcsdef-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let j = dir.join("d.json");
    let o = run(&["--json", j.to_str().unwrap(), "def-dims", &model("zambon.toml")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(v["command"], "def-dims");
    assert_eq!(v["ok"], true);
    assert_eq!(v["data"]["twisted"], serde_json::json!([1, 4, 6, 4, 1]));
    let o = run(&["linfty-check", &model("curved.toml"), "--arity", "3", "--trials", "2", "--seed", "11"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("[PASS] relation arity").count(), 3);
    std::fs::remove_dir_all(&dir).ok();
}
