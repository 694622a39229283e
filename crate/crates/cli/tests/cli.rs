use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bregprox"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn acceptance_cfg() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("acceptance.cfg")
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn bundled_acceptance_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("not").join("yet").join("there");
    let o = run(&["run-suite", acceptance_cfg().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}\n{}", String::from_utf8_lossy(&o.stdout), stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("experiment,kind,status,detail"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("pass")), "{summary}");
    let trace = fs::read_to_string(out.join("bpam_sparse_trace.csv")).unwrap();
    assert!(trace.starts_with("t,F,decrease_slack,rho_x,rho_u,step_norm\n"));
    assert!(!trace.contains('\r'));
}

#[test]
fn prox_table_on_stdout() {
    let o = run(&["prox", "--f", "power", "--p", "0.5", "--alpha", "2", "--lambda", "0.5", "--y", "-3,0,2,3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "y,minimizers,env,multivalued,agreement");
    assert_eq!(lines.len(), 5);
    // below y_th = 16 λ / 3 the prox is zero
    assert!(lines[3].starts_with("2,0,"), "{}", lines[3]);
    assert!(lines[4].ends_with(",false,true"), "{}", lines[4]);
}

#[test]
fn config_section_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "[prox]\nf = abs\nlambda = 1\ny = 0.5,2\n");
    let o = run(&["prox", "--config", cfg.to_str().unwrap(), "--y", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("3,2,"), "{text}");
}

#[test]
fn right_side_with_burg_is_rejected() {
    let o = run(&["prox", "--f", "abs", "--lambda", "1", "--kernel", "burg", "--side", "right", "--y", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("dom φ = ℝᵐ"), "{}", stderr(&o));
}

#[test]
fn empty_y_list_is_rejected() {
    let o = run(&["prox", "--f", "abs", "--lambda", "1", "--y", ""]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unbounded_envelope_exits_3() {
    let o = run(&["prox", "--f", "quadratic", "--set", "a=-1", "--lambda", "2", "--y", "1", "--lo", "-5", "--hi", "5"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn suite_with_unknown_kernel_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "[a]\nkind = prox\nf = abs\nlambda = 1\nkernel = gaussian\ny = 1\n");
    let out = dir.path().join("out");
    let o = run(&["run-suite", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gaussian"));
    assert!(!out.join("summary.csv").exists());
}

#[test]
fn failed_expectation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "[fig]\nkind = figure\nkernel = half_squared_norm\nscan_points = 2001\nexpect = tangent\n\n[ok]\nkind = bpg-equiv\nsteps = 5\n",
    );
    let out = dir.path().join("out");
    let o = run(&["run-suite", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains("fig,figure,fail,"));
    assert!(summary.contains("ok,bpg-equiv,pass,"));
}

#[test]
fn figure_files_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&["figure", "--set", "scan_points=2001", "--set", "level_points=64", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for f in ["level_set.csv", "graph.csv", "tangency.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let level = fs::read_to_string(a.join("level_set.csv")).unwrap();
    assert!(level.starts_with("z1,z2\n"));
    assert_eq!(level.lines().count(), 65);
    let graph = fs::read_to_string(a.join("graph.csv")).unwrap();
    assert!(graph.starts_with("s,h\n"));
    let summary = fs::read_to_string(a.join("tangency.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().ends_with(",true"), "{summary}");
}

#[test]
fn seeded_bpam_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut traces = Vec::new();
    for (i, seed) in ["7", "7", "8"].iter().enumerate() {
        let out = dir.path().join(i.to_string());
        let o = run(&["run-bpam", "--seed", seed, "--set", "max_iter=30", "--set", "translated=false", "--out", out.to_str().unwrap()]);
        assert!(code(&o) == 0 || code(&o) == 1, "{}", stderr(&o));
        traces.push(fs::read(out.join("trace.csv")).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
    assert_ne!(traces[0], traces[2]);
}

#[test]
fn grad_check_header() {
    let o = run(&["grad-check", "--f", "abs", "--lambda", "1", "--side", "right", "--y", "-2,0.5,2", "--lo", "-5", "--hi", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("y,formula,fd,abs_err,rel_err,single_valued"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn certify_writes_violation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["certify", "--kernel", "half_squared_norm", "--set", "resolution=60", "--set", "expect=violated", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("certify.csv")).unwrap();
    assert!(text.starts_with("kernel,verified,r,required_r,checked_pairs,violation_base,violation_point,lhs,rhs\n"));
    assert!(text.contains("half_squared_norm,false,"));
}
