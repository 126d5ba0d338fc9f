use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sqaoa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqaoa"))
        .args(args)
        .env_remove("SQAOA_THREADS")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_instance(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn info_reports_reduction() {
    let out = sqaoa(&["info", "--instance", &data("ring8.json")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("full_dim: 16777216"));
    assert!(text.contains("feasible_count: 6561"));
    assert!(text.contains("reduction_factor: 2557.11"));
}

#[test]
fn info_single_node_and_capacities() {
    let dir = tempfile::tempdir().unwrap();
    let one = write_instance(dir.path(), "one.json", r#"{"name":"one","n":1,"m":3,"edges":[],"demands":[1]}"#);
    let text = stdout(&sqaoa(&["info", "--instance", &one]));
    assert!(text.contains("feasible_count: 3"));
    assert!(text.contains("reduction_factor: 2.6667"));

    let text = stdout(&sqaoa(&["info", "--instance", &data("ring8-dual.json")]));
    assert!(text.contains("dual_basis_size: 570"));
}

#[test]
fn malformed_instance_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_instance(dir.path(), "bad.json", r#"{"name":"b","n":2,"m":3,"edges":[[0,1]],"demands":[1]}"#);
    let out = sqaoa(&["info", "--instance", &bad]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("demands"));

    let broken = write_instance(dir.path(), "broken.json", "{\"name\": \"b\",\n \"n\": }");
    let out = sqaoa(&["solve", "--instance", &broken, "--method", "exact"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn rejects_bad_flags() {
    let ring = data("ring8.json");
    for args in [
        vec!["solve", "--instance", ring.as_str(), "--method", "dicke-xy", "--shots", "0"],
        vec!["solve", "--instance", ring.as_str(), "--method", "dicke-xy", "--depth", "0"],
        vec!["solve", "--instance", ring.as_str(), "--method", "dicke-xy", "--budget", "0"],
        vec!["solve", "--instance", ring.as_str(), "--method", "dual"],
    ] {
        let out = sqaoa(&args);
        assert!(!out.status.success(), "{args:?}");
    }
}

#[test]
fn solve_exact_and_greedy_write_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("exact");
    let out = sqaoa(&[
        "solve",
        "--instance",
        &data("ring8.json"),
        "--method",
        "exact",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("conflicts 2"));
    let csv = std::fs::read_to_string(out_dir.join("solution.csv")).unwrap();
    assert!(csv.starts_with("# seed=42\n"));
    let row = csv.lines().last().unwrap();
    assert!(row.starts_with("exact,"));
    assert!(row.contains(",2,0,true,"));

    let g = dir.path().join("greedy");
    let out = sqaoa(&["solve", "--instance", &data("ring8.json"), "--method", "greedy", "--out", g.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(g.join("solution.csv")).unwrap().contains("greedy,"));
}

#[test]
fn solve_qaoa_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let d = dir.path().join(name);
        let out = sqaoa(&[
            "solve",
            "--instance",
            &data("triangle.json"),
            "--method",
            "dicke-xy",
            "--budget",
            "12",
            "--shots",
            "128",
            "--seed",
            "7",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        (
            std::fs::read(d.join("solution.csv")).unwrap(),
            std::fs::read_to_string(d.join("trace.csv")).unwrap(),
        )
    };
    let (a, trace) = run("a");
    let (b, trace_b) = run("b");
    assert_eq!(a, b);
    assert_eq!(trace, trace_b);
    assert!(trace.starts_with("# seed=7\nstep,gammas,betas,"));
    assert_eq!(trace.lines().count(), 2 + 12);
}

#[test]
fn reduction_experiment_writes_both_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = sqaoa(&["experiment", "reduction", "--out", dir.path().to_str().unwrap(), "--strict"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("reduction.csv")).unwrap();
    assert!(csv.starts_with("# seed=42"));
    assert!(csv.contains("feasible_count,6561"));
    assert!(csv.contains("published_feasible_count,2916"));
    assert!(csv.contains("count_discrepancy,true"));
    let cal = std::fs::read_to_string(dir.path().join("calibration.csv")).unwrap();
    assert!(cal.contains("closed-ring,0-2,1-3,3,2,2,true,12"));
}

#[test]
fn calibrate_lists_both_truncations() {
    let dir = tempfile::tempdir().unwrap();
    let out = sqaoa(&["experiment", "calibrate", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let cal = std::fs::read_to_string(dir.path().join("calibration.csv")).unwrap();
    assert!(cal.contains("closed-ring,0-2,1-3,3,2,2,true,12"));
    assert!(cal.contains("path,0-2,0-3,2,2,2,false,0"));
}

#[test]
fn small_heatmap_and_noise_runs() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h");
    let out = sqaoa(&[
        "experiment",
        "dual-heatmap",
        "--grid",
        "3",
        "--shots",
        "64",
        "--out",
        h.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(h.join("heatmap.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "gamma,beta,mean_conflict,node_feas,channel_feas");
    assert_eq!(body.len(), 1 + 9);
    assert!(h.join("heatmap.svg").exists());

    let n = dir.path().join("n");
    let out = sqaoa(&[
        "experiment",
        "noise",
        "--trajectories",
        "20",
        "--budget",
        "3",
        "--shots",
        "32",
        "--noise-levels",
        "0,0.05",
        "--out",
        n.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(n.join("noise.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "p_err,ansatz,mean_deviation,stderr,trajectories");
    assert_eq!(body.len(), 1 + 4);
    assert!(stdout(&out).contains("[FAIL] trajectories per point"));
}

#[test]
fn strict_mode_fails_on_red_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = sqaoa(&[
        "experiment",
        "noise",
        "--trajectories",
        "5",
        "--budget",
        "2",
        "--shots",
        "16",
        "--noise-levels",
        "0",
        "--strict",
        "--threads",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
