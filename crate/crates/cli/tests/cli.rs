use std::fs;
use std::process::{Command, Output};

fn nsdistill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsdistill"))
        .args(args)
        .env_remove("NSDISTILL_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn line_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|rest| rest.split_whitespace().next())
        .unwrap_or_else(|| panic!("no {key:?} line in {text}"))
        .parse()
        .unwrap()
}

const SIGNALING: &str = r#"{"schema":"nsbox/behavior-v1","row_order":"xy:00,01,10,11","col_order":"ab:00,01,10,11","p":[[1,0,0,0],[0,0,0,1],[1,0,0,0],[1,0,0,0]]}"#;

#[test]
fn decompose_tsirelson_hardy_box() {
    let o = nsdistill(&["box", "decompose", "--name", "H_Q_max"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("c0 P_NL  PR_110   0.18034"), "{out}");
    assert!(out.contains("c5 P_L5  L_1111   0.236068"), "{out}");
}

#[test]
fn signaling_file_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sig.json");
    fs::write(&path, SIGNALING).unwrap();
    let o = nsdistill(&["box", "validate", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NoSignalingViolation"));
}

#[test]
fn io_and_schema_errors_exit_2() {
    let o = nsdistill(&["box", "show", "--input", "/definitely/missing.json"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, SIGNALING.replace("behavior-v1", "behavior-v9")).unwrap();
    let o = nsdistill(&["box", "show", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(nsdistill(&["box", "show", "--name", "NOPE"]).status.code(), Some(2));
    assert_eq!(nsdistill(&["box", "show"]).status.code(), Some(2));
}

#[test]
fn json_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let o = nsdistill(&["box", "show", "--name", "H_NS", "--json"]);
    fs::write(&path, stdout(&o)).unwrap();
    let o = nsdistill(&["box", "validate", "--input", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "valid");
}

#[test]
fn eight_copies_of_h_ns() {
    let o = nsdistill(&["wire", "--name", "H_NS", "--copies", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("parents 8 method closed"));
    assert_eq!(line_value(&out, "hardy "), 0.157977);
}

#[test]
fn local_parent_is_transparent_in_any_position() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("child.json");
    let h_file = dir.path().join("h.json");
    fs::write(&h_file, stdout(&nsdistill(&["box", "show", "--name", "H_NS", "--json"]))).unwrap();
    let o = nsdistill(&[
        "wire", "--input", h_file.to_str().unwrap(), "--name", "P_L1", "--output", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(line_value(&stdout(&o), "chsh "), 2.2);
    let o = nsdistill(&["box", "show", "--input", out.to_str().unwrap()]);
    assert_eq!(line_value(&stdout(&o), "hardy success "), 0.05);
}

#[test]
fn monte_carlo_agrees_with_closed_form() {
    let args = ["wire", "--name", "P_NL", "--copies", "2", "--method", "mc", "--rounds", "1000000", "--seed", "7"];
    let o = nsdistill(&args);
    assert!(o.status.success());
    let first = stdout(&o);
    assert!(line_value(&first, "max z-score vs exact ") < 3.0);
    let again = nsdistill(&["--threads", "1"].iter().chain(args.iter()).copied().collect::<Vec<_>>());
    assert_eq!(stdout(&again), first);
}

#[test]
fn wire_argument_errors() {
    assert_eq!(nsdistill(&["wire"]).status.code(), Some(2));
    assert_eq!(nsdistill(&["wire", "--name", "H_NS", "--copies", "0"]).status.code(), Some(2));
    assert_eq!(
        nsdistill(&["wire", "--name", "H_NS", "--name", "P_L1", "--copies", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn gap_sweep_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gap.csv");
    let o = nsdistill(&["sweep", "--quantity", "gap", "--r", "0:1:40", "--s", "0:1:40", "--output", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1600 records; max gap"));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,s,lambda,n_opt,parent_value,distilled_value,gap"));
    assert_eq!(lines.count(), 1600);
}

#[test]
fn sweeps_are_thread_count_independent() {
    let args = ["sweep", "--quantity", "mixture", "--r", "0:1:7", "--s", "0:1:5", "--lambda", "0:1:3"];
    let one = nsdistill(&["--threads", "1"].iter().chain(args.iter()).copied().collect::<Vec<_>>());
    let many = nsdistill(&["--threads", "4"].iter().chain(args.iter()).copied().collect::<Vec<_>>());
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_nsdistill"))
        .args(args)
        .env("NSDISTILL_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(env.stdout, one.stdout);
}

#[test]
fn chsh_curve_around_peak() {
    let o = nsdistill(&["sweep", "--quantity", "chsh-n", "--lambda", "1e-7", "--n-around-peak"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("max value 2.32928"), "{}", stderr(&o));
    assert!(stdout(&o).lines().count() > 50);
}

#[test]
fn bad_grids_exit_2() {
    for args in [
        vec!["sweep", "--quantity", "gap", "--r", "1:0:3", "--s", "0.5"],
        vec!["sweep", "--quantity", "gap", "--r", "0:1:3"],
        vec!["sweep", "--quantity", "nope", "--r", "0.5", "--s", "0.5"],
        vec!["sweep", "--quantity", "gap", "--r", "0:1", "--s", "0.5"],
    ] {
        assert_eq!(nsdistill(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn detector_battery() {
    let o = nsdistill(&["detect", "--name", "H_NS", "--max-copies", "8"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let arr = v.as_array().unwrap();
    let names: Vec<&str> = arr.iter().map(|d| d["detector"].as_str().unwrap()).collect();
    assert_eq!(names, ["hardy_bound", "ntcc", "ic", "quantum_boundary"]);
    assert_eq!(arr[0]["positive"], true);
    assert_eq!(arr[1]["positive"], false);
    assert_eq!(arr[2]["positive"], false);

    let o = nsdistill(&["detect", "--name", "H_NS_prime", "--max-copies", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["witness"], 2);
}

#[test]
fn assert_postquantum_on_quantum_box() {
    let o = nsdistill(&["detect", "--name", "B_Q_max", "--max-copies", "20", "--assert-postquantum"]);
    assert_eq!(o.status.code(), Some(3));
    let o = nsdistill(&["detect", "--name", "H_NS", "--max-copies", "8", "--assert-postquantum"]);
    assert!(o.status.success());
}

#[test]
fn reproduce_targets() {
    let o = nsdistill(&["reproduce", "prop1-copies"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("5/5 checks pass"));
    for key in ["thm1-hardy", "thm2-gain", "thm3-ball", "figA1", "figA2", "figD1"] {
        assert!(nsdistill(&["reproduce", key]).status.success(), "{key}");
    }
    assert_eq!(nsdistill(&["reproduce", "bogus"]).status.code(), Some(2));
}

#[test]
fn reproduce_reports_the_eight_copy_chsh_mismatch() {
    let o = nsdistill(&["reproduce", "appE-postquantum"]);
    assert_eq!(o.status.code(), Some(4));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.contains("H_NS 8-copy chsh")).unwrap();
    assert!(row.contains("2.63191") && row.ends_with("FAIL"), "{row}");
    assert_eq!(out.lines().filter(|l| l.ends_with("FAIL")).count(), 1);
}

#[test]
fn full_precision_output() {
    let o = nsdistill(&["--full-precision", "wire", "--name", "H_NS", "--copies", "8"]);
    let hardy = stdout(&o).lines().find(|l| l.starts_with("hardy ")).unwrap().to_string();
    assert!(hardy.len() > "hardy 0.157977".len() + 5, "{hardy}");
}

#[test]
fn list_catalog() {
    let out = stdout(&nsdistill(&["list"]));
    for name in ["H_Q_max", "H_NS_prime", "P_L8", "PR_000", "L_1111"] {
        assert!(out.lines().any(|l| l == name), "{name}");
    }
}
