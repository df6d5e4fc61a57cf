use std::process::{Command, Output};

fn octads(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octads")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn eval_emits_one_row_per_grid_point() {
    let o = octads(&["eval", "--t", "1", "--r", "0,0.5", "--eta", "0,pi/2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["t", "r", "eta", "rep1", "rep2", "rel_diff", "est_error", "m_used", "u_max_used"]);
    assert_eq!(rows.len(), 5);
    for row in &rows[1..] {
        let diff: f64 = row[5].parse().unwrap();
        assert!(diff < 1e-6);
        // %.12e with a signed two-digit exponent
        assert!(row[3].contains("e-") && row[3].split('.').nth(1).unwrap().len() == 16, "{}", row[3]);
    }
}

#[test]
fn usage_and_domain_errors_exit_2() {
    assert_eq!(octads(&["eval", "--bogus"]).status.code(), Some(2));
    assert_eq!(octads(&["hyperbolic", "--n", "4", "--t", "1", "--s", "1"]).status.code(), Some(2));
    assert_eq!(octads(&["eval", "--t", "-1", "--r", "0", "--eta", "0"]).status.code(), Some(2));
    assert_eq!(octads(&["eval", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(octads(&["--config", "/nonexistent/octads.cfg", "octonion-check"]).status.code(), Some(2));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small grid\nt = 2\nr = 1\neta = pi/4\nrep = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = csv_rows(&stdout(&octads(&["--config", cfg, "eval"])));
    assert_eq!(from_file.len(), 2);
    assert_eq!(from_file[1][0], "2.000000000000e+00");
    let flagged = csv_rows(&stdout(&octads(&["--config", cfg, "eval", "--t", "0.5"])));
    assert_eq!(flagged[1][0], "5.000000000000e-01");
    assert_eq!(flagged[1][1], "1.000000000000e+00");

    std::fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    assert_eq!(octads(&["--config", bad.to_str().unwrap(), "eval"]).status.code(), Some(2));
}

#[test]
fn json_and_csv_carry_the_same_fields() {
    let args = ["mass", "--t", "0.5"];
    let csv = csv_rows(&stdout(&octads(&args)));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&octads(&json_args))).unwrap();
    let obj = v[0].as_object().unwrap();
    let keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, csv[0].iter().map(|s| s.as_str()).collect::<Vec<_>>());
    for (k, cell) in csv[0].iter().zip(&csv[1]) {
        let a: f64 = cell.parse().unwrap();
        let b = obj[k].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "{k}: {a} vs {b}");
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = octads(&["hyperbolic", "--n", "3", "--t", "1", "--s", "0,1", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("n,t,s,value\n"));
}

#[test]
fn dump_terms_leads_with_highest_bracket() {
    let o = octads(&["hyperbolic", "--n", "15", "--dump-terms"]);
    assert_eq!(stdout(&o).lines().next(), Some("225/2*t^-1, 1, 13, 0"));
}

#[test]
fn checks_pass_and_report_rows() {
    let o = octads(&["octonion-check", "--pairs", "200", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["check", "case", "value", "bound", "pass"]);
    assert!(rows[1..].iter().all(|r| r[4] == "true"));
    assert_eq!(rows.iter().filter(|r| r[0] == "generator_triple").count(), 7);
    assert_eq!(octads(&["fiber", "--check", "profile"]).status.code(), Some(0));
}

#[test]
fn printed_rep2_weights_fail_the_comparison() {
    let o = octads(&["compare-reps", "--pair", "printed", "--t", "1", "--r", "0,1", "--eta", "0,pi/2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["mc-check", "--t", "0.5", "--n-paths", "100", "--dt", "1e-3", "--seed", "11"];
    let a = octads(&args);
    let b = octads(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}
