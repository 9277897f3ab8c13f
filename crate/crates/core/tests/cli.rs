use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hom-fingerprint"));
    c.env_remove("HOM_FP_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(table: &[Vec<String>], name: &str) -> Vec<String> {
    let i = table[0].iter().position(|h| h == name).unwrap();
    table[1..].iter().map(|r| r[i].clone()).collect()
}

#[test]
fn bounds_ends_at_the_overhead_bound() {
    let o = run(&["bounds", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let t = rows(&stdout(&o));
    assert_eq!(t[0], ["delta_coh", "Delta_min", "r_gv", "R_gv", "overhead"]);
    assert_eq!(t.len(), 6);
    let last: f64 = column(&t, "overhead")[4].parse().unwrap();
    assert!((last - 5.105_39).abs() < 1e-5);
}

#[test]
fn floats_use_fixed_scientific_format() {
    let o = run(&["bounds", "--points", "2"]);
    let t = rows(&stdout(&o));
    for cell in &t[1] {
        let (mantissa, _) = cell.split_once('e').unwrap();
        assert_eq!(mantissa.split_once('.').unwrap().1.len(), 16, "{cell}");
    }
}

#[test]
fn information_reports_crossover() {
    let o = run(&["information", "--points", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let note = text.lines().find(|l| l.starts_with("# crossover")).unwrap();
    assert!(note.contains("two_photon=998344"), "{note}");
    assert!(text.lines().any(|l| l.starts_with("# note")));
    assert_eq!(rows(&text).len(), 12);
}

#[test]
fn error_grid_starts_at_one_half() {
    let o = run(&["error", "--points", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let t = rows(&stdout(&o));
    assert_eq!(t.len(), 7);
    let exact = column(&t, "p_err_exact");
    let inset = column(&t, "inset");
    assert_eq!(exact[0].parse::<f64>().unwrap(), 0.5);
    assert_eq!(inset[0], "");
    assert_eq!(column(&t, "source")[3], "poissonian");
}

#[test]
fn chernoff_surface_has_full_grid() {
    let o = run(&["chernoff-surface", "--dark-points", "3", "--delta-points", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let t = rows(&stdout(&o));
    assert_eq!(t.len(), 13);
    for r in column(&t, "ratio") {
        assert!(r.parse::<f64>().unwrap() > 1.0);
    }
}

#[test]
fn simulate_is_byte_identical_across_reruns_and_threads() {
    let args = ["simulate", "--runs", "3e5", "--seed", "17"];
    let a = run(&args);
    let b = run(&args);
    let c = run(&[&args[..], &["--threads", "3"]].concat());
    let d = bin().args(args).env("HOM_FP_THREADS", "2").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(a.stdout, d.stdout);
    let other = run(&["simulate", "--runs", "3e5", "--seed", "18"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn simulate_with_codewords() {
    // distance 2 of 8 gives v = 0.5
    let o = run(&[
        "simulate", "--runs", "1e5", "--code-a", "00000000", "--code-b", "11000000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = rows(&stdout(&o));
    assert_eq!(column(&t, "v")[0].parse::<f64>().unwrap(), 0.5);
    let bad = run(&["simulate", "--runs", "1e3", "--code-a", "0101", "--code-b", "01"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn out_and_json_out_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sim.csv");
    let json = dir.path().join("sim.json");
    let o = run(&[
        "simulate",
        "--runs",
        "70000",
        "--seed",
        "4",
        "--out",
        csv.to_str().unwrap(),
        "--json-out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let t = rows(&fs::read_to_string(&csv).unwrap());
    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(record["n_runs"], 70000);
    assert_eq!(record["seed"], 4);
    assert_eq!(
        record["tally"]["n_two_click"].as_u64().unwrap().to_string(),
        column(&t, "n_two_click")[0]
    );
    assert_eq!(record["params"]["w"], 0.98);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"seed": 5, "simulate": {"runs": 80000, "eta_nbar": 0.1}, "bounds": {"points": 4}}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = run(&["simulate", "--config", cfg]);
    let explicit = run(&["simulate", "--runs", "80000", "--eta-nbar", "0.1", "--seed", "5"]);
    assert_eq!(from_file.stdout, explicit.stdout);

    let flag_wins = run(&["simulate", "--config", cfg, "--seed", "6", "--runs", "9e4"]);
    let explicit = run(&["simulate", "--runs", "90000", "--eta-nbar", "0.1", "--seed", "6"]);
    assert_eq!(flag_wins.stdout, explicit.stdout);

    assert_eq!(rows(&stdout(&run(&["bounds", "--config", cfg]))).len(), 5);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"simulate": {"runz": 10}}"#).unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = run(&["bounds", "--config", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bounds", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--threads", "0"]).status.code(), Some(2));
    let env = bin().args(["bounds"]).env("HOM_FP_THREADS", "many").output().unwrap();
    assert_eq!(env.status.code(), Some(2));
    let domain = run(&["information", "--p-err", "0.5"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(domain.stdout.is_empty());
    assert!(!domain.stderr.is_empty());
}

#[test]
fn alarm_is_fatal_only_when_strict() {
    let args = ["simulate", "--runs", "2e5", "--seed", "1", "--z-alarm", "1e-9"];
    let lax = run(&args);
    assert_eq!(lax.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&lax.stderr).contains("warning"));
    let strict = run(&[&args[..], &["--strict"]].concat());
    assert_eq!(strict.status.code(), Some(1));
    // the dataset is still written
    assert_eq!(strict.stdout, lax.stdout);
}
