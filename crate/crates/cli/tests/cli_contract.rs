use nel_cli::parse_config;
use proptest::prelude::*;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn nel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nel")).args(args).current_dir(dir).output().unwrap()
}

fn header(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).unwrap();
    let first = text.lines().next().unwrap();
    serde_json::from_str(first.trim_start_matches("# ")).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const QUASIPERIODIC: &str = "\
# sine-Gordon with quasiperiodic forcing
command = simulate
model = sg
eps = 0.05
forcing = quasiperiodic
qp_alpha = 0.5
qp_beta1 = 0.25
qp_beta2 = 0.125
qp_omega2 = 1.618033988749895
qp_mu = 2
abc_c = 0
theta3 = 1e-3
parity = odd
u_mean = 0
u_amp = 0.3
modes = 32
t_end = 4
seed = 99
";

#[test]
fn quasiperiodic_config_serialises_canonically() {
    let first = parse_config(QUASIPERIODIC).unwrap();
    let text = first.to_text();
    let second = parse_config(&text).unwrap();
    assert_eq!(second, first);
    assert_eq!(second.to_text(), text);
    let keys: Vec<&str> = text.lines().map(|l| l.split(" = ").next().unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_serialise_parse_is_stable(
        eps in 0.0f64..1.0,
        beta in -1e3f64..1e3,
        mu in 1.0f64..5.0,
        modes in 1i64..512,
        seed in any::<u64>(),
        scan in proptest::collection::vec(-10.0f64..10.0, 1..5),
        shuffle in any::<u64>(),
    ) {
        let scan: Vec<String> = scan.iter().map(|x| x.to_string()).collect();
        let mut lines = vec![
            "command = lyapunov".to_string(),
            format!("eps = {eps}"),
            format!("qp_beta3 = {beta}"),
            format!("qp_mu = {mu}"),
            format!("modes = {modes}"),
            format!("seed = {seed}"),
            format!("scan_a = {}", scan.join(", ")),
            "forcing = quasiperiodic".to_string(),
        ];
        let n = lines.len();
        lines.rotate_left((shuffle % n as u64) as usize);
        let cfg = parse_config(&lines.join("\n")).unwrap();
        let back = parse_config(&cfg.to_text()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_text(), cfg.to_text());
    }
}

#[test]
fn empty_file_echoes_the_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.conf"), "").unwrap();
    let out = nel(dir.path(), &["simulate", "--config", "empty.conf", "--out", "run.jsonl"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let h = header(&dir.path().join("run.jsonl"));
    assert_eq!(h["schema_version"], 1);
    assert_eq!(h["status"], "ok");
    let cfg = &h["config"];
    assert_eq!(cfg["model"], "sg");
    assert_eq!(cfg["c"], 0.9);
    assert_eq!(cfg["t_end"], 10.0);
    assert_eq!(cfg["seed"], 0);
    assert_eq!(cfg["format"], "jsonl");
    assert!(cfg.get("modes").is_none());
}

#[test]
fn file_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        ("alpha = 0.7\nnu = 0.1\nalpha = 0.6\n", "line 3: duplicate key `alpha` (first set on line 1)"),
        ("alpha = 0.7\n# note\nbogus = 1\n", "line 3: unknown key `bogus`"),
        ("alpha = 0.7\nk1 = one\n", "line 2: `k1`: expected an integer"),
    ] {
        std::fs::write(dir.path().join("bad.conf"), text).unwrap();
        let out = nel(dir.path(), &["spectrum", "--config", "bad.conf", "--k2", "1", "--nu", "0.1", "--out", "s.csv"]);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains(needle), "{}", stderr(&out));
        assert!(!dir.path().join("s.csv").exists());
    }
}

#[test]
fn flags_override_the_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.conf"), "alpha = 0.6\nnu = 0.2\nk1 = 0\nk2 = 1\ntrunc = 8\n").unwrap();
    let out = nel(dir.path(), &["spectrum", "--config", "s.conf", "--alpha", "0.7", "--out", "s.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let cfg = header(&dir.path().join("s.csv"))["config"].clone();
    assert_eq!(cfg["alpha"], 0.7);
    assert_eq!(cfg["nu"], 0.2);
    assert_eq!(cfg["gamma"], 0.5);
}

#[test]
fn diagonal_class_spectrum_is_minus_nu_m_squared() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["spectrum", "--alpha", "0.7", "--gamma", "0.5", "--nu", "0.1", "--k1", "0", "--k2", "1", "--trunc", "64", "--out", "s.csv"];
    let out = nel(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines().skip(1);
    assert_eq!(lines.next().unwrap(), "class_k1,class_k2,alpha,gamma,nu,trunc,re,im");
    let mut re: Vec<f64> = lines.map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    let mut expected: Vec<f64> = (-63i64..=65).filter(|&m| m != 0).map(|m| -0.1 * (m * m) as f64).collect();
    expected.sort_by(f64::total_cmp);
    assert_eq!(re.len(), expected.len());
    assert!(re.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-10));
}

#[test]
fn validation_failures_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["spectrum", "--alpha", "0.7", "--k1", "0", "--k2", "1", "--out", "a.csv"],
        &["spectrum", "--alpha", "0.7", "--nu", "-1", "--k1", "0", "--k2", "1", "--out", "a.csv"],
        &["simulate", "--format", "csv", "--out", "a.csv"],
        &["poincare", "--eps", "0.1", "--forcing", "quasiperiodic", "--out", "a.csv"],
        &["lyapunov", "--model", "sg", "--method", "tangent", "--out", "a.csv"],
    ];
    for args in cases {
        let out = nel(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    let out = nel(dir.path(), &["spectrum", "--alpha", "0.7", "--nu", "-1", "--k1", "0", "--k2", "1"]);
    assert!(stderr(&out).contains("viscosity nu must be a non-negative"), "{}", stderr(&out));
}

#[test]
fn computation_failure_leaves_only_the_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["laxcheck", "--n", "16", "--omega-amplitude", "50", "--dt", "0.5", "--out", "lax.jsonl"];
    let out = nel(dir.path(), &args);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(!dir.path().join("lax.jsonl").exists());
    let h = header(&dir.path().join("lax.jsonl.partial"));
    assert_eq!(h["status"], "failed");
    assert!(h["error"].as_str().unwrap().contains("CFL"));
}

#[test]
fn missing_output_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = nel(dir.path(), &["darboux", "--nx", "32", "--out", "nowhere/d.jsonl"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn thread_cap_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nel"))
        .args(["darboux", "--nx", "32"])
        .env("NEL_THREADS", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_nel"))
        .args(["darboux", "--nx", "32"])
        .env("NEL_THREADS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn version_lists_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let out = nel(dir.path(), &["--version"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for schema in ["output-record/1", "spectrum-csv/1", "trajectory-record/1", "lyapunov-csv/1"] {
        assert!(text.contains(schema), "{text}");
    }
}

#[test]
fn config_command_prints_the_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("q.conf"), QUASIPERIODIC).unwrap();
    let out = nel(dir.path(), &["config", "q.conf"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, parse_config(QUASIPERIODIC).unwrap().to_text());
    assert!(text.contains("qp_omega2 = 1.618033988749895\n"));
}

#[test]
fn command_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = nel(d, &["nustar", "--alpha", "0.7", "--gamma", "0.5", "--tol", "1e-6", "--out", "nu.jsonl"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = header(&d.join("nu.jsonl"))["summary"].clone();
    let nu = s["nu_star"].as_f64().unwrap();
    assert!(nu > 0.16597 && nu < 0.16945, "{nu}");
    assert!(s["refinement_delta"].as_f64().unwrap() < 1e-6);

    let out = nel(d, &["simulate", "--model", "dernls", "--eps", "0", "--q0", "limit-cycle", "--t-end", "50", "--out", "lc.jsonl"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = header(&d.join("lc.jsonl"))["summary"].clone();
    assert!(s["max_limit_cycle_error"].as_f64().unwrap() < 1e-6, "{s}");

    let out = nel(d, &["zvtrack", "--k1", "0", "--k2", "1", "--alpha", "0.7", "--trunc", "32", "--out", "zv.jsonl"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(d.join("zv.jsonl")).unwrap();
    let h: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(h["summary"]["classification"], "Singularity");
    assert_eq!(text.lines().count() - 1, h["summary"]["trajectories"].as_u64().unwrap() as usize);
}

#[test]
fn csv_payloads_convert_to_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = nel(dir.path(), &["poincare", "--model", "abc", "--n-iterates", "4", "--format", "jsonl", "--out", "p.jsonl"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("p.jsonl")).unwrap();
    let rows: Vec<Value> = text.lines().skip(1).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["x2"].as_f64().is_some_and(|x| x.sin().abs() < 1e-8)));
}
