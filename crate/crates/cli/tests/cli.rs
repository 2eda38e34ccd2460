use std::path::{Path, PathBuf};
use std::process::Command;

use switchdyn_cli::commands::*;
use switchdyn_cli::config::{HysteresisMode, ModelKind};
use switchdyn_cli::{load_config, parse_config, CliError};

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.toml"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_switchdyn"))
}

/// Runs the binary and returns its exit code and stderr.
fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

const TABLE_ONE: &str = r#"
model = "basic"
R = 50.0
N = 1200
R0 = 1.5e7
kR = 2e10
m = 1e-3
ks = 55.0
zs = 0.015
c = 0.1
"#;

#[test]
fn shipped_table_one_config_loads() {
    let cfg = load_config(&shipped("tableI_basic")).unwrap();
    assert_eq!(cfg.model, ModelKind::Basic);
    let p = cfg.params();
    assert_eq!((p.r, p.n, p.r0, p.kr), (50.0, 1200, 1.5e7, 2e10));
    assert_eq!((p.m, p.ks, p.zs, p.c), (1e-3, 55.0, 0.015, 0.1));
    assert_eq!(p.z_min, 0.0);
    assert_eq!(p.z_max, f64::INFINITY);

    let sat = load_config(&shipped("case3_saturation")).unwrap();
    assert_eq!(sat.model, ModelKind::Saturation);
    assert_eq!(sat.phi_sat, Some(20e-6));
    assert_eq!(sat.z_max, 0.005);
    assert_eq!(sat.hysteresis.unwrap().mode, HysteresisMode::Dynamic);
    for name in ["tableI_saturation", "case3_basic"] {
        load_config(&shipped(name)).unwrap();
    }
}

#[test]
fn stroke_limits_default_to_no_upper_stop() {
    let cfg = parse_config(TABLE_ONE).unwrap();
    assert_eq!((cfg.z_min, cfg.z_max), (0.0, f64::INFINITY));
    assert!(cfg.simulation.is_none() && cfg.sweep.is_none() && cfg.hysteresis.is_none());
}

fn config_error(text: &str) -> String {
    match parse_config(text) {
        Err(CliError::Config(msg)) => msg,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn inverted_stroke_is_rejected() {
    let msg = config_error(&format!("{TABLE_ONE}z_min = 0.01\nz_max = 0.005\n"));
    assert!(msg.contains("z_min < z_max"), "{msg}");
}

#[test]
fn saturation_requires_phi_sat() {
    let msg = config_error(&TABLE_ONE.replace("\"basic\"", "\"saturation\""));
    assert!(msg.contains("phi_sat"), "{msg}");
}

#[test]
fn unknown_and_missing_keys_are_named() {
    let msg = config_error(&format!("{TABLE_ONE}zz = 1.0\n"));
    assert!(msg.contains("zz"), "{msg}");
    let msg = config_error(&TABLE_ONE.replace("ks = 55.0\n", ""));
    assert!(msg.contains("ks"), "{msg}");
    let msg = config_error(&format!("{TABLE_ONE}[sweep]\nu_lo = 0.0\nu_hi = 1.0\nstep = 3\n"));
    assert!(msg.contains("step"), "{msg}");
    let msg = config_error(&TABLE_ONE.replace("c = 0.1", "c = -0.1"));
    assert!(msg.contains("`c`"), "{msg}");
}

#[test]
fn simulation_table_is_validated() {
    let base = format!("{TABLE_ONE}[simulation]\nt_end = 0.01\n");
    let msg = config_error(&format!("{base}voltage = {{ kind = \"pulse\", u = 1.0 }}\n"));
    assert!(msg.contains("pulse"), "{msg}");
    let msg = config_error(&format!("{base}rtol = 0.0\nvoltage = {{ kind = \"constant\", u = 1.0 }}\n"));
    assert!(msg.contains("simulation.rtol"), "{msg}");
    let msg = config_error(&format!("{base}mode = 4\nvoltage = {{ kind = \"constant\", u = 1.0 }}\n"));
    assert!(msg.contains("simulation.mode"), "{msg}");
}

#[test]
fn critical_row_for_table_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("critical.csv");
    let cfg = load_config(&shipped("tableI_basic")).unwrap();
    cmd_critical(&cfg, &out).unwrap();
    let (header, rows) = read_csv(&out);
    assert_eq!(header.join(","), CRITICAL_HEADER);
    assert_eq!(rows.len(), 1);
    let get = |k: &str| -> String { rows[0][header.iter().position(|h| h == k).unwrap()].clone() };
    let val = |k: &str| get(k).parse::<f64>().unwrap();
    let rel = |x: f64, y: f64| ((x - y) / y).abs();
    assert!(rel(val("u0"), 5.6768) < 1e-4);
    assert!(rel(val("phi0"), 9.0829e-6) < 1e-4);
    assert!(rel(val("zb"), 9.75e-3) < 1e-4);
    assert!(rel(val("phib"), 5.3736e-6) < 1e-4);
    assert!(rel(val("ub"), 47.02) < 1e-4);
    for k in ["u_max", "phi_max", "sat_u0", "sat_ub", "sat_zb", "sat_phib", "sat_u_min", "sat_u_max"] {
        assert_eq!(get(k), "", "{k}");
    }
}

#[test]
fn equilibria_at_zero_voltage_in_short_stroke() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eq.csv");
    let cfg = load_config(&shipped("case3_basic")).unwrap();
    cmd_equilibria(&cfg, 0.0, &out).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text, format!("{EQUILIBRIA_HEADER}\n0.0,1,0,0.005,0.0,stable\n"));
}

#[test]
fn simulation_from_rest_stays_put() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rest.csv");
    let text = format!(
        "{TABLE_ONE}[simulation]\nt_end = 0.01\nmode = 2\nz = 0.015\nvoltage = {{ kind = \"constant\", u = 0.0 }}\n"
    );
    cmd_simulate(&parse_config(&text).unwrap(), &out).unwrap();
    let (header, rows) = read_csv(&out);
    assert_eq!(header.join(","), TRAJECTORY_HEADER);
    assert_eq!(rows.len(), 101);
    for r in &rows {
        assert_eq!(&r[1..5], &["2", "0.015", "0.0", "0.0"]);
    }
    let (eh, events) = read_csv(&dir.path().join("rest_events.csv"));
    assert_eq!(eh.join(","), EVENTS_HEADER);
    assert!(events.is_empty());
}

/// Every subcommand over the shipped configs, run twice.
fn all_outputs(dir: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    for name in ["tableI_basic", "tableI_saturation", "case3_basic", "case3_saturation"] {
        let cfg = shipped(name);
        let cfg = cfg.to_str().unwrap();
        let path = |cmd: &str| dir.join(format!("{name}_{cmd}.csv"));
        for cmd in ["simulate", "critical", "sweep"] {
            let out = path(cmd);
            assert_eq!(run(&[cmd, "--config", cfg, "--out", out.to_str().unwrap()]).0, 0);
            files.push(out);
        }
        let out = path("equilibria");
        assert_eq!(
            run(&["equilibria", "--config", cfg, "--u", "-20", "--out", out.to_str().unwrap()]).0,
            0
        );
        files.push(out);
        if name.starts_with("case3") {
            let out = path("hysteresis");
            let (code, stderr) = run(&["hysteresis", "--config", cfg, "--out", out.to_str().unwrap()]);
            assert_eq!(code, 0, "{stderr}");
            assert!(stderr.is_empty(), "{stderr}");
            files.push(out);
        }
    }
    let companions: Vec<PathBuf> = files
        .iter()
        .flat_map(|f| ["events", "annotations", "summary"].map(|s| companion(f, s)))
        .filter(|f| f.exists())
        .collect();
    files.extend(companions);
    files.sort();
    files
}

#[test]
fn outputs_are_deterministic_and_reparse() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = all_outputs(a.path());
    let second = all_outputs(b.path());
    assert_eq!(first.len(), second.len());
    assert_eq!(first.len(), 28);
    for (x, y) in first.iter().zip(&second) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
    }

    let contracts = [
        ("_simulate_events.csv", EVENTS_HEADER),
        ("_simulate.csv", TRAJECTORY_HEADER),
        ("_critical.csv", CRITICAL_HEADER),
        ("_sweep_annotations.csv", ANNOTATIONS_HEADER),
        ("_sweep.csv", SWEEP_HEADER),
        ("_equilibria.csv", EQUILIBRIA_HEADER),
        ("_hysteresis_summary.csv", SUMMARY_HEADER),
        ("_hysteresis.csv", HYSTERESIS_HEADER),
    ];
    let text_columns = ["kind", "stability", "direction"];
    for f in &first {
        let name = f.file_name().unwrap().to_str().unwrap();
        let (_, header) = contracts.iter().find(|(s, _)| name.ends_with(s)).unwrap();
        let (h, rows) = read_csv(f);
        assert_eq!(&h.join(","), header, "{name}");
        for r in &rows {
            assert_eq!(r.len(), h.len(), "{name}");
            for (col, v) in h.iter().zip(r) {
                if text_columns.contains(&col.as_str()) || v.is_empty() {
                    continue;
                }
                if ["q", "mode", "branch"].contains(&col.as_str()) {
                    v.parse::<u64>().unwrap_or_else(|_| panic!("{name}: {col} = {v}"));
                    continue;
                }
                let x: f64 = v.parse().unwrap_or_else(|_| panic!("{name}: {col} = {v}"));
                // shortest round-trip formatting
                assert_eq!(&format!("{x:?}"), v, "{name}");
            }
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();

    let (code, stderr) = run(&["critical", "--config", "/nonexistent/cfg.toml", "--out", out]);
    assert_eq!(code, 3, "{stderr}");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, format!("{TABLE_ONE}z_min = 0.01\nz_max = 0.005\n")).unwrap();
    let (code, stderr) = run(&["critical", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(code, 1);
    assert!(stderr.contains("z_min < z_max"), "{stderr}");

    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["equilibria", "--config", "x.toml", "--out", out]).0, 1);

    // the quasi-static loop needs a stroke below the fold gap
    let (code, _) = run(&["hysteresis", "--config", shipped("tableI_basic").to_str().unwrap(), "--out", out]);
    assert_eq!(code, 1);

    let stiff = dir.path().join("stiff.toml");
    std::fs::write(
        &stiff,
        format!(
            "{TABLE_ONE}[simulation]\nt_end = 0.01\nrtol = 1e-300\natol = 1e-300\n\
             voltage = {{ kind = \"constant\", u = 10.0 }}\n"
        ),
    )
    .unwrap();
    let (code, stderr) = run(&["simulate", "--config", stiff.to_str().unwrap(), "--out", out]);
    assert_eq!(code, 2, "{stderr}");

    let (code, _) = run(&[
        "critical",
        "--config",
        shipped("tableI_basic").to_str().unwrap(),
        "--out",
        "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(code, 3);
}
