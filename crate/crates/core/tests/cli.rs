//! Command-line behaviour: exit codes, stdout CSV and file output.

use std::fs;
use std::process::{Command, Output};

fn qwalk2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk2d"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn zero_steps_prints_single_site() {
    let o = qwalk2d(&["--scheme", "grover", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x,y,p\n0,0,1.000000000000\n");
}

#[test]
fn distribution_rows_sum_to_one() {
    let o = qwalk2d(&["--scheme", "pauli", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<(i64, i64, f64)> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 11 * 11);
    let total: f64 = rows.iter().map(|r| r.2).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["--scheme", "hexagonal"],
        vec![
            "--scheme",
            "grover",
            "--noise",
            "bitflip-axis",
            "--p",
            "0.1",
        ],
        vec![
            "--scheme",
            "alternate",
            "--noise",
            "stateflip",
            "--p",
            "0.1",
        ],
        vec!["--noise", "depolarizing", "--p", "1.5"],
        vec!["--noise", "stateflip", "--k", "5", "--p", "0.1"],
        vec!["--preset", "fig99"],
        vec!["--format", "svg"],
        vec!["--steps", "many"],
    ] {
        let o = qwalk2d(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn missing_config_file_is_an_error() {
    let o = qwalk2d(&["--config", "/nonexistent/run.cfg"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# comment\nscheme = pauli\nsteps = 7\n").unwrap();
    let o = qwalk2d(&["--config", cfg.to_str().unwrap(), "--steps", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x,y,p\n0,0,1.000000000000\n");
}

#[test]
fn series_csv_header_and_rows() {
    let o = qwalk2d(&[
        "--scheme",
        "alternate",
        "--steps",
        "3",
        "--measure",
        "mid_xy",
        "--noise",
        "bitflip-step",
        "--p",
        "0,0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,p,measure,value"));
    assert_eq!(lines.filter(|l| l.contains("mid_xy")).count(), 8);
}

#[test]
fn out_directory_receives_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = qwalk2d(&[
        "--scheme",
        "grover",
        "--steps",
        "3",
        "--measure",
        "distribution,mid_pp",
        "--format",
        "csv,svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "grover_t3_p0_distribution.csv",
            "grover_t3_p0_distribution.svg",
            "grover_t3_series.csv",
            "grover_t3_series.svg"
        ]
    );
    let svg = fs::read_to_string(dir.path().join("grover_t3_series.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn preset_with_shortened_steps() {
    let o = qwalk2d(&["--preset", "fig2", "--steps", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for label in [
        "# fig2_grover_series",
        "# fig2_alternate_series",
        "# fig2_pauli_series",
    ] {
        assert!(text.contains(label), "{label}");
    }
}

#[test]
fn list_presets() {
    let o = qwalk2d(&["--list-presets"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 16);
}
