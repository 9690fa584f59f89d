//! End-to-end CLI behavior: calculator subcommands, scenario tables, config
//! errors, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hetspec() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hetspec"))
}

fn run(args: &[&str]) -> Output {
    hetspec().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn workspace_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

#[test]
fn limit_reports_the_quantum_floor() {
    let out = run(&["limit", "--wavelength", "1550nm", "--bandwidth", "1MHz"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("-98.9"), "unexpected output: {text}");

    let out = run(&["limit", "--wavelength", "1550nm", "--bandwidth", "20pm"]);
    assert!(stdout(&out).contains("-64.9"), "got: {}", stdout(&out));

    let out = run(&["limit", "--wavelength", "1550nm", "--bandwidth", "0Hz"]);
    let text = stdout(&out);
    assert!(
        text.contains("0.000000e0 W") || text.contains("= 0 W"),
        "got: {text}"
    );
}

#[test]
fn limit_rejects_malformed_units_with_hints() {
    let out = run(&[
        "limit",
        "--wavelength",
        "1550parsecs",
        "--bandwidth",
        "1MHz",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("unknown unit") && err.contains("nm"),
        "got: {err}"
    );
}

#[test]
fn modes_counts_spectral_temporal_modes() {
    let out = run(&["modes", "--bandwidth", "1kHz", "--time", "1s"]);
    assert!(stdout(&out).contains("1.000000e3"), "got: {}", stdout(&out));

    let out = run(&[
        "modes",
        "--bandwidth",
        "1nm",
        "--time",
        "1s",
        "--wavelength",
        "1550nm",
    ]);
    let text = stdout(&out);
    assert!(
        text.contains("1.247835e11") && text.contains("1e11"),
        "got: {text}"
    );

    let out = run(&["modes", "--bandwidth", "1kHz", "--time", "0s"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rescale_reexpresses_sensitivities() {
    let out = run(&[
        "rescale", "--power", "-89dBm", "--from", "0.8fm", "--to", "20pm",
    ]);
    assert!(stdout(&out).contains("-45.02"), "got: {}", stdout(&out));

    let out = run(&[
        "rescale", "--power", "-109dBm", "--from", "0.8fm", "--to", "20pm",
    ]);
    assert!(stdout(&out).contains("-65.02"), "got: {}", stdout(&out));

    let out = run(&[
        "rescale", "--power", "-89dBm", "--from", "0.8fm", "--to", "1MHz",
    ]);
    assert_eq!(out.status.code(), Some(2), "mixed units must be rejected");
}

#[test]
fn sources_renders_the_bundled_survey() {
    let out = run(&["sources", "paper_sec4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("spdc"), "got: {text}");
    assert!(text.contains("not detectable"), "got: {text}");

    let out = run(&["sources", "paper_sec4", "--format", "csv"]);
    let csv = stdout(&out);
    assert!(csv.contains("source,photons_per_mode"), "got: {csv}");
    for needle in ["spdc", "raman", "sfwm", "quantum_dot", "snspd-filtered"] {
        assert!(csv.contains(needle), "{needle} missing from: {csv}");
    }
}

#[test]
fn sources_rejects_an_empty_scenario() {
    let dir = tempdir("empty-scenario");
    let path = dir.join("empty.toml");
    std::fs::write(&path, "").unwrap();
    let out = run(&["sources", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("missing field"),
        "got: {}",
        stderr(&out)
    );
}

#[test]
fn simulate_writes_spectrum_and_record() {
    let dir = tempdir("simulate-run");
    let out = run(&[
        "simulate",
        workspace_file("scenarios/lo_only_floor.toml")
            .to_str()
            .unwrap(),
        "--seed",
        "9",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let csv = std::fs::read_to_string(dir.join("rf_spectrum.csv")).unwrap();
    assert!(csv.starts_with("# hetspec-csv"));
    assert!(csv.contains("# seed: 9"));
    assert!(csv.contains("frequency_hz,power_dbm"));

    // LO-only floor is flat across the sweep.
    let powers: Vec<f64> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("frequency"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(powers.len() > 50);
    let mean = powers.iter().sum::<f64>() / powers.len() as f64;
    for p in &powers {
        assert!((p - mean).abs() < 1.5, "floor not flat: {p} vs mean {mean}");
    }

    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("run_record.json")).unwrap())
            .unwrap();
    assert_eq!(record["master_seed"], 9);
    assert!(record["config_echo"].as_str().unwrap().contains("[lo]"));
}

#[test]
fn simulate_measures_one_photon_per_mode() {
    let dir = tempdir("simulate-measure");
    // Trim the bundled config to fewer trials for test runtime.
    let cfg = std::fs::read_to_string(workspace_file("scenarios/shot_limit_n1.toml"))
        .unwrap()
        .replace("trials = 120", "trials = 40");
    let path = dir.join("n1.toml");
    std::fs::write(&path, cfg).unwrap();

    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("predicted <n> = 1.0000"), "got: {text}");

    let measured: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("measure.json")).unwrap()).unwrap();
    let db = measured["db_above_shot"].as_f64().unwrap();
    assert!((db - 3.0).abs() < 0.5, "measured {db} dB above shot");
}

#[test]
fn simulate_flags_non_shot_limited_runs_with_exit_3() {
    let dir = tempdir("simulate-notshot");
    let cfg = r#"
[run]
reference_wavelength = "1550nm"
sample_rate = "40MHz"
trials = 4

[input]
kind = "dark"

[lo]
power = "1mW"

[detector]
preset = "ideal"
shot_margin_db = 3.0

[esa]
center = "6MHz"
rbw = "1MHz"
per_point = "120us"

[measure]
min_shot_margin_db = 10.0
"#;
    let path = dir.join("notshot.toml");
    std::fs::write(&path, cfg).unwrap();
    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("not shot-noise limited"));
}

#[test]
fn simulate_reports_schema_errors_with_the_key() {
    let dir = tempdir("simulate-badkey");
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        "[run]\nreference_wavelength = \"1550nm\"\nsample_rate = \"40MHz\"\nbogus_key = 1\n\
         [lo]\npower = \"1mW\"\n[detector]\n[esa]\ncenter = \"6MHz\"\nrbw = \"1MHz\"\nper_point = \"120us\"\n",
    )
    .unwrap();
    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus_key"), "got: {}", stderr(&out));
}

#[test]
fn scan_writes_spectrum_osa_and_comparison() {
    let dir = tempdir("scan-run");
    // A small plan keeps the test quick while exercising the full path.
    let plan = r#"
[scan]
start = "1549.9994nm"
stop = "1550.0006nm"
step = "0.05pm"
sample_rate = "24MHz"
dwell = "500us"
trials_per_step = 2

[lo]
power = "1mW"
linewidth = "200kHz"

[detector]
preset = "ideal"

[esa]
center = "6MHz"
rbw = "100kHz"
"#;
    let plan_path = dir.join("plan.toml");
    std::fs::write(&plan_path, plan).unwrap();

    let out = run(&[
        "scan",
        plan_path.to_str().unwrap(),
        workspace_file("scenarios/input_laser_line.toml")
            .to_str()
            .unwrap(),
        "--seed",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("winner: heterodyne"), "got: {text}");

    let scan_csv = std::fs::read_to_string(dir.join("scan.csv")).unwrap();
    assert!(scan_csv.contains("wavelength_nm,power_dbm"));
    assert!(scan_csv.contains("# sideband_convention: single"));
    assert!(std::fs::read_to_string(dir.join("grating_osa.csv"))
        .unwrap()
        .contains("gaussian"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("comparison.json")).unwrap())
            .unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let osa_row = &rows[1];
    let margin = osa_row["margin_db"].as_f64().unwrap();
    assert!(
        (margin - 1.0).abs() < 0.3,
        "OSA margin {margin} dB, expected about 1"
    );
}

#[test]
fn scan_rejects_an_inverted_range() {
    let dir = tempdir("scan-inverted");
    let plan = r#"
[scan]
start = "1550.1nm"
stop = "1549.9nm"
step = "1pm"
sample_rate = "40MHz"
dwell = "50us"

[lo]
power = "1mW"

[detector]

[esa]
center = "6MHz"
rbw = "1MHz"
"#;
    let plan_path = dir.join("plan.toml");
    std::fs::write(&plan_path, plan).unwrap();
    let out = run(&[
        "scan",
        plan_path.to_str().unwrap(),
        workspace_file("scenarios/input_laser_line.toml")
            .to_str()
            .unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("start must be below"),
        "got: {}",
        stderr(&out)
    );
}

#[test]
fn out_dir_env_var_is_honored() {
    let dir = tempdir("env-out");
    let out = hetspec()
        .args([
            "simulate",
            workspace_file("scenarios/lo_only_floor.toml")
                .to_str()
                .unwrap(),
            "--seed",
            "5",
        ])
        .env("HETSPEC_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.join("rf_spectrum.csv").exists());
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hetspec-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
