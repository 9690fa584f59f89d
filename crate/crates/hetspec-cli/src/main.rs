//! `hetspec` command line: sensitivity-limit and mode-count calculators,
//! source/detector verdict tables, signal-chain simulation, and LO-sweep
//! spectrometer runs.
//!
//! Exit codes: 0 success, 2 usage/configuration error, 3 physics-assumption
//! violation (e.g. a measurement that is not shot-noise limited).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hetspec::config::{
    parse_bandwidth, parse_dbm, parse_frequency_hz, parse_time_s, parse_wavelength, Bandwidth,
    ScanFile, ScanInputFile, ScenarioFile, SimulateFile, PAPER_SEC4_SCENARIO,
};
use hetspec::error::Error;
use hetspec::modes::{
    mode_count, quantum_limit_power, rescale_sensitivity, round_to_sig_figs, ModeWindow,
};
use hetspec::report::{
    comparison_json, comparison_pretty, optical_spectrum_csv, rf_spectrum_csv, scenario_csv,
    scenario_json, scenario_pretty, RunRecord,
};
use hetspec::scan::{compare_sensitivity, grating_osa_emulate, run_scan, SignalScenario};
use hetspec::signal::measure::{measure_photons_per_mode, simulate_spectrum, MeasureConfig};
use hetspec::units::{wavelength_to_frequency, Frequency};

#[derive(Parser)]
#[command(
    name = "hetspec",
    version,
    about = "Heterodyne spectrometer sensitivity toolkit",
    after_help = "Quantities take suffixed units: 1550nm, 20pm, 1MHz, -64dBm, 120us.\n\
                  HETSPEC_OUT_DIR sets the default output directory."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shot-noise detection limit P_min = hν·Δν.
    Limit(LimitArgs),
    /// Spectral-temporal mode count N = Δν·Δt.
    Modes(ModesArgs),
    /// Evaluate a source/detector scenario file into a verdict table.
    Sources(SourcesArgs),
    /// Run the time-domain signal chain and write the RF spectrum.
    Simulate(SimulateArgs),
    /// Sweep the LO across a wavelength range and reconstruct the spectrum.
    Scan(ScanArgs),
    /// Re-express a dBm-per-bandwidth sensitivity on another bandwidth.
    Rescale(RescaleArgs),
}

#[derive(Args)]
struct LimitArgs {
    /// Optical wavelength, e.g. "1550nm" (alternative to --frequency).
    #[arg(long)]
    wavelength: Option<String>,
    /// Optical frequency, e.g. "193.414THz".
    #[arg(long)]
    frequency: Option<String>,
    /// Resolution bandwidth: frequency ("1MHz") or wavelength ("20pm").
    #[arg(long)]
    bandwidth: String,
}

#[derive(Args)]
struct ModesArgs {
    /// Bandwidth: frequency ("1kHz") or wavelength ("1nm").
    #[arg(long)]
    bandwidth: String,
    /// Integration time, e.g. "1s".
    #[arg(long)]
    time: String,
    /// Reference wavelength (needed for wavelength bandwidths).
    #[arg(long)]
    wavelength: Option<String>,
    /// Polarizations counted (1 or 2).
    #[arg(long, default_value_t = 1)]
    polarizations: u8,
}

#[derive(Args)]
struct SourcesArgs {
    /// Scenario file path, or the bundled name "paper_sec4".
    scenario: String,
    /// Output format.
    #[arg(long, default_value = "pretty", value_parser = ["pretty", "csv", "json"])]
    format: String,
    /// Write the table here as well.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation config (TOML).
    config: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for trial parallelism (0 = library default).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory (default: HETSPEC_OUT_DIR or ".").
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Scan plan (TOML).
    plan: PathBuf,
    /// Input description (TOML).
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for step parallelism (0 = library default).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory (default: HETSPEC_OUT_DIR or ".").
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RescaleArgs {
    /// Sensitivity to re-express, e.g. "-89dBm".
    #[arg(long, allow_hyphen_values = true)]
    power: String,
    /// Original reference bandwidth, e.g. "0.8fm".
    #[arg(long)]
    from: String,
    /// Target reference bandwidth, e.g. "20pm".
    #[arg(long)]
    to: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::AssumptionViolation(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("HETSPEC_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn command_echo() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Limit(args) => {
            let nu = optical_frequency(&args.wavelength, &args.frequency)?;
            let bw = bandwidth_hz(&args.bandwidth, &args.wavelength, nu)?;
            let p = quantum_limit_power(nu, Frequency::from_hz(bw)?)?;
            println!("P_min = {:.6e} W = {:.3} dBm", p.watts(), p.dbm());
            Ok(ExitCode::SUCCESS)
        }
        Command::Modes(args) => {
            let dt = parse_time_s(&args.time, "--time")?;
            if !(dt > 0.0) {
                return Err(Error::Config("--time must be > 0".into()));
            }
            let bw = parse_bandwidth(&args.bandwidth, "--bandwidth")?;
            let bw_hz = match bw {
                Bandwidth::Hz(v) => v,
                Bandwidth::Meters(_) => {
                    let lam = args.wavelength.as_deref().ok_or_else(|| {
                        Error::Config(
                            "wavelength bandwidths need --wavelength for the conversion".into(),
                        )
                    })?;
                    bw.hz(parse_wavelength(lam, "--wavelength")?)
                }
            };
            let window =
                ModeWindow::with_polarizations(Frequency::from_hz(bw_hz)?, dt, args.polarizations)?;
            let n = mode_count(&window);
            println!(
                "N = {n:.6e} modes (~{:.0e} to one significant digit)",
                round_to_sig_figs(n, 1)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sources(args) => {
            let text = if args.scenario == "paper_sec4" && !Path::new(&args.scenario).exists() {
                PAPER_SEC4_SCENARIO.to_string()
            } else {
                std::fs::read_to_string(&args.scenario)?
            };
            let table = ScenarioFile::parse(&text)?.evaluate()?;
            let rendered = match args.format.as_str() {
                "csv" => scenario_csv(&table, &command_echo()),
                "json" => scenario_json(&table),
                _ => scenario_pretty(&table),
            };
            print!("{rendered}");
            if let Some(path) = args.output {
                std::fs::write(&path, rendered)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(args) => simulate_cmd(args),
        Command::Scan(args) => scan_cmd(args),
        Command::Rescale(args) => {
            let dbm = parse_dbm(&args.power, "--power")?;
            let from = parse_bandwidth(&args.from, "--from")?;
            let to = parse_bandwidth(&args.to, "--to")?;
            let (from_v, to_v) =
                match (from, to) {
                    (Bandwidth::Hz(a), Bandwidth::Hz(b)) => (a, b),
                    (Bandwidth::Meters(a), Bandwidth::Meters(b)) => (a, b),
                    _ => return Err(Error::Config(
                        "--from and --to must use the same kind of unit (both frequency or both \
                         wavelength)"
                            .into(),
                    )),
                };
            let rescaled = rescale_sensitivity(dbm, from_v, to_v)?;
            println!("{dbm:.2} dBm/{} = {rescaled:.2} dBm/{}", args.from, args.to);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn optical_frequency(
    wavelength: &Option<String>,
    frequency: &Option<String>,
) -> Result<Frequency, Error> {
    match (wavelength, frequency) {
        (Some(w), None) => Ok(wavelength_to_frequency(parse_wavelength(
            w,
            "--wavelength",
        )?)),
        (None, Some(f)) => Frequency::from_hz(parse_frequency_hz(f, "--frequency")?),
        _ => Err(Error::Config(
            "give exactly one of --wavelength or --frequency".into(),
        )),
    }
}

fn bandwidth_hz(bandwidth: &str, wavelength: &Option<String>, nu: Frequency) -> Result<f64, Error> {
    let bw = parse_bandwidth(bandwidth, "--bandwidth")?;
    Ok(match bw {
        Bandwidth::Hz(v) => v,
        Bandwidth::Meters(_) => {
            let lam = match wavelength {
                Some(w) => parse_wavelength(w, "--wavelength")?,
                None => nu.wavelength()?,
            };
            bw.hz(lam)
        }
    })
}

fn run_with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        f()
    } else {
        hetspec::parallel::with_workers(workers, f)
    }
}

fn simulate_cmd(args: SimulateArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let config_text = std::fs::read_to_string(&args.config)?;
    let file = SimulateFile::parse(&config_text)?;
    let (sim, measure) = file.build()?;

    let dir = out_dir(&args.out);
    std::fs::create_dir_all(&dir)?;
    let command = command_echo();

    let spectrum = run_with_workers(args.workers, || simulate_spectrum(&sim, args.seed))?;
    let csv_path = dir.join("rf_spectrum.csv");
    std::fs::write(&csv_path, rf_spectrum_csv(&spectrum, &command))?;
    println!("wrote {}", csv_path.display());
    for w in sim.warnings() {
        eprintln!("warning: {w}");
    }

    let mut record = RunRecord::new(command, config_text, args.seed);
    record.outputs.push(csv_path.display().to_string());

    let mut exit = ExitCode::SUCCESS;
    if let Some(measure_cfg) = measure {
        let result = run_with_workers(args.workers, || {
            measure_photons_per_mode(&MeasureConfig { ..measure_cfg }, args.seed)
        })?;
        println!(
            "measured <n> = {:.4} ({:.3} dB above shot), predicted <n> = {:.4}",
            result.measured_n, result.db_above_shot, result.predicted_n
        );
        println!(
            "signal {:.2} dBm, baseline {:.2} dBm over {} trials",
            result.signal_dbm, result.baseline_dbm, result.trials
        );
        for w in &result.warnings {
            eprintln!("warning: {w}");
        }
        let measure_path = dir.join("measure.json");
        std::fs::write(
            &measure_path,
            serde_json::to_string_pretty(&result).expect("measure result serializes"),
        )?;
        record.outputs.push(measure_path.display().to_string());
        println!("wrote {}", measure_path.display());
        if !result.shot_limited {
            eprintln!("error: measurement is not shot-noise limited");
            exit = ExitCode::from(3);
        }
    }

    record.wall_clock_s = started.elapsed().as_secs_f64();
    let record_path = dir.join("run_record.json");
    record.write_json(&record_path)?;
    println!("wrote {}", record_path.display());
    Ok(exit)
}

fn scan_cmd(args: ScanArgs) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let plan_text = std::fs::read_to_string(&args.plan)?;
    let input_text = std::fs::read_to_string(&args.input)?;
    let plan = ScanFile::parse(&plan_text)?.build()?;
    let input_file = ScanInputFile::parse(&input_text)?;
    let input = input_file.build()?;
    let compare = input_file.compare();

    let dir = out_dir(&args.out);
    std::fs::create_dir_all(&dir)?;
    let command = command_echo();

    let result = run_with_workers(args.workers, || run_scan(&plan, &input, args.seed))?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let scan_path = dir.join("scan.csv");
    std::fs::write(&scan_path, optical_spectrum_csv(&result, &command))?;
    println!("wrote {}", scan_path.display());

    // Grating emulation of the same input for the side-by-side report.
    let true_spectrum = input.true_spectrum();
    let scenario = SignalScenario::from_input(&input);
    let osa_res =
        parse_bandwidth(&compare.osa_resolution, "compare.osa_resolution")?.meters(scenario.center);
    let osa_sens = parse_dbm(&compare.osa_sensitivity, "compare.osa_sensitivity")?;
    let osa = grating_osa_emulate(&true_spectrum, osa_res, osa_sens)?;
    let osa_path = dir.join("grating_osa.csv");
    std::fs::write(&osa_path, optical_spectrum_csv(&osa, &command))?;
    println!("wrote {}", osa_path.display());

    let snspd_bw = parse_bandwidth(
        &compare.snspd_filter_bandwidth,
        "compare.snspd_filter_bandwidth",
    )?
    .meters(scenario.center);
    let report = compare_sensitivity(
        &result,
        &osa,
        compare.snspd_dark_rate_cps,
        snspd_bw,
        &scenario,
    )?;
    print!("{}", comparison_pretty(&report));
    let report_path = dir.join("comparison.json");
    std::fs::write(&report_path, comparison_json(&report))?;
    println!("wrote {}", report_path.display());

    let mut record = RunRecord::new(
        command,
        format!("# plan\n{plan_text}\n# input\n{input_text}"),
        args.seed,
    );
    record.outputs = vec![
        scan_path.display().to_string(),
        osa_path.display().to_string(),
        report_path.display().to_string(),
    ];
    record.wall_clock_s = started.elapsed().as_secs_f64();
    let record_path = dir.join("run_record.json");
    record.write_json(&record_path)?;
    println!("wrote {}", record_path.display());
    Ok(ExitCode::SUCCESS)
}
