//! Command-line front end: `run`, `cases`, `min-guard` and `catalog`.
//!
//! Exit codes: 0 success, 1 guard target unreachable, 2 invalid flags,
//! 3 scenario validation failure, 4 I/O failure.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::error::Error as SimError;
use crate::ini::{
    coupling_matrix, expected_ini, min_guard_search, run_monte_carlo, summarize, IniReport,
    IniSummary, FLOOR_DB,
};
use crate::numerology::{
    catalog, MixedScenario, ScenarioConfig, BASE_SCS_KHZ, DEFAULT_N_REF, DEFAULT_TRIALS,
};

pub const CSV_HEADER: [&str; 7] = [
    "case_id",
    "guard_khz",
    "numerology",
    "bin_index",
    "abs_freq_khz",
    "ini_db",
    "trials",
];

/// Normal CP overhead used by the case presets.
pub const CASE_CP_RATIO: f64 = 1.0 / 14.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CasePreset {
    pub case_id: u32,
    pub k: u32,
    pub guards_khz: [u32; 3],
}

/// 15/30 kHz and 15/60 kHz pairs, each with an aligned and a non-aligned guard list.
pub const CASES: [CasePreset; 4] = [
    CasePreset { case_id: 1, k: 1, guards_khz: [0, 180, 360] },
    CasePreset { case_id: 2, k: 1, guards_khz: [15, 195, 375] },
    CasePreset { case_id: 3, k: 2, guards_khz: [0, 180, 360] },
    CasePreset { case_id: 4, k: 2, guards_khz: [45, 225, 405] },
];

#[derive(Debug, Parser)]
#[command(name = "ini-sim", version, about = "Inter-numerology interference simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-subcarrier INI for one (k, CP ratio) over a list of guards.
    Run(RunArgs),
    /// The four two-numerology case presets, one CSV per case.
    Cases(CasesArgs),
    /// Smallest guard meeting a worst-case INI target.
    MinGuard(MinGuardArgs),
    /// Print the NR numerology table.
    Catalog,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Reference transform size N.
    #[arg(long = "n", default_value_t = DEFAULT_N_REF)]
    pub n_ref: usize,
    /// Spacing scale exponent; numerology 2 uses 2^k times the base spacing.
    #[arg(long)]
    pub k: u32,
    /// CP length over useful symbol length, decimal or fraction ("1/14").
    #[arg(long, default_value = "1/14", value_parser = parse_ratio)]
    pub cp_ratio: f64,
    /// Comma-separated guard bands in kHz.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub guards: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON destination.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Use the analytic coupling model instead of Monte Carlo.
    #[arg(long)]
    pub oracle: bool,
    /// Worker threads for the Monte Carlo; output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
}

#[derive(Debug, Args)]
pub struct CasesArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "n", default_value_t = DEFAULT_N_REF)]
    pub n_ref: usize,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
}

#[derive(Debug, Args)]
pub struct MinGuardArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value = "1/14", value_parser = parse_ratio)]
    pub cp_ratio: f64,
    /// Worst-case INI target in dB.
    #[arg(long, allow_negative_numbers = true)]
    pub target_db: f64,
    #[arg(long = "n", default_value_t = DEFAULT_N_REF)]
    pub n_ref: usize,
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|e| format!("{e}"))?;
            let den: f64 = den.trim().parse().map_err(|e| format!("{e}"))?;
            if den == 0.0 {
                return Err("zero denominator".into());
            }
            num / den
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if !value.is_finite() {
        return Err(format!("{s} is not a finite ratio"));
    }
    Ok(value)
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] SimError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("unreachable best={best_db:.3}")]
    Unreachable { best_db: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Unreachable { .. } => 1,
            CliError::Scenario(_) => 3,
            CliError::Io { .. } | CliError::Csv(_) => 4,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Dispatches a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let stdout = io::stdout();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args, &mut stdout.lock()),
        Command::Cases(args) => cmd_cases(&args),
        Command::MinGuard(args) => cmd_min_guard(&args, &mut stdout.lock()),
        Command::Catalog => cmd_catalog(&mut stdout.lock()).map_err(io_err(Path::new("<stdout>"))),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Unreachable { best_db }) => {
            println!("unreachable best={best_db:.3}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn with_threads<T: Send>(threads: Option<u16>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Monte Carlo or analytic report for one scenario.
pub fn evaluate(scenario: &MixedScenario, oracle: bool) -> Result<IniReport, SimError> {
    if oracle {
        expected_ini(&coupling_matrix(scenario), scenario)
    } else {
        run_monte_carlo(scenario)
    }
}

/// Six significant digits, fixed notation; the floor prints as `-200.000`.
pub fn format_db(value: f64) -> String {
    if value == 0.0 {
        return "0.00000".into();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{value:.decimals$}");
    // rounding may carry into a new leading digit, e.g. 9.999999 -> 10.00000
    let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
    if digits.trim_start_matches('0').len() > 6 && decimals > 0 {
        let decimals = decimals - 1;
        format!("{value:.decimals$}")
    } else {
        s
    }
}

#[derive(Debug, Serialize)]
pub struct SummaryRecord {
    pub case_id: u32,
    pub k: u32,
    pub n_ref: usize,
    pub cp_ratio: f64,
    pub guard_khz: u32,
    pub trials: usize,
    pub seed: u64,
    pub oracle: bool,
    #[serde(flatten)]
    pub summary: IniSummary,
}

fn write_rows<W: Write>(
    writer: &mut csv::Writer<W>,
    case_id: u32,
    report: &IniReport,
) -> Result<(), csv::Error> {
    let guard = report.scenario().guard_khz().to_string();
    let case = case_id.to_string();
    for e in report.entries() {
        let db = if e.is_floor() { FLOOR_DB } else { e.ini_db };
        writer.write_record([
            case.as_str(),
            guard.as_str(),
            &e.numerology.to_string(),
            &e.bin_index.to_string(),
            &e.abs_freq_khz.to_string(),
            &format_db(db),
            &e.trials.to_string(),
        ])?;
    }
    Ok(())
}

/// Runs one scenario per guard and returns the reports with their summaries.
fn sweep(
    config: &ScenarioConfig,
    guards: &[u32],
    oracle: bool,
) -> Result<Vec<(IniReport, IniSummary)>, SimError> {
    guards
        .iter()
        .map(|&guard_khz| {
            let scenario = ScenarioConfig {
                guard_khz,
                ..config.clone()
            }
            .build()?;
            let report = evaluate(&scenario, oracle)?;
            let summary = summarize(&report, &scenario);
            Ok((report, summary))
        })
        .collect()
}

fn summary_records(
    case_id: u32,
    config: &ScenarioConfig,
    oracle: bool,
    results: &[(IniReport, IniSummary)],
) -> Vec<SummaryRecord> {
    results
        .iter()
        .map(|(report, summary)| SummaryRecord {
            case_id,
            k: config.k,
            n_ref: config.n_ref,
            cp_ratio: config.cp_ratio,
            guard_khz: report.scenario().guard_khz(),
            trials: if oracle { 0 } else { config.trials },
            seed: config.seed,
            oracle,
            summary: summary.clone(),
        })
        .collect()
}

fn write_json(path: &Path, records: &[SummaryRecord]) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, records).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Ad-hoc run: rows carry `case_id` 0.
pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = ScenarioConfig {
        n_ref: args.n_ref,
        k: args.k,
        cp_ratio: args.cp_ratio,
        guard_khz: 0,
        base_scs_khz: BASE_SCS_KHZ,
        trials: args.trials,
        seed: args.seed,
    };
    // validate every guard before doing any work
    for &guard_khz in &args.guards {
        ScenarioConfig {
            guard_khz,
            ..config.clone()
        }
        .build()?;
    }
    let results = with_threads(args.threads, || sweep(&config, &args.guards, args.oracle))?;

    let mut buf = csv::Writer::from_writer(Vec::new());
    buf.write_record(CSV_HEADER)?;
    for (report, _) in &results {
        write_rows(&mut buf, 0, report)?;
    }
    let bytes = buf.into_inner().map_err(|e| CliError::Io {
        path: PathBuf::from("<csv>"),
        source: e.into_error(),
    })?;
    match &args.out {
        Some(path) => fs::write(path, &bytes).map_err(io_err(path))?,
        None => stdout.write_all(&bytes).map_err(io_err(Path::new("<stdout>")))?,
    }

    if let Some(path) = &args.summary {
        write_json(path, &summary_records(0, &config, args.oracle, &results))?;
    }
    Ok(())
}

/// Writes `case1.csv` .. `case4.csv` and `summary.json` into `out_dir`.
pub fn cmd_cases(args: &CasesArgs) -> Result<(), CliError> {
    fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;
    let mut records = Vec::new();
    for case in CASES {
        let config = ScenarioConfig {
            n_ref: args.n_ref,
            k: case.k,
            cp_ratio: CASE_CP_RATIO,
            guard_khz: 0,
            base_scs_khz: BASE_SCS_KHZ,
            trials: args.trials,
            seed: args.seed,
        };
        let results = with_threads(args.threads, || sweep(&config, &case.guards_khz, false))?;

        let path = args.out_dir.join(format!("case{}.csv", case.case_id));
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut writer = csv::Writer::from_writer(io::BufWriter::new(file));
        writer.write_record(CSV_HEADER)?;
        for (report, _) in &results {
            write_rows(&mut writer, case.case_id, report)?;
        }
        writer.flush().map_err(io_err(&path))?;
        records.extend(summary_records(case.case_id, &config, false, &results));
    }
    write_json(&args.out_dir.join("summary.json"), &records)
}

pub fn cmd_min_guard(args: &MinGuardArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let template = ScenarioConfig {
        n_ref: args.n_ref,
        k: args.k,
        cp_ratio: args.cp_ratio,
        trials: 1,
        ..ScenarioConfig::default()
    }
    .build()?;
    match min_guard_search(&template, args.target_db) {
        Ok(g) => writeln!(stdout, "guard_khz={g}").map_err(io_err(Path::new("<stdout>"))),
        Err(SimError::TargetUnreachable { best_db, .. }) => Err(CliError::Unreachable { best_db }),
        Err(e) => Err(e.into()),
    }
}

fn fmt_cp(entry: &crate::numerology::NumerologyEntry) -> String {
    match entry.extended_cp_dur_us {
        Some(ext) => format!("{:.2} | {:.2}", entry.cp_dur_us, ext),
        None => format!("{:.2}", entry.cp_dur_us),
    }
}

pub fn cmd_catalog(out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<10} {:>7} {:>12} {:>8} {:>10}",
        "freq_range", "scs_khz", "cp_us", "slot_ms", "max_bw_mhz"
    )?;
    for e in catalog() {
        writeln!(
            out,
            "{:<10} {:>7} {:>12} {:>8} {:>10}",
            e.freq_range.to_string(),
            e.scs_khz,
            fmt_cp(e),
            e.slot_ms,
            e.max_bw_mhz
        )?;
    }
    Ok(())
}
