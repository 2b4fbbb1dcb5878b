//! Acceptance gate. Every criterion prints one `[PASS]`/`[FAIL]` line.
//!
//! Run with `cargo test -p mixed-numerology --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use mixed_numerology::cli::{cmd_catalog, CASES};
use mixed_numerology::ini::{min_guard_search, FLOOR_DB};
use mixed_numerology::numerology::ScenarioConfig;
use mixed_numerology::rx::grid_error;
use mixed_numerology::{
    build_scenario, coupling_matrix, error_vector, expected_ini, map_bpsk, run_monte_carlo,
    summarize, Error, IniSummary, MixedScenario, NumerologyId, SymbolGrid, Transceiver,
};
use num_complex::Complex64;

fn verdict(id: &str, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id} {name}: {detail}");
    assert!(pass, "{id} {name} failed: {detail}");
}

fn bpsk_grid(scenario: &MixedScenario, id: NumerologyId, seed: usize) -> SymbolGrid {
    let width = scenario.numerology(id).num_active();
    SymbolGrid::new(
        (0..scenario.symbols_per_frame(id))
            .map(|q| {
                let bits: Vec<bool> = (0..width)
                    .map(|i| ((i * 2654435761 + q * 40503 + seed * 97) >> 7) & 1 == 1)
                    .collect();
                map_bpsk(&bits)
            })
            .collect(),
    )
}

#[test]
fn ac1_self_transparency() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in [1, 2] {
        for cp in [0.0, 1.0 / 14.0] {
            let s = build_scenario(256, k, cp, 0, 1, 0).unwrap();
            let trx = Transceiver::new(&s);
            for seed in 0..8 {
                let g1 = bpsk_grid(&s, NumerologyId::One, seed);
                let g2 = bpsk_grid(&s, NumerologyId::Two, seed + 100);
                let z1 = SymbolGrid::silent(&s, NumerologyId::One);
                let z2 = SymbolGrid::silent(&s, NumerologyId::Two);

                let f = trx.build_frame(&g1, &z2).unwrap();
                let e1 = error_vector(&trx.recv_num1(&f).unwrap(), g1.symbol(0)).unwrap();
                let f = trx.build_frame(&z1, &g2).unwrap();
                let e2 = grid_error(&trx.recv_num2(&f).unwrap(), &g2).unwrap();
                worst = e1.iter().chain(e2.iter()).map(|e| e.norm()).fold(worst, f64::max);
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "AC1",
        "self-transparency",
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        &format!("max |error| = {worst:.2e} (<= 1e-10), {elapsed:.2?} (< 1 s)"),
    );
}

#[test]
fn ac2_oracle_equivalence() {
    let start = Instant::now();
    let mut worst_bin = 0.0f64;
    let mut worst_mean = 0.0f64;
    for k in [1, 2] {
        for guard in [0, 180] {
            let s = build_scenario(128, k, 1.0 / 14.0, guard, 2000, 11).unwrap();
            let mc = run_monte_carlo(&s).unwrap();
            let oracle = expected_ini(&coupling_matrix(&s), &s).unwrap();
            assert_eq!(mc.entries().len(), oracle.entries().len());
            let diffs: Vec<f64> = mc
                .entries()
                .iter()
                .zip(oracle.entries())
                .map(|(a, b)| {
                    assert_eq!((a.numerology, a.bin_index), (b.numerology, b.bin_index));
                    a.ini_db - b.ini_db
                })
                .collect();
            worst_bin = diffs.iter().map(|d| d.abs()).fold(worst_bin, f64::max);
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            worst_mean = worst_mean.max(mean.abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "AC2",
        "oracle equivalence",
        worst_bin <= 0.5 && worst_mean <= 0.2 && elapsed < Duration::from_secs(60),
        &format!(
            "max per-bin |MC - oracle| = {worst_bin:.3} dB (<= 0.5), max mean offset = {worst_mean:.3} dB (<= 0.2), {elapsed:.2?} (< 60 s)"
        ),
    );
}

/// Closed-form gains on the 8-point grid, k = 1, no CP.
///
/// A numerology-1 tone on bin `l` is `e^{2πi l n/8}/√8`; a numerology-2 tone
/// on bin `m` of subsymbol `q` is `e^{2πi m (n-4q)/4}/2` on `n ∈ [4q, 4q+4)`.
/// Correlating either against the other receiver's basis leaves a 4-term
/// geometric series `Σ_{n<4} r^n = (1 - r^4)/(1 - r)`.
fn partial_geometric(r: Complex64) -> Complex64 {
    if (r - 1.0).norm() < 1e-14 {
        Complex64::new(4.0, 0.0)
    } else {
        (Complex64::new(1.0, 0.0) - r.powu(4)) / (Complex64::new(1.0, 0.0) - r)
    }
}

fn toy_gain_num2_onto_num1(q: usize, m: usize, l: usize) -> Complex64 {
    let r = Complex64::from_polar(1.0, 2.0 * PI * (2.0 * m as f64 - l as f64) / 8.0);
    let phase = Complex64::from_polar(1.0, -2.0 * PI * (l * 4 * q) as f64 / 8.0);
    phase * partial_geometric(r) / (2.0 * 8f64.sqrt())
}

fn toy_gain_num1_onto_num2(l: usize, q: usize, m: usize) -> Complex64 {
    let r = Complex64::from_polar(1.0, 2.0 * PI * (l as f64 - 2.0 * m as f64) / 8.0);
    let phase = Complex64::from_polar(1.0, 2.0 * PI * (l * 4 * q) as f64 / 8.0);
    phase * partial_geometric(r) / (2.0 * 8f64.sqrt())
}

#[test]
fn ac3_toy_grid_brute_force() {
    // hand value: source num2 (q=0, m=2) onto num1 bin 1 has
    // |gain| = 1 / (2·√8·sin(3π/8)) = 0.1913417...
    assert!((toy_gain_num2_onto_num1(0, 2, 1).norm() - 0.191_341_716_182_544_9).abs() < 1e-12);
    // aligned bins receive nothing without CP
    assert!(toy_gain_num2_onto_num1(1, 3, 2).norm() < 1e-15);

    let s = build_scenario(8, 1, 0.0, 0, 1, 0).unwrap();
    assert_eq!(s.num1().active_bins, 0..4);
    assert_eq!(s.num2().active_bins, 2..4);
    let matrix = coupling_matrix(&s);

    let mut worst = 0.0f64;
    let mut count = 0;
    for (victim, source, gain) in matrix.iter() {
        let want = match victim.numerology {
            NumerologyId::One => toy_gain_num2_onto_num1(source.symbol, source.bin, victim.bin),
            NumerologyId::Two => toy_gain_num1_onto_num2(source.bin, victim.symbol, victim.bin),
        };
        worst = worst.max((gain - want).norm());
        count += 1;
    }
    // 4 num2 slots x 4 num1 bins, both directions
    assert_eq!(count, 32);
    verdict(
        "AC3",
        "toy-grid brute force",
        worst <= 1e-10,
        &format!("{count} gains, max |chain - closed form| = {worst:.2e} (<= 1e-10)"),
    );
}

#[test]
fn ac4_cp_zero_nulls() {
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [1, 2, 3] {
        let s = build_scenario(256, k, 0.0, 0, 100, 4).unwrap();
        for (label, report) in [
            ("mc", run_monte_carlo(&s).unwrap()),
            ("oracle", expected_ini(&coupling_matrix(&s), &s).unwrap()),
        ] {
            let mut nulls = 0;
            let mut live = 0;
            for e in report.numerology(NumerologyId::One) {
                if e.bin_index % s.scale() == 0 {
                    ok &= e.ini_db == FLOOR_DB;
                    nulls += 1;
                } else {
                    ok &= e.ini_db.is_finite() && e.ini_db > FLOOR_DB;
                    live += 1;
                }
            }
            detail.push(format!("k={k} {label}: {nulls} floor / {live} finite"));
        }
    }
    verdict("AC4", "CP-zero nulls", ok, &detail.join(", "));
}

struct CaseRun {
    case_id: u32,
    guards: [u32; 3],
    with_cp: Vec<IniSummary>,
    without_cp: Vec<IniSummary>,
}

struct Fig6 {
    runs: Vec<CaseRun>,
    elapsed: Duration,
}

fn fig6() -> &'static Fig6 {
    static CELL: OnceLock<Fig6> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let runs = CASES
            .iter()
            .map(|case| {
                let summaries = |cp_ratio: f64| -> Vec<IniSummary> {
                    case.guards_khz
                        .iter()
                        .map(|&guard_khz| {
                            let s = ScenarioConfig {
                                n_ref: 256,
                                k: case.k,
                                cp_ratio,
                                guard_khz,
                                trials: 500,
                                seed: 2024,
                                ..ScenarioConfig::default()
                            }
                            .build()
                            .unwrap();
                            summarize(&run_monte_carlo(&s).unwrap(), &s)
                        })
                        .collect()
                };
                CaseRun {
                    case_id: case.case_id,
                    guards: case.guards_khz,
                    with_cp: summaries(1.0 / 14.0),
                    without_cp: summaries(0.0),
                }
            })
            .collect();
        Fig6 {
            runs,
            elapsed: start.elapsed(),
        }
    })
}

const IDS: [NumerologyId; 2] = [NumerologyId::One, NumerologyId::Two];

#[test]
fn ac5_runtime() {
    let f = fig6();
    verdict(
        "AC5",
        "inference suite runtime",
        f.elapsed < Duration::from_secs(120),
        &format!("{:.2?} for 4 cases x 3 guards x 2 CP ratios at 500 trials (< 120 s)", f.elapsed),
    );
}

#[test]
fn ac5a_edge_dominance() {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in &fig6().runs {
        // smallest guard of the case (0 kHz for cases 1 and 3)
        let s = &run.with_cp[0];
        for id in IDS {
            let n = s.numerology(id).unwrap();
            let margin = n.edge_ini_db - n.inner_median_db;
            ok &= margin >= 3.0;
            detail.push(format!("c{} g{} n{id}: {margin:+.1} dB", run.case_id, run.guards[0]));
        }
    }
    verdict("AC5a", "edge >= inner median + 3 dB", ok, &detail.join(", "));
}

#[test]
fn ac5b_guard_monotonicity() {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in &fig6().runs {
        for id in IDS {
            let means: Vec<f64> = run
                .with_cp
                .iter()
                .map(|s| s.numerology(id).unwrap().mean_ini_db)
                .collect();
            ok &= means.windows(2).all(|w| w[1] <= w[0] + 0.1);
            detail.push(format!(
                "c{} n{id}: {}",
                run.case_id,
                means.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>().join(">")
            ));
        }
    }
    verdict("AC5b", "mean INI non-increasing in guard", ok, &detail.join(", "));
}

#[test]
fn ac5c_edge_sensitivity() {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in &fig6().runs {
        for id in IDS {
            let first = run.with_cp.first().unwrap().numerology(id).unwrap();
            let last = run.with_cp.last().unwrap().numerology(id).unwrap();
            let edge_gain = first.edge_ini_db - last.edge_ini_db;
            let median_gain = first.inner_median_db - last.inner_median_db;
            ok &= edge_gain > median_gain;
            detail.push(format!(
                "c{} n{id}: edge {edge_gain:.1} vs median {median_gain:.1} dB",
                run.case_id
            ));
        }
    }
    verdict("AC5c", "guard benefit larger at the edge", ok, &detail.join(", "));
}

#[test]
fn ac5d_cp_adds_interference() {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in &fig6().runs {
        for (i, g) in run.guards.iter().enumerate() {
            let with = run.with_cp[i].num1.as_ref().unwrap().mean_ini_db;
            let without = run.without_cp[i].num1.as_ref().unwrap().mean_ini_db;
            ok &= with > without;
            detail.push(format!("c{} g{g}: {with:.1} > {without:.1}", run.case_id));
        }
    }
    verdict("AC5d", "num1 mean higher with CP", ok, &detail.join(", "));
}

#[test]
fn ac5e_wide_numerology_hit_harder() {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in &fig6().runs {
        for (i, g) in run.guards.iter().enumerate() {
            let s = &run.without_cp[i];
            let gap = s.num2_minus_num1_db.unwrap();
            ok &= gap > 0.0;
            detail.push(format!("c{} g{g}: {gap:+.1} dB", run.case_id));
        }
    }
    verdict("AC5e", "num2 mean > num1 mean at CP 0", ok, &detail.join(", "));
}

#[test]
fn ac5f_residue_structure() {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in &fig6().runs {
        for (i, g) in run.guards.iter().enumerate() {
            let classes: Vec<f64> = run.with_cp[i]
                .residue_class_means
                .iter()
                .map(|c| c.unwrap())
                .collect();
            let margin = classes[1..]
                .iter()
                .map(|c| c - classes[0])
                .fold(f64::INFINITY, f64::min);
            ok &= margin >= 1.0;
            detail.push(format!("c{} g{g}: {margin:+.2} dB", run.case_id));
        }
    }
    verdict(
        "AC5f",
        "residue class 0 lowest by >= 1 dB at CP 1/14",
        ok,
        &detail.join(", "),
    );
}

#[test]
fn ac6_catalog_fidelity() {
    let expected = [
        ["FR1", "15", "4.76", "1", "50"],
        ["FR1", "30", "2.38", "0.5", "100"],
        ["FR1", "60", "1.19 | 4.17", "0.25", "100"],
        ["FR2", "60", "1.19 | 4.17", "0.25", "200"],
        ["FR2", "120", "0.60", "0.125", "400"],
    ];
    let mut out = Vec::new();
    cmd_catalog(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|line| {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            // the dual CP column is three tokens: "1.19 | 4.17"
            let cp_end = tokens.len() - 2;
            vec![
                tokens[0].to_string(),
                tokens[1].to_string(),
                tokens[2..cp_end].join(" "),
                tokens[cp_end].to_string(),
                tokens[cp_end + 1].to_string(),
            ]
        })
        .collect();
    let ok = rows.len() == 5
        && rows
            .iter()
            .zip(expected)
            .all(|(got, want)| got.iter().map(String::as_str).eq(want));
    verdict("AC6", "catalog fidelity", ok, &format!("{} rows", rows.len()));
}

fn run_cases(dir: &Path, threads: Option<&str>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ini-sim"));
    cmd.args(["cases", "--seed", "7", "--out-dir"]).arg(dir);
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let status = cmd.status().unwrap();
    assert!(status.success());
}

#[test]
fn ac7_determinism() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    run_cases(dirs[0].path(), None);
    run_cases(dirs[1].path(), None);
    run_cases(dirs[2].path(), Some("1"));
    let extra = tempfile::tempdir().unwrap();
    run_cases(extra.path(), Some("3"));

    let mut ok = true;
    for case in 1..=4 {
        let name = format!("case{case}.csv");
        let reference = std::fs::read(dirs[0].path().join(&name)).unwrap();
        ok &= !reference.is_empty();
        for d in dirs[1..].iter().map(|d| d.path()).chain([extra.path()]) {
            ok &= std::fs::read(d.join(&name)).unwrap() == reference;
        }
    }
    verdict(
        "AC7",
        "determinism",
        ok,
        "case1..4.csv byte-identical across 2 default runs and 1/3 worker threads",
    );
}

#[test]
fn ac8_min_guard_monotonicity() {
    // loosest first
    let targets = [10.0, 0.0, -2.0, -4.0, -6.0, -8.0, -9.0, -10.0, -10.5, -11.0, -11.5, -13.0];
    let required = |k: u32| -> Vec<Option<u32>> {
        let template = build_scenario(128, k, 1.0 / 14.0, 0, 1, 0).unwrap();
        targets
            .iter()
            .map(|&t| match min_guard_search(&template, t) {
                Ok(g) => Some(g),
                Err(Error::TargetUnreachable { .. }) => None,
                Err(e) => panic!("{e}"),
            })
            .collect()
    };
    // unreachable ranks above every finite guard
    let rank = |g: &Option<u32>| g.unwrap_or(u32::MAX);
    let k1 = required(1);
    let k2 = required(2);
    let looser_needs_less = [&k1, &k2]
        .iter()
        .all(|v| v.windows(2).all(|w| rank(&w[0]) <= rank(&w[1])));
    let wider_needs_more = k1.iter().zip(&k2).all(|(a, b)| rank(a) <= rank(b));
    let show = |v: &[Option<u32>]| {
        v.iter()
            .map(|g| g.map_or("-".to_string(), |g| g.to_string()))
            .collect::<Vec<_>>()
            .join(",")
    };
    verdict(
        "AC8",
        "min-guard monotonicity",
        looser_needs_less && wider_needs_more && k1[0] == Some(0),
        &format!("k=1 [{}], k=2 [{}] kHz", show(&k1), show(&k2)),
    );
}
