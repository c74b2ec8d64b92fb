//! Acceptance run: the default config once, one PASS/FAIL line per criterion,
//! then a second run to check the CSVs are byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use kelab_cli::config::{ExperimentConfig, Suite};
use kelab_cli::report::{run_config, RunOutcome};

/// Wall-clock limits in seconds. "Instantaneous" is read as under one second.
const LIMITS: [(u8, f64); 8] = [(1, 10.0), (2, 5.0), (3, 60.0), (4, 120.0), (5, 120.0), (6, 300.0), (7, 300.0), (8, 1.0)];

const TITLES: [&str; 9] = [
    "Eguchi-Hanson volume ratio",
    "decomposition identity",
    "annulus estimate slopes",
    "Ricci potential region slopes",
    "uniform invertibility",
    "IFT gate and Newton",
    "GH convergence",
    "node bound",
    "determinism",
];

fn run(dir: &Path) -> RunOutcome {
    let cfg = ExperimentConfig { output_dir: dir.to_path_buf(), ..ExperimentConfig::default() };
    run_config(&cfg, &Suite::ALL).expect("default config runs")
}

fn csv_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .expect("report dir")
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn main() -> ExitCode {
    let first = tempfile::tempdir().expect("tempdir");
    let second = tempfile::tempdir().expect("tempdir");
    let outcome = run(first.path());

    let mut elapsed: BTreeMap<u8, f64> = BTreeMap::new();
    for out in &outcome.outputs {
        for &(c, secs) in &out.elapsed {
            *elapsed.entry(c).or_default() += secs;
        }
    }

    let mut all = true;
    for (criterion, limit) in LIMITS {
        let checks: Vec<_> = outcome.checks().filter(|(_, c)| c.criterion == Some(criterion)).map(|(_, c)| c).collect();
        let secs = elapsed.get(&criterion).copied().unwrap_or(0.0);
        let failing: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        let pass = !checks.is_empty() && failing.is_empty() && secs < limit;
        all &= pass;
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {criterion}: {verdict}  {} ({} checks, {} failing, {secs:.2} s of {limit} s)",
            TITLES[criterion as usize - 1],
            checks.len(),
            failing.len()
        );
        for c in failing {
            println!("    {}: measured {:.6e}, target {}", c.name, c.measured, c.target);
        }
    }

    run(second.path());
    let (a, b) = (csv_bytes(first.path()), csv_bytes(second.path()));
    let differing: Vec<_> = a.keys().filter(|k| a.get(*k) != b.get(*k)).cloned().collect();
    let pass = !a.is_empty() && a.len() == b.len() && differing.is_empty();
    all &= pass;
    println!(
        "criterion 9: {}  {} ({} csv files compared{})",
        if pass { "PASS" } else { "FAIL" },
        TITLES[8],
        a.len(),
        if differing.is_empty() { String::new() } else { format!(", differing: {}", differing.join(", ")) }
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
