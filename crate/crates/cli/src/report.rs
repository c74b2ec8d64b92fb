//! Runs suites and writes their reports. All files are written atomically
//! and contain no timings, so two runs with one seed are byte-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Suite};
use crate::error::{CliError, Result};
use crate::suites::{num, run_suite, Check, SuiteOutput, Table};

/// Suite outputs plus the files written for them.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub outputs: Vec<SuiteOutput>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn pass(&self) -> bool {
        self.outputs.iter().all(SuiteOutput::pass)
    }

    pub fn checks(&self) -> impl Iterator<Item = (Suite, &Check)> {
        self.outputs.iter().flat_map(|o| o.checks.iter().map(move |c| (o.suite, c)))
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Writes via a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

fn table_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io { path: PathBuf::from(format!("{}.csv", table.name)), source: e.into_error() })
}

#[derive(Serialize)]
struct SummaryEntry<'a> {
    suite: &'static str,
    #[serde(flatten)]
    check: &'a Check,
}

/// Runs the suites concurrently; outputs come back in the requested order.
pub fn run_suites(cfg: &ExperimentConfig, suites: &[Suite]) -> Result<Vec<SuiteOutput>> {
    suites.par_iter().map(|&s| run_suite(cfg, s)).collect()
}

/// Writes every table, plot and JSON blob plus `summary.csv` and `summary.json`.
pub fn write_outputs(dir: &Path, outputs: &[SuiteOutput]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    for out in outputs {
        for table in &out.tables {
            put(format!("{}.csv", table.name), &table_csv(table)?)?;
        }
        for plot in &out.plots {
            put(format!("{}.svg", plot.name), plot.render().as_bytes())?;
        }
        for (name, value) in &out.json {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            put(format!("{name}.json"), text.as_bytes())?;
        }
    }
    let summary = Table {
        name: "summary".into(),
        header: vec!["suite", "criterion", "check", "measured", "target", "pass"],
        rows: outputs
            .iter()
            .flat_map(|o| {
                o.checks.iter().map(move |c| {
                    vec![
                        o.suite.as_str().to_string(),
                        c.criterion.map(|n| n.to_string()).unwrap_or_default(),
                        c.name.clone(),
                        num(c.measured),
                        c.target.clone(),
                        c.pass.to_string(),
                    ]
                })
            })
            .collect(),
    };
    put("summary.csv".into(), &table_csv(&summary)?)?;
    let entries: Vec<SummaryEntry> =
        outputs.iter().flat_map(|o| o.checks.iter().map(move |check| SummaryEntry { suite: o.suite.as_str(), check })).collect();
    let mut text = serde_json::to_string_pretty(&entries)?;
    text.push('\n');
    put("summary.json".into(), text.as_bytes())?;
    Ok(files)
}

/// Runs `suites` under `cfg` and writes the reports to `cfg.output_dir`.
pub fn run_config(cfg: &ExperimentConfig, suites: &[Suite]) -> Result<RunOutcome> {
    let outputs = run_suites(cfg, suites)?;
    let files = write_outputs(&cfg.output_dir, &outputs)?;
    Ok(RunOutcome { outputs, files })
}
