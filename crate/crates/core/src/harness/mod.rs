//! Config-driven verification runs with JSON, text and CSV output.
//!
//! A run writes `report.json`, `report.txt` and one CSV per curve into the
//! output directory. Wall-clock timings go to `timing.json`, kept apart so
//! that the report files are a pure function of the config and seed.

mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{merge_json, ExperimentConfig, GraphSpec, Params, Suite, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV};
pub use report::{csv, emit_summary, Check, CsvCell, CutoffRow, GraphInfo, Metrics, Record, Report, Summary, REPORT_VERSION};
pub use suites::{DOMINATION_T_MAX, POIN_SLACK, POIN_STARTS, PROP31_SLACK, TRACE_TOL};

use crate::error::Result;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub exit_code: i32,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// `(file name, CSV content)` pairs.
pub type Curves = Vec<(String, String)>;
/// Wall-clock seconds per suite.
pub type Timing = Vec<(String, f64)>;

/// Builds the graph, runs the selected suites and assembles the report
/// without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Report, Curves, Timing)> {
    cfg.validate()?;
    let g = cfg.graph.build()?;
    let ctx = suites::Ctx { cfg, g: &g };
    let selected = cfg.selected();
    let run_one = |s: &Suite| {
        let start = Instant::now();
        let out = suites::run(*s, &ctx);
        (out, start.elapsed().as_secs_f64())
    };
    let outputs: Vec<_> = if cfg.parallel { selected.par_iter().map(run_one).collect() } else { selected.iter().map(run_one).collect() };

    let mut report = Report {
        version: REPORT_VERSION.into(),
        config: cfg.clone(),
        graph: GraphInfo::of(&g),
        suites: selected.iter().map(|s| s.name().to_string()).collect(),
        checks: Vec::new(),
        records: Vec::new(),
        curves: Vec::new(),
        metrics: Metrics::default(),
        notes: Vec::new(),
        pass: true,
    };
    let mut curves = Vec::new();
    let mut timing = Vec::new();
    for (s, (out, secs)) in selected.iter().zip(outputs) {
        timing.push((s.name().to_string(), secs));
        report.checks.extend(out.checks);
        report.records.extend(out.records);
        for note in out.notes {
            if !report.notes.contains(&note) {
                report.notes.push(note);
            }
        }
        let m = out.metrics;
        if m.hitmix_c_impl.is_some() {
            report.metrics.hitmix_c_impl = m.hitmix_c_impl;
        }
        report.metrics.c_hat_by_excess.extend(m.c_hat_by_excess);
        if m.cutoff.is_some() {
            report.metrics.cutoff = m.cutoff;
        }
        for (name, content) in out.curves {
            report.curves.push(name.clone());
            curves.push((name, content));
        }
    }
    report.pass = report.failures().is_empty();
    Ok((report, curves, timing))
}

/// Runs the configured suites and writes every output file. Errors are
/// configuration or graph-construction problems (exit status 2); failed
/// checks are reported through `exit_code` 1.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (report, curves, timing) = execute(cfg)?;
    let dir = cfg.resolved_output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let mut write = |name: &str, content: &str| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, content)?;
        files.push(path);
        Ok(())
    };
    write("report.json", &report.to_json()?)?;
    write("report.txt", &report.to_text())?;
    for (name, content) in &curves {
        write(name, content)?;
    }
    let timing: serde_json::Map<String, serde_json::Value> = timing.into_iter().map(|(k, v)| (k, v.into())).collect();
    write("timing.json", &serde_json::to_string_pretty(&timing)?)?;
    let exit_code = if report.pass { EXIT_PASS } else { EXIT_CHECK_FAILURE };
    Ok(RunOutcome { report, exit_code, output_dir: dir, files })
}
