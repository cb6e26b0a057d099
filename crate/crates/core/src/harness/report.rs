use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::graph::{girth, Graph};

pub const REPORT_VERSION: &str = "ramwalk-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub provenance: String,
    pub n: usize,
    pub edges: usize,
    pub degree: Option<usize>,
    pub connected: bool,
    pub bipartite: bool,
    pub girth: Option<usize>,
}

impl GraphInfo {
    pub fn of(g: &Graph) -> Self {
        GraphInfo {
            provenance: g.provenance().to_string(),
            n: g.n(),
            edges: g.num_edges(),
            degree: g.regular_degree(),
            connected: g.is_connected(),
            bipartite: g.is_bipartite(),
            girth: girth(g),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub inputs: Value,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub pass: bool,
    /// Unasserted checks are reported but do not affect the exit status.
    pub asserted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub name: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffRow {
    pub graph: String,
    pub n: usize,
    pub eps_low: f64,
    pub eps_high: f64,
    pub t_mix_low: usize,
    pub t_mix_high: usize,
    /// `t_mix(eps_low) / t_mix(eps_high)`
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hitmix_c_impl: Option<f64>,
    /// Largest measured `C-hat` among balls of each tree excess.
    #[serde(default)]
    pub c_hat_by_excess: BTreeMap<usize, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: ExperimentConfig,
    pub graph: GraphInfo,
    pub suites: Vec<String>,
    pub checks: Vec<Check>,
    pub records: Vec<Record>,
    /// CSV files written next to the report.
    pub curves: Vec<String>,
    pub metrics: Metrics,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.asserted && !c.pass).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let found = v.get("version").and_then(Value::as_str).unwrap_or("<missing>");
        if found != REPORT_VERSION {
            return Err(Error::ReportVersion { found: found.into(), expected: REPORT_VERSION.into() });
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let g = &self.graph;
        let _ = writeln!(s, "ramwalk verification report ({})", self.version);
        let _ = writeln!(s, "graph: {}", g.provenance);
        let _ = writeln!(
            s,
            "  n = {}, edges = {}, degree = {}, connected = {}, bipartite = {}, girth = {}",
            g.n,
            g.edges,
            g.degree.map_or("irregular".into(), |d| d.to_string()),
            g.connected,
            g.bipartite,
            g.girth.map_or("none".into(), |d| d.to_string()),
        );
        let _ = writeln!(s, "suites: {}", self.suites.join(", "));
        let _ = writeln!(s, "seed: {}", self.config.seed);
        for note in &self.notes {
            let _ = writeln!(s, "note: {note}");
        }
        let _ = writeln!(s);
        for c in &self.checks {
            let tag = match (c.pass, c.asserted) {
                (true, true) => "PASS",
                (false, true) => "FAIL",
                (true, false) => "ok  ",
                (false, false) => "info",
            };
            let mut line = format!("[{tag}] {}/{}", c.suite, c.name);
            if let Some(l) = c.lhs {
                let _ = write!(line, "  lhs = {l}");
            }
            if let Some(r) = c.rhs {
                let _ = write!(line, "  rhs = {r}");
            }
            if let Some(d) = &c.detail {
                let _ = write!(line, "  ({d})");
            }
            let _ = writeln!(s, "{line}");
        }
        let _ = writeln!(s);
        if let Some(c) = self.metrics.hitmix_c_impl {
            let _ = writeln!(s, "implied hitmix constant: {c}");
        }
        for (excess, c) in &self.metrics.c_hat_by_excess {
            let _ = writeln!(s, "max C-hat at excess {excess}: {c}");
        }
        if let Some(row) = &self.metrics.cutoff {
            let _ = writeln!(
                s,
                "cutoff ratio t_mix({})/t_mix({}) = {}/{} = {}",
                row.eps_low, row.eps_high, row.t_mix_low, row.t_mix_high, row.ratio
            );
        }
        for f in &self.curves {
            let _ = writeln!(s, "curve: {f}");
        }
        let failures = self.failures();
        let _ = writeln!(
            s,
            "result: {} ({} checks, {} asserted failures)",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len(),
            failures.len()
        );
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub reports: usize,
    pub all_pass: bool,
    pub max_hitmix_c_impl: Option<f64>,
    pub max_c_hat_by_excess: BTreeMap<usize, f64>,
    /// Sorted by `n`.
    pub cutoff: Vec<CutoffRow>,
    /// Whether the cutoff ratio is nonincreasing in `n`; reported, not asserted.
    pub cutoff_nonincreasing: Option<bool>,
}

/// Aggregates reports across runs.
pub fn emit_summary(reports: &[Report]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter("no reports to summarize".into()));
    }
    if let Some(r) = reports.iter().find(|r| r.version != REPORT_VERSION) {
        return Err(Error::ReportVersion { found: r.version.clone(), expected: REPORT_VERSION.into() });
    }
    let max_hitmix_c_impl = reports.iter().filter_map(|r| r.metrics.hitmix_c_impl).reduce(f64::max);
    let mut max_c_hat_by_excess: BTreeMap<usize, f64> = BTreeMap::new();
    for r in reports {
        for (&e, &c) in &r.metrics.c_hat_by_excess {
            let slot = max_c_hat_by_excess.entry(e).or_insert(c);
            *slot = slot.max(c);
        }
    }
    let mut cutoff: Vec<CutoffRow> = reports.iter().filter_map(|r| r.metrics.cutoff.clone()).collect();
    cutoff.sort_by(|a, b| a.n.cmp(&b.n).then(a.graph.cmp(&b.graph)));
    let cutoff_nonincreasing = (cutoff.len() >= 2).then(|| cutoff.windows(2).all(|w| w[1].ratio <= w[0].ratio));
    Ok(Summary {
        reports: reports.len(),
        all_pass: reports.iter().all(|r| r.pass),
        max_hitmix_c_impl,
        max_c_hat_by_excess,
        cutoff,
        cutoff_nonincreasing,
    })
}

/// CSV with a header and fixed 17-significant-digit floats.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<CsvCell>>) -> String {
    let mut s = String::new();
    s.push_str(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(|c| c.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Clone, Copy, Debug)]
pub enum CsvCell {
    Int(usize),
    Float(f64),
}

impl std::fmt::Display for CsvCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsvCell::Int(i) => write!(f, "{i}"),
            CsvCell::Float(x) => write!(f, "{x:.16e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_formatting() {
        let s = csv("t,tv", [vec![CsvCell::Int(0), CsvCell::Float(0.9)], vec![CsvCell::Int(1), CsvCell::Float(1.0 / 3.0)]]);
        assert_eq!(s, "t,tv\n0,9.0000000000000002e-1\n1,3.3333333333333331e-1\n");
    }

    #[test]
    fn summary_needs_reports() {
        assert!(emit_summary(&[]).is_err());
    }
}
