use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_lps, build_named, build_random_regular, build_random_regular_girth, read_edge_list, Graph};
use crate::walk::MIN_BLOCKS;

/// Overrides the configured output directory when set.
pub const OUTPUT_DIR_ENV: &str = "RAMWALK_OUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "ramwalk-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Named {
        name: String,
        #[serde(default)]
        params: Vec<usize>,
    },
    RandomRegular {
        n: usize,
        d: usize,
        #[serde(default)]
        seed: u64,
        /// Build by edge switching until the girth is at least this.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_girth: Option<usize>,
    },
    Lps {
        p: u64,
        q: u64,
    },
    File {
        path: PathBuf,
    },
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSpec::Named { name, params } => build_named(name, params),
            GraphSpec::RandomRegular { n, d, seed, min_girth: None } => build_random_regular(*n, *d, *seed),
            GraphSpec::RandomRegular { n, d, seed, min_girth: Some(g) } => build_random_regular_girth(*n, *d, *g, *seed),
            GraphSpec::Lps { p, q } => build_lps(*p, *q),
            GraphSpec::File { path } => read_edge_list(path),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Spectral,
    Mixing,
    Hitting,
    Inflation,
    Tree,
    Walk,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Spectral, Suite::Mixing, Suite::Hitting, Suite::Inflation, Suite::Tree, Suite::Walk];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Spectral => "spectral",
            Suite::Mixing => "mixing",
            Suite::Hitting => "hitting",
            Suite::Inflation => "inflation",
            Suite::Tree => "tree",
            Suite::Walk => "walk",
            Suite::All => "all",
        }
    }
}

fn default_k() -> usize {
    2
}
fn default_eps() -> f64 {
    0.25
}
fn default_eps_grid() -> Vec<f64> {
    vec![0.1, 0.25, 0.5, 0.75, 0.9]
}
fn default_t_grid() -> Vec<usize> {
    vec![0, 1, 2, 3, 5, 10, 20, 50, 100]
}
fn default_t_max() -> usize {
    10_000
}
fn default_poin_t_max() -> usize {
    100
}
fn default_trials() -> usize {
    10_000
}
fn default_blocks() -> usize {
    10_000
}
fn default_anchors() -> usize {
    4
}
fn default_transfer_t() -> usize {
    12
}
fn default_transfer_s() -> usize {
    6
}
fn default_c0() -> f64 {
    0.125
}
fn default_max_sets() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Regeneration / inflation distance.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Small-set mass; defaults to `max(1/n, (d-1)^(-3k^2))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_eps_grid")]
    pub eps_grid: Vec<f64>,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<usize>,
    /// Horizon for mixing-time searches.
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    /// Horizon of the `4 tv^2 <= l2 <= n lambda^{2t}` sweep.
    #[serde(default = "default_poin_t_max")]
    pub poin_t_max: usize,
    /// Monte Carlo trials per anchor / start.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Independent first blocks for regeneration statistics.
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    #[serde(default = "default_anchors")]
    pub y_anchors: usize,
    #[serde(default = "default_transfer_t")]
    pub transfer_t: usize,
    #[serde(default = "default_transfer_s")]
    pub transfer_s: usize,
    #[serde(default = "default_c0")]
    pub c0: f64,
    /// Cap on candidate sets used for the restricted-eigenvalue bounds.
    #[serde(default = "default_max_sets")]
    pub max_sets: usize,
}

impl Default for Params {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all params have defaults")
    }
}

fn default_suites() -> Vec<Suite> {
    vec![Suite::All]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Run independent suites concurrently; report order is unaffected.
    #[serde(default)]
    pub parallel: bool,
}

fn config_err(field: &str, msg: impl Into<String>) -> Error {
    Error::Config { field: field.into(), msg: msg.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            config_err(&format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if self.suites.is_empty() {
            return Err(config_err("suites", "at least one suite is required"));
        }
        if p.k == 0 {
            return Err(config_err("params.k", "must be at least 1"));
        }
        if let Some(a) = p.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(config_err("params.alpha", format!("{a} is not in (0, 1)")));
            }
        }
        if !(p.eps > 0.0 && p.eps < 1.0) {
            return Err(config_err("params.eps", format!("{} is not in (0, 1)", p.eps)));
        }
        if p.eps_grid.is_empty() {
            return Err(config_err("params.eps_grid", "must be nonempty"));
        }
        if let Some((i, e)) = p.eps_grid.iter().enumerate().find(|(_, e)| !(**e > 0.0 && **e < 1.0)) {
            return Err(config_err(&format!("params.eps_grid[{i}]"), format!("{e} is not in (0, 1)")));
        }
        if p.t_grid.is_empty() {
            return Err(config_err("params.t_grid", "must be nonempty"));
        }
        if p.trials == 0 {
            return Err(config_err("params.trials", "must be positive"));
        }
        if p.blocks < MIN_BLOCKS {
            return Err(config_err("params.blocks", format!("must be at least {MIN_BLOCKS}")));
        }
        if p.c0.is_nan() || p.c0 <= 0.0 {
            return Err(config_err("params.c0", "must be positive"));
        }
        if p.max_sets == 0 {
            return Err(config_err("params.max_sets", "must be positive"));
        }
        Ok(())
    }

    /// Selected suites in canonical order, `all` expanded.
    pub fn selected(&self) -> Vec<Suite> {
        if self.suites.contains(&Suite::All) {
            return Suite::EACH.to_vec();
        }
        Suite::EACH.iter().copied().filter(|s| self.suites.contains(s)).collect()
    }

    /// Output directory after the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        }
    }
}

/// Recursively overlays `top` onto `base`; objects merge key by key, any other
/// value in `top` replaces the one in `base`.
pub fn merge_json(base: &mut serde_json::Value, top: serde_json::Value) {
    match (base, top) {
        (serde_json::Value::Object(b), serde_json::Value::Object(t)) => {
            for (key, value) in t {
                match b.get_mut(&key) {
                    Some(slot) => merge_json(slot, value),
                    None => {
                        b.insert(key, value);
                    }
                }
            }
        }
        (slot, value) => *slot = value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"graph": {"kind": "named", "name": "petersen"}}"#).unwrap();
        assert_eq!(cfg.selected(), Suite::EACH.to_vec());
        assert_eq!(cfg.params.k, 2);
        assert_eq!(cfg.params.eps_grid, default_eps_grid());
        assert_eq!(cfg.graph.build().unwrap().n(), 10);
    }

    #[test]
    fn config_errors_name_the_field() {
        let bad = r#"{"graph": {"kind": "named", "name": "petersen"}, "params": {"eps_grid": [0.5, 1.5]}}"#;
        match ExperimentConfig::from_json(bad) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "params.eps_grid[1]"),
            other => panic!("unexpected {other:?}"),
        }
        let unknown = r#"{"graph": {"kind": "named", "name": "petersen"}, "params": {"kk": 2}}"#;
        assert!(matches!(ExperimentConfig::from_json(unknown), Err(Error::Config { .. })));
        let k0 = r#"{"graph": {"kind": "named", "name": "petersen"}, "params": {"k": 0}}"#;
        assert!(matches!(ExperimentConfig::from_json(k0), Err(Error::Config { field, .. }) if field == "params.k"));
    }

    #[test]
    fn config_round_trips() {
        let cfg = ExperimentConfig::from_json(
            r#"{"graph": {"kind": "random-regular", "n": 20, "d": 3, "seed": 4}, "suites": ["walk", "spectral"], "seed": 9}"#,
        )
        .unwrap();
        assert_eq!(cfg.selected(), vec![Suite::Spectral, Suite::Walk]);
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn merge_overlays_nested_objects() {
        let mut base = serde_json::json!({"params": {"k": 2, "eps": 0.25}, "seed": 1});
        merge_json(&mut base, serde_json::json!({"params": {"k": 3}, "parallel": true}));
        assert_eq!(base, serde_json::json!({"params": {"k": 3, "eps": 0.25}, "seed": 1, "parallel": true}));
    }
}
