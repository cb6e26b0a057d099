use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ramwalk::chain::{mixing_profile, srw_chain};
use ramwalk::graph::{inflate, write_edge_list};
use ramwalk::harness::{
    emit_summary, merge_json, run_suite, ExperimentConfig, GraphSpec, Report, Suite, EXIT_USAGE,
};
use ramwalk::hitting::{hit_quantile, sphere_hit_distribution, HitSearch, DEFAULT_HIT_HORIZON};
use ramwalk::spectral::{classify_ramanujan, spectrum, SpectrumMode};
use ramwalk::tree::{count_z_paths, diameter_lower_bound, td1_bound_check, tree_kernel, z_escape_probability, z_path_ratio};
use ramwalk::walk::{block_statistics, first_blocks, simulate_walk};
use ramwalk::{Error, Graph};

#[derive(Parser)]
#[command(name = "ramwalk", version, about = "Random walks on regular graphs: mixing, hitting and spectral checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct GraphArgs {
    /// `random`, `lps`, a named family (complete, cycle, hypercube, petersen,
    /// prism) or a path to an edge-list file.
    #[arg(long)]
    graph: Option<String>,
    /// Vertex count for `random`; size parameter for named families.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    /// Minimum girth for `random` graphs (edge switching).
    #[arg(long)]
    girth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GraphArgs {
    fn spec(&self) -> Result<GraphSpec, Error> {
        let name = self.graph.as_deref().ok_or_else(|| usage("--graph is required"))?;
        let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("--graph {name} needs --{flag}")));
        Ok(match name {
            "random" | "random-regular" => GraphSpec::RandomRegular {
                n: need(self.n, "n")?,
                d: need(self.d, "d")?,
                seed: self.seed,
                min_girth: self.girth,
            },
            "lps" => GraphSpec::Lps {
                p: self.p.ok_or_else(|| usage("--graph lps needs --p"))?,
                q: self.q.ok_or_else(|| usage("--graph lps needs --q"))?,
            },
            _ if Path::new(name).exists() => GraphSpec::File { path: PathBuf::from(name) },
            _ => GraphSpec::Named { name: name.into(), params: self.n.into_iter().collect() },
        })
    }

    fn build(&self) -> Result<Graph, Error> {
        self.spec()?.build()
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Dense,
    Iterative,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Spectral,
    Mixing,
    Hitting,
    Inflation,
    Tree,
    Walk,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Spectral => Suite::Spectral,
            SuiteArg::Mixing => Suite::Mixing,
            SuiteArg::Hitting => Suite::Hitting,
            SuiteArg::Inflation => Suite::Inflation,
            SuiteArg::Tree => Suite::Tree,
            SuiteArg::Walk => Suite::Walk,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph and print (or write) its edge list.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace every edge by a path of length k.
    Inflate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum of the simple random walk and Ramanujan classification.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
    /// Worst-start total-variation mixing times.
    Mix {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25])]
        eps: Vec<f64>,
        /// Time horizon.
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
    /// Small-set hitting quantiles and first hitting points of spheres.
    Hit {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Also report the first hitting point of the radius-k sphere.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        /// Enumerate every admissible set (n <= 20).
        #[arg(long)]
        exact: bool,
    },
    /// Walks on the d-regular tree and on Z.
    Tree {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Time for the tree kernel P^t(o, D_k(o)).
        #[arg(long)]
        t: Option<usize>,
        /// Graph size for the diameter lower bound.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value_t = 0.125)]
        c0: f64,
    },
    /// Simulate a walk with regeneration times.
    Walk {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        /// Independent first blocks for regeneration statistics.
        #[arg(long)]
        trials: Option<usize>,
        /// Write the trace as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites and write a report.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, value_delimiter = ',')]
        suite: Vec<SuiteArg>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON config; its values take precedence over flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
    },
    /// Aggregate report.json files.
    Summary {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn print_json(v: &Value) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn default_alpha(g: &Graph) -> f64 {
    1.0 / g.n() as f64
}

fn verify_config(
    graph: &GraphArgs,
    suite: &[SuiteArg],
    params: serde_json::Map<String, Value>,
    out: Option<&Path>,
    config: Option<&Path>,
    parallel: bool,
) -> Result<ExperimentConfig, Error> {
    let mut base = json!({ "seed": graph.seed, "params": params });
    if parallel {
        base["parallel"] = true.into();
    }
    if !suite.is_empty() {
        let names: Vec<Suite> = suite.iter().map(|&s| s.into()).collect();
        base["suites"] = serde_json::to_value(names)?;
    }
    if let Some(dir) = out {
        base["output_dir"] = json!(dir);
    }
    if graph.graph.is_some() {
        base["graph"] = serde_json::to_value(graph.spec()?)?;
    }
    if let Some(path) = config {
        let text = std::fs::read_to_string(path)?;
        let top: Value = serde_json::from_str(&text).map_err(|e| Error::Config {
            field: format!("{}: line {} column {}", path.display(), e.line(), e.column()),
            msg: e.to_string(),
        })?;
        merge_json(&mut base, top);
    }
    if base.get("graph").is_none() {
        return Err(usage("verify needs --graph or a config with a `graph` entry"));
    }
    ExperimentConfig::from_json(&base.to_string())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Gen { graph, out } => {
            let g = graph.build()?;
            write_or_print(out.as_deref(), &write_edge_list(&g))?;
        }
        Command::Inflate { graph, k, out } => {
            let g = inflate(&graph.build()?, k)?;
            write_or_print(out.as_deref(), &write_edge_list(&g))?;
        }
        Command::Spectrum { graph, mode } => {
            let g = graph.build()?;
            let c = srw_chain(&g)?;
            let mode = match mode {
                ModeArg::Dense => SpectrumMode::DenseFull,
                ModeArg::Iterative => SpectrumMode::IterativeExtremal,
                ModeArg::Auto if g.n() <= ramwalk::spectral::DENSE_BUDGET => SpectrumMode::DenseFull,
                ModeArg::Auto => SpectrumMode::IterativeExtremal,
            };
            let s = spectrum(&c, mode)?;
            let class = g.regular_degree().map(|_| classify_ramanujan(&g, &s)).transpose()?;
            print_json(&json!({ "graph": g.provenance().to_string(), "spectrum": s, "ramanujan": class }))?;
        }
        Command::Mix { graph, eps, steps } => {
            let g = graph.build()?;
            let profile = mixing_profile(&srw_chain(&g)?, &eps, steps)?;
            print_json(&json!({ "graph": g.provenance().to_string(), "profile": profile }))?;
        }
        Command::Hit { graph, alpha, eps, k, vertex, exact } => {
            let g = graph.build()?;
            let c = srw_chain(&g)?;
            let alpha = alpha.unwrap_or_else(|| default_alpha(&g));
            let search = if exact { HitSearch::Exact } else { HitSearch::CandidateFamily };
            let q = hit_quantile(&c, alpha, eps, search, DEFAULT_HIT_HORIZON)?;
            let sphere = k.map(|k| sphere_hit_distribution(&g, vertex, k)).transpose()?;
            print_json(&json!({ "graph": g.provenance().to_string(), "hit_quantile": q, "sphere_hit": sphere }))?;
        }
        Command::Tree { d, k, t, n, eps, c0 } => {
            let td1 = td1_bound_check(d, k, c0)?;
            let kernel = t.map(|t| tree_kernel(d, t, k)).transpose()?;
            let diam = n.map(|n| diameter_lower_bound(n, d, eps)).transpose()?;
            print_json(&json!({
                "d": d,
                "k": k,
                "td1": td1,
                "z_paths": count_z_paths(k).to_string(),
                "z_path_ratio": z_path_ratio(k),
                "z_escape_probability": z_escape_probability(k)?,
                "tree_kernel": kernel.map(|p| json!({ "t": t, "probability": p })),
                "diameter_lower_bound": diam,
            }))?;
        }
        Command::Walk { graph, k, steps, vertex, trials, out } => {
            let g = graph.build()?;
            let trace = simulate_walk(&g, vertex, steps, k, graph.seed, 0)?;
            if let Some(path) = &out {
                std::fs::write(path, trace.to_csv())?;
            }
            let stats = trials.map(|n| block_statistics(&first_blocks(&g, vertex, k, n, graph.seed)?)).transpose()?;
            print_json(&json!({
                "graph": trace.graph,
                "start": trace.start,
                "k": k,
                "steps": steps,
                "regenerations": trace.regenerations,
                "block_lengths": trace.block_lengths(),
                "u": trace.u,
                "block_statistics": stats,
            }))?;
        }
        Command::Verify { graph, suite, k, alpha, eps, trials, out, config, parallel } => {
            let mut params = serde_json::Map::new();
            if let Some(k) = k {
                params.insert("k".into(), k.into());
            }
            if let Some(a) = alpha {
                params.insert("alpha".into(), a.into());
            }
            if let Some(e) = eps {
                params.insert("eps".into(), e.into());
            }
            if let Some(t) = trials {
                params.insert("trials".into(), t.into());
            }
            let cfg = verify_config(&graph, &suite, params, out.as_deref(), config.as_deref(), parallel)?;
            let outcome = run_suite(&cfg)?;
            print!("{}", outcome.report.to_text());
            println!("output: {}", outcome.output_dir.display());
            return Ok(outcome.exit_code as u8);
        }
        Command::Summary { reports } => {
            let parsed = reports
                .iter()
                .map(|p| Report::from_json(&std::fs::read_to_string(p)?))
                .collect::<Result<Vec<_>, Error>>()?;
            print_json(&serde_json::to_value(emit_summary(&parsed)?)?)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
