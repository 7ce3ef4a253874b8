use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cclab::exact_prob::{expected_tcomp_sets, Mode, ProbParam};
use cclab::experiments::{figure1_data, parse_config, run_config, write_rows, Format};
use cclab::graph::{sample_gnp, Graph, RngSeed};
use cclab::partitions::{bell, ep_exact, ep_stirling_lower, sp_bounded, sp_general_upper, sp_saddle_upper};
use cclab::scalar::parse_rational;
use cclab::solver::{
    alpha_t_exact, alpha_t_heuristic, chi_t_exact, chi_t_greedy_extraction, chi_t_heuristic, SolverLimits, Status,
};
use cclab::theory::{
    alpha_small_window, alpha_upper_sparse, chi_medium_prediction, chi_small_prediction, classify_sparse_regime,
    first_moment_bound_report, kappa_of_tau, log_b, BoundId, RegimeConfig, DEFAULT_SLACK, KAPPA_DEFAULT_TOL,
};
use cclab::{Error, Result};

/// t-component colouring and stability numbers of random graphs.
#[derive(Parser)]
#[command(name = "cclab", version)]
struct Cli {
    /// Seed for every random choice (decimal u64).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout; a directory for `experiment`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Encoding for tabular output.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Log,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Sp,
    Ep,
    Bell,
    Bounds,
}

#[derive(Args)]
struct Limits {
    /// Stop the exact search after this many nodes.
    #[arg(long)]
    node_budget: Option<u64>,
    /// Stop the exact search after this many seconds.
    #[arg(long)]
    time_budget: Option<f64>,
}

impl Limits {
    fn get(&self) -> SolverLimits {
        SolverLimits { node_budget: self.node_budget, time_budget: self.time_budget.map(Duration::from_secs_f64) }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample G(n, p) and print it as an edge list.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: String,
    },
    /// Maximum t-component set of a graph.
    SolveAlpha {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        #[arg(long)]
        heuristic: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Minimum t-component colouring of a graph.
    SolveChi {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        #[arg(long)]
        heuristic: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Colour by repeatedly extracting t-component sets of size k.
    GreedyColor {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
    },
    /// Every applicable prediction window for alpha_t and chi_t.
    Predict {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: String,
        #[arg(long)]
        t: u64,
        /// Relative slack of the multiplicative windows.
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
    },
    /// Root kappa(tau) of the threshold function.
    Kappa {
        #[arg(long)]
        tau: f64,
    },
    /// Expected number of t-component k-sets in G(n, p).
    Expectation {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: String,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
    },
    /// Exact set-partition counts and their analytic bounds.
    PartitionCount {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "sp")]
        which: Which,
    },
    /// Compare a first-moment bound against the exact expectation.
    BoundsCheck {
        #[arg(long)]
        id: BoundId,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        t: u64,
        #[arg(long)]
        k: u64,
    },
    /// Run a TOML experiment config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Points (tau, kappa(tau)) on the zero curve of the threshold function.
    Figure1 {
        #[arg(long, default_value_t = 0.05)]
        tau_min: f64,
        #[arg(long, default_value_t = 10.0)]
        tau_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
}

fn parse_p(text: &str) -> Result<ProbParam> {
    Ok(ProbParam::Exact(parse_rational(text)?))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse_edge_list(&fs::read_to_string(path)?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn or_error<T: serde::Serialize>(r: Result<T>) -> Value {
    match r {
        Ok(v) => json!(v),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let seed = RngSeed(cli.seed.unwrap_or(0));
    let out = cli.out.as_deref();
    let format: Format = cli.format.map(Format::from).unwrap_or_default();
    match cli.cmd {
        Cmd::Sample { n, p } => {
            let g = sample_gnp(n, parse_p(&p)?.as_f64(), seed)?;
            emit(out, g.to_edge_list().as_bytes())?;
        }
        Cmd::SolveAlpha { graph, t, heuristic, limits, .. } => {
            let g = read_graph(&graph)?;
            let v = if heuristic {
                let (size, witness) = alpha_t_heuristic(&g, t, seed)?;
                json!({ "t": t, "size": size, "witness": witness, "status": Status::Incomplete, "method": "heuristic" })
            } else {
                let r = alpha_t_exact(&g, t, &limits.get())?;
                json!({ "t": t, "size": r.size, "witness": r.witness, "status": r.status, "nodes": r.nodes, "method": "exact" })
            };
            emit_json(out, &v)?;
        }
        Cmd::SolveChi { graph, t, heuristic, limits, .. } => {
            let g = read_graph(&graph)?;
            let v = if heuristic {
                let c = chi_t_heuristic(&g, t, seed)?;
                json!({ "t": t, "num_colors": c.num_colors, "classes": c.classes(), "assignment": c.assignment,
                        "status": Status::Incomplete, "method": "heuristic" })
            } else {
                let r = chi_t_exact(&g, t, &limits.get())?;
                json!({ "t": t, "num_colors": r.num_colors, "classes": r.coloring.classes(),
                        "assignment": r.coloring.assignment, "status": r.status, "lower_bound": r.lower_bound,
                        "method": "exact" })
            };
            emit_json(out, &v)?;
        }
        Cmd::GreedyColor { graph, t, k } => {
            let g = read_graph(&graph)?;
            let r = chi_t_greedy_extraction(&g, t, k, seed)?;
            r.coloring.validate(&g)?;
            emit_json(
                out,
                &json!({ "t": t, "num_colors": r.coloring.num_colors, "classes": r.coloring.classes(),
                         "k_start": r.k_start, "k_final": r.k_final, "extracted_classes": r.extracted_classes,
                         "singleton_fallback": r.singleton_fallback, "threshold": r.threshold, "seed": seed.0 }),
            )?;
        }
        Cmd::Predict { n, p, t, slack } => {
            let p = parse_p(&p)?.as_f64();
            let cfg = RegimeConfig { slack, ..RegimeConfig::default() };
            let lbnp = log_b(n as f64 * p, p);
            let tau = t as f64 / lbnp;
            emit_json(
                out,
                &json!({
                    "n": n, "p": p, "t": t,
                    "alpha_small": or_error(alpha_small_window(n, p, t)),
                    "chi_small": or_error(chi_small_prediction(n, p, t)),
                    "chi_medium": or_error(chi_medium_prediction(n, p, t, slack)),
                    "sparse_regime": or_error(classify_sparse_regime(n, p, t, &cfg)),
                    "alpha_upper_sparse": or_error(alpha_upper_sparse(n, p, tau)),
                }),
            )?;
        }
        Cmd::Kappa { tau } => emit_json(out, &json!(kappa_of_tau::<f64>(tau, KAPPA_DEFAULT_TOL)?))?,
        Cmd::Expectation { n, k, t, p, mode } => {
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Log => Mode::Log,
                ModeArg::Auto => Mode::Auto,
            };
            let r = expected_tcomp_sets(n, k, t, &parse_p(&p)?, mode)?;
            let used = if r.exact_expectation.is_some() { "exact" } else { "log" };
            emit_json(
                out,
                &json!({ "n": n, "k": k, "t": t, "p": r.p, "mode": used, "log_expectation": r.log_expectation,
                         "exact_numerator": r.exact_numerator(), "exact_denominator": r.exact_denominator() }),
            )?;
        }
        Cmd::PartitionCount { t, k, which } => {
            let v = match which {
                Which::Sp => {
                    let c = sp_bounded(t, k)?;
                    json!({ "which": "sp", "t": t, "k": k, "count": c.to_string(), "ln": c.ln() })
                }
                Which::Ep => {
                    let c = ep_exact(t, k)?;
                    json!({ "which": "ep", "t": t, "k": k, "count": c.to_string(), "ln": c.ln() })
                }
                Which::Bell => {
                    let c = bell(k);
                    json!({ "which": "bell", "k": k, "count": c.to_string(), "ln": c.ln() })
                }
                Which::Bounds => {
                    let sp = sp_bounded(t, k)?.ln();
                    let ep = ep_exact(t, k)?.ln();
                    let saddle = sp_saddle_upper::<f64>(t, k).map(|b| b.ln());
                    let stirling = ep_stirling_lower::<f64>(t, k).map(|b| b.ln());
                    json!({
                        "which": "bounds", "t": t, "k": k,
                        "sp_ln": sp, "saddle_upper_ln": or_error(saddle),
                        "saddle_holds": sp_saddle_upper::<f64>(t, k).ok().map(|b| sp <= b.ln()),
                        "ep_ln": ep, "stirling_lower_ln": or_error(stirling),
                        "bell_ln": bell(k).ln(), "general_upper_ln": or_error(sp_general_upper::<f64>(k).map(|b| b.ln())),
                    })
                }
            };
            emit_json(out, &v)?;
        }
        Cmd::BoundsCheck { id, n, p, t, k } => emit_json(out, &json!(first_moment_bound_report(id, n, p, t, k)?))?,
        Cmd::Experiment { config } => {
            let mut cfg = parse_config(&fs::read_to_string(&config)?)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(dir) = cli.out {
                cfg.out_dir = dir;
            }
            if let Some(f) = cli.format {
                cfg.format = f.into();
            }
            let report = run_config(&cfg)?;
            for e in &report.experiments {
                eprintln!("{} {} ({})", if e.passed { "PASS" } else { "FAIL" }, e.id, e.artifact.display());
                for a in e.assertions.iter().filter(|a| !a.passed) {
                    eprintln!("  {}: expected {}, observed {}", a.name, a.expected, a.observed);
                }
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
            return Ok(if report.all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Cmd::Figure1 { tau_min, tau_max, step } => {
            let pts = figure1_data(tau_min, tau_max, step)?;
            let mut buf = Vec::new();
            write_rows(&pts, format, &mut buf)?;
            emit(out, &buf)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::Parameter(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
