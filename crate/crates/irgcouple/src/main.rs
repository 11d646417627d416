use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use irgcouple::canonical::to_canonical_string;
use irgcouple::clock::WallDeadline;
use irgcouple::config::{parse_kernel_arg, parse_rate_arg, parse_scaling_arg};
use irgcouple::experiments::window_json;
use irgcouple::io::{
    format_edge_list, format_weights, read_edge_list, solver_record, write_triple, TripleMeta,
};
use irgcouple::{run_experiment, verify_report, Error, ExperimentConfig, Result};
use irgcouple_core::properties::{
    chromatic_number_exact_with, predict_chromatic_sparse_from_product, predict_quasi_clique_with,
    quasi_clique_number_exact_with, DEFAULT_REFINEMENT_EPSILON,
};
use irgcouple_core::{
    kl_divergence_bernoulli, predict_chromatic_dense_d, sample_coupled_triple, sample_er,
    sample_irg, SolveBudget, UniformStream,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "irgcouple",
    version,
    about = "Coupled inhomogeneous random graph toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an inhomogeneous random graph (or an Erdős–Rényi graph with --er).
    Sample(SampleArgs),
    /// Sample a coupled lower/middle/upper triple into a directory.
    Couple(CoupleArgs),
    /// Chromatic number of an edge-list graph.
    Chromatic(SolveArgs),
    /// γ-quasi-clique number of an edge-list graph.
    QuasiClique {
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        gamma: f64,
    },
    /// Window predictors.
    #[command(subcommand)]
    Predict(PredictCommand),
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args)]
struct StreamArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// constant:p | rank1:scale,exponent | block:PATH | bump:m,peak,width | custom:PATH,m
    #[arg(long, default_value = "constant:0.5")]
    kernel: String,
    /// constant:c | linear:c | power:c,alpha
    #[arg(long, default_value = "constant:1")]
    scaling: String,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    stream: StreamArgs,
    /// Sample G(n, p) instead of the kernel graph.
    #[arg(long)]
    er: Option<f64>,
    /// Edge-list output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the vertex weights.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct CoupleArgs {
    #[command(flatten)]
    stream: StreamArgs,
    /// inverse_log | inverse_log_power:a | fixed:r
    #[arg(long, default_value = "inverse_log")]
    rate: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = SolveBudget::default().node_limit)]
    node_limit: u64,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolveArgs {
    fn budget(&self) -> SolveBudget {
        SolveBudget {
            node_limit: self.node_limit,
            time_limit: self.time_limit,
        }
    }
}

#[derive(Subcommand)]
enum PredictCommand {
    /// Sparse chromatic window from p_max·(n−1).
    Ell {
        #[arg(long, conflicts_with_all = ["p_max", "n"])]
        product: Option<f64>,
        #[arg(long, requires = "n")]
        p_max: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_REFINEMENT_EPSILON)]
        epsilon: f64,
    },
    /// Chromatic window for λ_n = n from the kernel peak.
    D {
        #[arg(long)]
        k_mm: f64,
    },
    /// Quasi-clique scale with coarse and refined windows.
    QuasiClique {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        p_max: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        refined_epsilon: f64,
    },
    /// Bernoulli Kullback–Leibler divergence D(γ, p).
    Kl {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Run a TOML experiment config.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        threads: Option<usize>,
        /// Directory for report.json, trials.csv and plotdata.tsv.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-run a report's config and check the output is byte-identical.
    Verify {
        report: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    print!("{}", to_canonical_string(v)?);
    Ok(())
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Sample(a) => {
            let stream = UniformStream::with_stream(a.stream.seed, a.stream.stream);
            let (g, weights) = match a.er {
                Some(p) => (sample_er(a.stream.n, p, &stream)?, None),
                None => {
                    let k = parse_kernel_arg(&a.stream.kernel)?.build()?;
                    let lambda = parse_scaling_arg(&a.stream.scaling)?.build();
                    let (g, w) = sample_irg(a.stream.n, &k, &lambda, &stream)?;
                    (g, Some(w))
                }
            };
            let text = format_edge_list(&g);
            match &a.out {
                Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e))?,
                None => print!("{text}"),
            }
            if let (Some(path), Some(w)) = (&a.weights, weights) {
                fs::write(path, format_weights(&w)).map_err(|e| Error::io(path, e))?;
            }
            Ok(0)
        }
        Command::Couple(a) => {
            let stream = UniformStream::with_stream(a.stream.seed, a.stream.stream);
            let k = parse_kernel_arg(&a.stream.kernel)?.build()?;
            let lambda = parse_scaling_arg(&a.stream.scaling)?.build();
            let rate = parse_rate_arg(&a.rate)?.build();
            let t = sample_coupled_triple(a.stream.n, &k, &lambda, &rate, &stream)?;
            write_triple(&a.out, &t, k.description())?;
            let meta = TripleMeta::from_triple(&t, k.description());
            print_json(&json!({
                "edges": [t.lower.edge_count(), t.middle.edge_count(), t.upper.edge_count()],
                "heavy_count": meta.heavy_set.len(),
                "p_inf": meta.p_inf,
                "p_max": meta.p_max,
                "sandwich": t.sandwich_holds(),
            }))?;
            Ok(if t.sandwich_holds() { 0 } else { 1 })
        }
        Command::Chromatic(a) => {
            let g = read_edge_list(&a.graph)?;
            let budget = a.budget();
            let start = Instant::now();
            let r = chromatic_number_exact_with(&g, &budget, &WallDeadline::start(&budget));
            print_json(&solver_record(
                "chromatic_number",
                &r,
                Some(start.elapsed().as_secs_f64()),
            ))?;
            Ok(0)
        }
        Command::QuasiClique { solve, gamma } => {
            if !(gamma > 0.0 && gamma <= 1.0) {
                return Err(Error::Config("gamma must lie in (0, 1]".into()));
            }
            let g = read_edge_list(&solve.graph)?;
            let budget = solve.budget();
            let start = Instant::now();
            let r =
                quasi_clique_number_exact_with(&g, gamma, &budget, &WallDeadline::start(&budget));
            let mut rec = solver_record(
                "quasi_clique_number",
                &r,
                Some(start.elapsed().as_secs_f64()),
            );
            rec["gamma"] = json!(gamma);
            print_json(&rec)?;
            Ok(0)
        }
        Command::Predict(p) => {
            let v = match p {
                PredictCommand::Ell {
                    product,
                    p_max,
                    n,
                    epsilon,
                } => {
                    let x = match (product, p_max, n) {
                        (Some(x), _, _) => x,
                        (None, Some(p), Some(n)) if n >= 1 => p * (n - 1) as f64,
                        _ => {
                            return Err(Error::Config("give --product or --p-max with --n".into()))
                        }
                    };
                    window_json(&predict_chromatic_sparse_from_product(x, epsilon)?.1)
                }
                PredictCommand::D { k_mm } => window_json(&predict_chromatic_dense_d(k_mm)?.1),
                PredictCommand::QuasiClique {
                    n,
                    gamma,
                    p_max,
                    epsilon,
                    refined_epsilon,
                } => window_json(&predict_quasi_clique_with(
                    n,
                    gamma,
                    p_max,
                    epsilon,
                    refined_epsilon,
                )?),
                PredictCommand::Kl { gamma, p } => {
                    json!({ "gamma": gamma, "p": p, "divergence": kl_divergence_bernoulli(gamma, p)? })
                }
            };
            print_json(&v)?;
            Ok(0)
        }
        Command::Experiment(ExperimentCommand::Run {
            config,
            seed,
            trials,
            n,
            threads,
            output,
        }) => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            if output.is_some() {
                cfg.output = output;
            }
            let report = run_experiment(&cfg)?;
            match &cfg.output {
                Some(dir) => report.write_all(dir)?,
                None => print!("{}", report.to_json()?),
            }
            for a in &report.assertions {
                eprintln!(
                    "{} {}: {}",
                    if a.passed { "PASS" } else { "FAIL" },
                    a.name,
                    a.detail
                );
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Experiment(ExperimentCommand::Verify { report, threads }) => {
            let text = fs::read_to_string(&report).map_err(|e| Error::io(&report, e))?;
            let v = verify_report(&text, threads)?;
            eprintln!(
                "config hash {}, rerun {}, assertions {}",
                if v.hash_matches { "matches" } else { "differs" },
                if v.identical {
                    "byte-identical"
                } else {
                    "differs"
                },
                if v.passed { "pass" } else { "fail" }
            );
            Ok(if v.hash_matches && v.identical && v.passed {
                0
            } else {
                1
            })
        }
    }
}
