use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qlc_core::control::{self, ControlConfig, GdConfig, LearningRate, Method};
use qlc_core::graph::write_edge_list;
use qlc_core::harness::{
    self, build_graph, build_instance, cost_report, verify, ExperimentConfig, GeneratorSpec,
    MethodGrid, MethodKind, WeightSpec,
};
use qlc_core::ProblemKind;

#[derive(Parser)]
#[command(
    name = "qlc",
    version,
    about = "Feedback-based quantum Lyapunov control on a statevector simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method on one instance and write the per-layer trace as CSV.
    Run(RunArgs),
    /// Run a configured sweep over instances and method parameters.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate a graph and print it as an edge list.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run the built-in self-test; exits nonzero on any failure.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Regular3,
    Regular,
    Ba,
    Er,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Falqon,
    FalqonLagged,
    Gdqlc,
}

#[derive(Args)]
struct GraphArgs {
    /// Number of vertices (qubits); inferred from --graph-file when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Read the graph from an edge-list file instead of generating one.
    #[arg(long, conflicts_with = "generator")]
    graph_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "regular3")]
    generator: GeneratorArg,
    /// Degree for `regular`.
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// Attachment count for `ba`.
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Edge probability for `er`.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Draw edge weights uniformly from [lo, hi], e.g. `--weights 0,2`.
    #[arg(long, value_parser = parse_interval)]
    weights: Option<WeightSpec>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "maxcut")]
    problem: ProblemKind,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum, default_value = "falqon")]
    method: MethodArg,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Number of layers K.
    #[arg(long, default_value_t = 500)]
    layers: usize,
    /// Gradient iterations L per layer (gdqlc).
    #[arg(long, default_value_t = 7)]
    gd_iters: usize,
    /// Learning-rate constant c in c / (sqrt(l) ln(k + 1)) (gdqlc).
    #[arg(long, default_value_t = 0.1, conflicts_with = "eta")]
    lr_const: f64,
    /// Fixed learning rate instead of the decaying schedule (gdqlc).
    #[arg(long)]
    eta: Option<f64>,
    /// Shots per expectation estimate used in the cost report.
    #[arg(long, default_value_t = 1000)]
    n_shot: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn parse_interval(s: &str) -> Result<WeightSpec, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(WeightSpec {
        lo: num(lo)?,
        hi: num(hi)?,
    })
}

impl GraphArgs {
    /// A single-instance config, so `run`/`gen` with seed S reproduce
    /// instance 0 of a sweep with master seed S.
    fn to_config(&self, problem: ProblemKind) -> Result<ExperimentConfig> {
        let (generator, n) = match &self.graph_file {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let g = qlc_core::graph::read_edge_list(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                if let Some(n) = self.n.filter(|&n| n != g.n_vertices()) {
                    bail!(
                        "--n {n} disagrees with {} vertices in {}",
                        g.n_vertices(),
                        path.display()
                    );
                }
                (
                    GeneratorSpec::Files {
                        paths: vec![path.clone()],
                    },
                    g.n_vertices(),
                )
            }
            None => {
                let n = self
                    .n
                    .context("--n is required unless --graph-file is given")?;
                let generator = match self.generator {
                    GeneratorArg::Regular3 => GeneratorSpec::Regular { degree: 3 },
                    GeneratorArg::Regular => GeneratorSpec::Regular {
                        degree: self.degree,
                    },
                    GeneratorArg::Ba => GeneratorSpec::BarabasiAlbert { m: self.m },
                    GeneratorArg::Er => GeneratorSpec::ErdosRenyi { p: self.p },
                };
                (generator, n)
            }
        };
        let weights = self.weights;
        let cfg = ExperimentConfig {
            problem,
            n_qubits: n,
            n_instances: 1,
            seed: self.seed,
            k_max: 1,
            generator,
            weights,
            methods: vec![MethodGrid {
                method: MethodKind::Falqon,
                dt: vec![1.0],
                gd_iters: None,
                lr_const: None,
                eta: None,
            }],
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.graph.to_config(args.problem)?;
    let instance = build_instance(&cfg, 0)?;
    let method = match args.method {
        MethodArg::Falqon => Method::Falqon,
        MethodArg::FalqonLagged => Method::FalqonLagged,
        MethodArg::Gdqlc => Method::GdQlc(GdConfig {
            l_iters: args.gd_iters,
            lr: match args.eta {
                Some(eta) => LearningRate::Constant(eta),
                None => LearningRate::LogDecay { c: args.lr_const },
            },
        }),
    };
    let control = ControlConfig {
        dt: args.dt,
        k_max: args.layers,
        method,
    };
    let record = control::run(&instance.problem, &control)?;
    harness::write_run_csv(output(args.out.as_ref())?, &record)?;
    let mut err = io::stderr().lock();
    writeln!(
        err,
        "{} on {} vertices, {} edges: e_min = {}, degeneracy = {}",
        args.problem,
        instance.graph.n_vertices(),
        instance.graph.n_edges(),
        instance.problem.ground.e_min,
        instance.problem.ground.degeneracy()
    )?;
    if let (Some(r), Some(p)) = (record.r_a.last(), record.p_succ.last()) {
        writeln!(err, "final r_A = {r}, p = {p}")?;
    }
    write!(err, "{}", cost_report(&method, &record, args.n_shot))?;
    Ok(())
}

fn cmd_sweep(config: &Path, out_dir: &Path) -> Result<()> {
    let cfg = harness::load_config(config)?;
    let result = harness::run_sweep(&cfg, out_dir)?;
    for (point, agg) in result.points.iter().zip(&result.aggregates) {
        let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
        eprintln!(
            "{:<28} mean r_A = {:.6}  mean p = {:.6}",
            point.label,
            last(&agg.mean_r_a),
            last(&agg.mean_p)
        );
    }
    eprintln!("wrote {}", out_dir.display());
    Ok(())
}

fn cmd_gen(graph: &GraphArgs, out: Option<&PathBuf>) -> Result<()> {
    let cfg = graph.to_config(ProblemKind::MaxCut)?;
    let g = build_graph(&cfg, 0)?;
    output(out)?.write_all(write_edge_list(&g).as_bytes())?;
    Ok(())
}

fn cmd_verify() -> Result<bool> {
    let checks = verify::run_self_test();
    for c in &checks {
        println!(
            "{} {}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(verify::all_passed(&checks))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = harness::init_threads_from_env()
        .map_err(anyhow::Error::from)
        .and_then(|()| match &cli.command {
            Command::Run(args) => cmd_run(args).map(|()| true),
            Command::Sweep { config, out_dir } => cmd_sweep(config, out_dir).map(|()| true),
            Command::Gen { graph, out } => cmd_gen(graph, out.as_ref()).map(|()| true),
            Command::Verify => cmd_verify(),
        });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
