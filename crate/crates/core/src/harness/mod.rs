//! Experiment configuration, seeded sweeps, aggregation, and persistence.
//!
//! A sweep directory looks like
//!
//! ```text
//! out_dir/
//!   config.toml                 normalized copy of the input config
//!   summary.csv                 one row per (instance, method point)
//!   aggregate/<label>.csv       per-layer mean/sd of r_A and p
//!   instances/NNNN/graph.txt    edge list
//!   instances/NNNN/<label>.csv  per-layer trace
//! ```
//!
//! An `INCOMPLETE` marker exists while files are being written and is removed
//! last, so a directory without it holds a finished sweep.

pub mod config;
pub mod cost;
pub mod experiment;
pub mod persist;
pub mod verify;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::control::ControlError;
use crate::graph::{write_edge_list, GraphError};

pub use config::{
    ExperimentConfig, GeneratorSpec, MethodGrid, MethodKind, MethodPoint, WeightSpec,
};
pub use cost::{cost_report, expected_evals};
pub use experiment::{
    aggregate, build_graph, build_instance, run_experiment, AggregateRecord, ExperimentResult,
};
pub use persist::{read_aggregate_csv, read_run_csv, write_aggregate_csv, write_run_csv};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "QLC_THREADS";
pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("instance {instance}: {source}")]
    Graph { instance: usize, source: GraphError },
    #[error("instance {instance}: {source}")]
    Run {
        instance: usize,
        source: ControlError,
    },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Installs the global thread pool size from `QLC_THREADS`, if set.
pub fn init_threads_from_env() -> Result<(), HarnessError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            HarnessError::Config(format!("{THREADS_ENV}={value:?} is not a positive integer"))
        })?;
    // A pool that is already initialized keeps its size.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Reads a config file. Relative graph-file paths resolve against the
/// directory containing the config.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let GeneratorSpec::Files { paths } = &mut cfg.generator {
        let base = path.parent().unwrap_or(Path::new(""));
        for p in paths.iter_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, HarnessError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

fn mkdir(path: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

pub fn instance_dir(out_dir: &Path, index: usize) -> PathBuf {
    out_dir.join("instances").join(format!("{index:04}"))
}

/// Runs the sweep in memory, then writes it under `out_dir`. Nothing is
/// written if the sweep itself fails.
pub fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentResult, HarnessError> {
    let result = run_experiment(cfg)?;
    write_sweep(cfg, &result, out_dir)?;
    Ok(result)
}

pub fn write_sweep(
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
    out_dir: &Path,
) -> Result<(), HarnessError> {
    mkdir(out_dir)?;
    let marker = out_dir.join(INCOMPLETE_MARKER);
    fs::write(&marker, b"").map_err(|e| HarnessError::io(&marker, e))?;

    let cfg_path = out_dir.join("config.toml");
    fs::write(&cfg_path, cfg.to_toml()).map_err(|e| HarnessError::io(&cfg_path, e))?;

    let agg_dir = out_dir.join("aggregate");
    mkdir(&agg_dir)?;
    for (point, agg) in result.points.iter().zip(&result.aggregates) {
        write_aggregate_csv(create(&agg_dir.join(format!("{}.csv", point.label)))?, agg)?;
    }

    let mut summary = csv::Writer::from_writer(create(&out_dir.join("summary.csv"))?);
    summary.write_record([
        "instance",
        "seed",
        "label",
        "e_min",
        "degeneracy",
        "layers",
        "final_r_a",
        "final_p",
        "expectation_evals",
    ])?;
    for inst in &result.instances {
        let dir = instance_dir(out_dir, inst.index);
        mkdir(&dir)?;
        let graph_path = dir.join("graph.txt");
        fs::write(&graph_path, write_edge_list(&inst.graph))
            .map_err(|e| HarnessError::io(&graph_path, e))?;
        for (point, rec) in result.points.iter().zip(&inst.runs) {
            write_run_csv(create(&dir.join(format!("{}.csv", point.label)))?, rec)?;
            let last = |v: &[f64]| v.last().map_or(String::new(), f64::to_string);
            summary.write_record([
                inst.index.to_string(),
                inst.seed.to_string(),
                point.label.clone(),
                inst.e_min.to_string(),
                inst.degeneracy.to_string(),
                rec.layers().to_string(),
                last(&rec.r_a),
                last(&rec.p_succ),
                rec.expectation_evals.to_string(),
            ])?;
        }
    }
    summary
        .flush()
        .map_err(|e| HarnessError::io(out_dir.join("summary.csv"), e))?;

    fs::remove_file(&marker).map_err(|e| HarnessError::io(&marker, e))
}

/// Recomputes every aggregate from the per-instance CSVs of a finished sweep.
pub fn reaggregate_from_disk(
    out_dir: &Path,
    points: &[MethodPoint],
    n_instances: usize,
) -> Result<Vec<AggregateRecord>, HarnessError> {
    points
        .iter()
        .map(|point| {
            let runs = (0..n_instances)
                .map(|i| {
                    let path = instance_dir(out_dir, i).join(format!("{}.csv", point.label));
                    let file = fs::File::open(&path).map_err(|e| HarnessError::io(&path, e))?;
                    read_run_csv(file)
                })
                .collect::<Result<Vec<_>, _>>()?;
            aggregate(&runs)
        })
        .collect()
}
