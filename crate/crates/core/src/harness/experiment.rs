//! Seeded instance generation, paired sweeps, and aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GeneratorSpec, MethodPoint};
use super::HarnessError;
use crate::control::{self, Problem, RunRecord};
use crate::graph::{self, Graph};
use crate::ising::encode_problem;
use crate::seed::{derive, instance_seed};

/// Sub-stream of an instance seed used for the graph topology.
pub const TOPOLOGY_STREAM: u64 = 0;
/// Sub-stream of an instance seed used for edge weights.
pub const WEIGHT_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub graph: Graph,
    pub problem: Problem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceResult {
    pub index: usize,
    pub seed: u64,
    pub graph: Graph,
    pub e_min: f64,
    pub degeneracy: usize,
    /// One record per method point, in grid order.
    pub runs: Vec<RunRecord>,
}

/// Per-layer mean and spread over instances for one method point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub mean_r_a: Vec<f64>,
    pub sd_r_a: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub sd_p: Vec<f64>,
}

impl AggregateRecord {
    pub fn layers(&self) -> usize {
        self.mean_r_a.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub points: Vec<MethodPoint>,
    pub instances: Vec<InstanceResult>,
    pub aggregates: Vec<AggregateRecord>,
}

impl ExperimentResult {
    /// Records of method point `point` across all instances.
    pub fn runs_for(&self, point: usize) -> Vec<&RunRecord> {
        self.instances
            .iter()
            .map(|inst| &inst.runs[point])
            .collect()
    }
}

/// The graph for instance `index`, a pure function of the config.
pub fn build_graph(cfg: &ExperimentConfig, index: usize) -> Result<Graph, HarnessError> {
    let seed = instance_seed(cfg.seed, index as u64);
    let topo_seed = derive(seed, TOPOLOGY_STREAM);
    let wrap = |source| HarnessError::Graph {
        instance: index,
        source,
    };
    let g = match &cfg.generator {
        GeneratorSpec::Regular { degree } => {
            graph::gen_random_regular(cfg.n_qubits, *degree, topo_seed)
        }
        GeneratorSpec::BarabasiAlbert { m } => {
            graph::gen_barabasi_albert(cfg.n_qubits, *m, topo_seed)
        }
        GeneratorSpec::ErdosRenyi { p } => graph::gen_erdos_renyi(cfg.n_qubits, *p, topo_seed),
        GeneratorSpec::Files { paths } => {
            let path = &paths[index];
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            let g = graph::read_edge_list(&text).map_err(wrap)?;
            if g.n_vertices() != cfg.n_qubits {
                return Err(HarnessError::Config(format!(
                    "{} has {} vertices but n_qubits = {}",
                    path.display(),
                    g.n_vertices(),
                    cfg.n_qubits
                )));
            }
            Ok(g)
        }
    }
    .map_err(wrap)?;
    match cfg.effective_weights() {
        Some(w) => {
            graph::assign_uniform_weights(&g, w.lo, w.hi, derive(seed, WEIGHT_STREAM)).map_err(wrap)
        }
        None => Ok(g),
    }
}

pub fn build_instance(cfg: &ExperimentConfig, index: usize) -> Result<Instance, HarnessError> {
    let graph = build_graph(cfg, index)?;
    let model = encode_problem(cfg.problem, &graph).map_err(|e| HarnessError::Run {
        instance: index,
        source: e.into(),
    })?;
    let problem = Problem::new(model).map_err(|source| HarnessError::Run {
        instance: index,
        source,
    })?;
    Ok(Instance {
        index,
        seed: instance_seed(cfg.seed, index as u64),
        graph,
        problem,
    })
}

/// Runs every method point on every instance. Each method sees the same
/// instances, so comparisons between points are paired.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let points = cfg.method_points()?;
    let instances: Vec<Instance> = (0..cfg.n_instances)
        .into_par_iter()
        .map(|i| build_instance(cfg, i))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..points.len()).map(move |p| (i, p)))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(i, p)| {
            control::run(&instances[i].problem, &points[p].control).map_err(|source| {
                HarnessError::Run {
                    instance: i,
                    source,
                }
            })
        })
        .collect::<Result<_, _>>()?;

    let mut records = records.into_iter();
    let instances: Vec<InstanceResult> = instances
        .into_iter()
        .map(|inst| InstanceResult {
            index: inst.index,
            seed: inst.seed,
            e_min: inst.problem.ground.e_min,
            degeneracy: inst.problem.ground.degeneracy(),
            graph: inst.graph,
            runs: records.by_ref().take(points.len()).collect(),
        })
        .collect();
    let aggregates = (0..points.len())
        .map(|p| aggregate(instances.iter().map(|inst| &inst.runs[p])))
        .collect::<Result<_, _>>()?;
    Ok(ExperimentResult {
        points,
        instances,
        aggregates,
    })
}

/// Per-layer mean and sample standard deviation (`n - 1` denominator; zero for
/// a single run) of `r_A` and `p` across runs of equal length.
pub fn aggregate<'a, I>(runs: I) -> Result<AggregateRecord, HarnessError>
where
    I: IntoIterator<Item = &'a RunRecord>,
{
    let runs: Vec<&RunRecord> = runs.into_iter().collect();
    let Some(first) = runs.first() else {
        return Ok(AggregateRecord::default());
    };
    let layers = first.layers();
    if runs.iter().any(|r| r.layers() != layers) {
        return Err(HarnessError::Config(
            "cannot aggregate runs of different lengths".into(),
        ));
    }
    let mut agg = AggregateRecord::default();
    for k in 0..layers {
        let (m, s) = mean_sd(runs.iter().map(|r| r.r_a[k]));
        agg.mean_r_a.push(m);
        agg.sd_r_a.push(s);
        let (m, s) = mean_sd(runs.iter().map(|r| r.p_succ[k]));
        agg.mean_p.push(m);
        agg.sd_p.push(s);
    }
    Ok(agg)
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(r_a: &[f64], p: &[f64]) -> RunRecord {
        RunRecord {
            r_a: r_a.to_vec(),
            p_succ: p.to_vec(),
            beta: vec![0.0; r_a.len()],
            ..Default::default()
        }
    }

    #[test]
    fn aggregate_statistics() {
        let a = record(&[0.5, 1.0], &[0.1, 0.2]);
        let b = record(&[0.7, 1.0], &[0.3, 0.2]);
        let agg = aggregate([&a, &b]).unwrap();
        assert_eq!(agg.mean_r_a, vec![0.6, 1.0]);
        assert!((agg.sd_r_a[0] - 0.2f64.hypot(0.0) / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(agg.sd_r_a[1], 0.0);
        assert!((agg.mean_p[0] - 0.2).abs() < 1e-15);

        let single = aggregate([&a]).unwrap();
        assert_eq!(single.sd_p, vec![0.0, 0.0]);
        assert!(aggregate([&a, &record(&[0.5], &[0.1])]).is_err());
    }
}
