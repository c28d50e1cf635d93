//! Declarative sweep configuration (TOML).
//!
//! ```toml
//! problem = "weighted_maxcut"   # maxcut | weighted_maxcut | maxclique | mincover
//! n_qubits = 10
//! n_instances = 20
//! seed = 1
//! k_max = 500
//!
//! [generator]
//! kind = "regular"              # regular | barabasi_albert | erdos_renyi | files
//! degree = 3                    # regular: degree; barabasi_albert: m; erdos_renyi: p
//!
//! [weights]                     # optional; defaults to [0, 2] for weighted_maxcut
//! lo = 0.0
//! hi = 2.0
//!
//! [[methods]]
//! method = "falqon"             # falqon | falqon_lagged | gdqlc
//! dt = [0.01, 0.05]
//!
//! [[methods]]
//! method = "gdqlc"
//! dt = [0.01]
//! gd_iters = [1, 3, 7]
//! lr_const = [0.1]              # or `eta = [1.0]` for a constant step
//! ```
//!
//! Every `[[methods]]` entry expands to the Cartesian product of its lists.

use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::control::{ControlConfig, GdConfig, LearningRate, Method};
use crate::ising::ProblemKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Regular {
        #[serde(default = "default_three")]
        degree: usize,
    },
    BarabasiAlbert {
        #[serde(default = "default_three")]
        m: usize,
    },
    ErdosRenyi {
        #[serde(default = "default_half")]
        p: f64,
    },
    /// One edge-list file per instance, in order.
    Files { paths: Vec<PathBuf> },
}

fn default_three() -> usize {
    3
}

fn default_half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Falqon,
    FalqonLagged,
    Gdqlc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodGrid {
    pub method: MethodKind,
    pub dt: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gd_iters: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_const: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub n_qubits: usize,
    pub n_instances: usize,
    pub seed: u64,
    pub k_max: usize,
    pub generator: GeneratorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSpec>,
    pub methods: Vec<MethodGrid>,
}

/// One expanded grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodPoint {
    pub label: String,
    pub control: ControlConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Weight interval actually applied to generated graphs.
    pub fn effective_weights(&self) -> Option<WeightSpec> {
        match (self.weights, self.problem) {
            (Some(w), _) => Some(w),
            (None, ProblemKind::WeightedMaxCut) => Some(WeightSpec { lo: 0.0, hi: 2.0 }),
            (None, _) => None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.n_instances == 0 {
            return bad("n_instances must be at least 1".into());
        }
        if self.n_qubits == 0 || self.n_qubits > crate::ising::MAX_QUBITS {
            return bad(format!(
                "n_qubits {} outside 1..={}",
                self.n_qubits,
                crate::ising::MAX_QUBITS
            ));
        }
        if let GeneratorSpec::Files { paths } = &self.generator {
            if paths.len() < self.n_instances {
                return bad(format!(
                    "{} graph files for {} instances",
                    paths.len(),
                    self.n_instances
                ));
            }
        }
        if let Some(w) = self.weights {
            if !(w.lo.is_finite() && w.hi.is_finite() && w.lo <= w.hi) {
                return bad(format!("invalid weight interval [{}, {}]", w.lo, w.hi));
            }
        }
        if self.methods.is_empty() {
            return bad("at least one [[methods]] entry is required".into());
        }
        self.method_points().map(|_| ())
    }

    /// Expands every method grid into labelled control configurations.
    pub fn method_points(&self) -> Result<Vec<MethodPoint>, HarnessError> {
        let mut points = Vec::new();
        for grid in &self.methods {
            if grid.dt.is_empty() {
                return Err(HarnessError::Config(
                    "method grid with empty dt list".into(),
                ));
            }
            let methods: Vec<Method> = match grid.method {
                MethodKind::Falqon | MethodKind::FalqonLagged => {
                    if grid.gd_iters.is_some() || grid.lr_const.is_some() || grid.eta.is_some() {
                        return Err(HarnessError::Config(
                            "gd_iters / lr_const / eta only apply to gdqlc".into(),
                        ));
                    }
                    vec![if grid.method == MethodKind::Falqon {
                        Method::Falqon
                    } else {
                        Method::FalqonLagged
                    }]
                }
                MethodKind::Gdqlc => {
                    let iters = grid.gd_iters.clone().unwrap_or_else(|| vec![7]);
                    let rates: Vec<LearningRate> = match (&grid.lr_const, &grid.eta) {
                        (Some(_), Some(_)) => {
                            return Err(HarnessError::Config(
                                "give either lr_const or eta, not both".into(),
                            ))
                        }
                        (Some(cs), None) => {
                            cs.iter().map(|&c| LearningRate::LogDecay { c }).collect()
                        }
                        (None, Some(es)) => es.iter().map(|&e| LearningRate::Constant(e)).collect(),
                        (None, None) => vec![LearningRate::LogDecay { c: 0.1 }],
                    };
                    iters
                        .iter()
                        .flat_map(|&l_iters| {
                            rates
                                .iter()
                                .map(move |&lr| Method::GdQlc(GdConfig { l_iters, lr }))
                        })
                        .collect()
                }
            };
            for &dt in &grid.dt {
                for &method in &methods {
                    let control = ControlConfig {
                        dt,
                        k_max: self.k_max,
                        method,
                    };
                    control
                        .validate()
                        .map_err(|e| HarnessError::Config(e.to_string()))?;
                    points.push(MethodPoint {
                        label: format!("{}_dt{}", method.label(), dt),
                        control,
                    });
                }
            }
        }
        let mut seen = HashSet::new();
        if let Some(dup) = points.iter().find(|p| !seen.insert(p.label.clone())) {
            return Err(HarnessError::Config(format!(
                "duplicate grid point {}",
                dup.label
            )));
        }
        Ok(points)
    }
}
