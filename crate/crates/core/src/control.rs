//! Layer-by-layer feedback control of `beta_k`.
//!
//! Both methods grow the circuit one layer at a time from `|+>^n`; each layer is
//! `U_d(beta_k) U_p` with `U_p = exp(-i dt H_p)` and
//! `U_d(beta) = exp(-i dt beta H_d)`.
//!
//! * FALQON: `beta_k = -A(U_p psi_{k-1})`, the feedback measured after the
//!   layer's phase step. This is exactly GD-QLC with `L = 1`, `eta = 1`.
//! * Lagged FALQON: the original form, `beta_1 = 0` and `beta_{k+1} = -A_k` with
//!   `A_k` measured on the finished state `psi_k`.
//! * GD-QLC: at each layer, `L` gradient steps on `Edot(beta) = A(beta) beta`
//!   starting from `beta = 0`, then the candidate with the smallest `Edot` is
//!   appended.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ising::{GroundInfo, IsingError, IsingModel};
use crate::statevector::{StateError, Statevector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("invalid control configuration: {0}")]
    InvalidConfig(String),
    #[error("learning rate undefined for k={k}, l={l}, c={c}")]
    InvalidLearningRate { k: usize, l: usize, c: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Ising(#[from] IsingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearningRate {
    /// `c / (sqrt(l) ln(k + 1))`
    LogDecay { c: f64 },
    /// Fixed step; `Constant(1.0)` with one iteration is the FALQON limit.
    Constant(f64),
}

impl LearningRate {
    pub fn eta(&self, k: usize, l: usize) -> Result<f64, ControlError> {
        match *self {
            LearningRate::LogDecay { c } => learning_rate(k, l, c),
            LearningRate::Constant(eta) => Ok(eta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub l_iters: usize,
    pub lr: LearningRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Falqon,
    FalqonLagged,
    #[serde(rename = "gdqlc")]
    GdQlc(GdConfig),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Falqon => "falqon".into(),
            Method::FalqonLagged => "falqon_lagged".into(),
            Method::GdQlc(GdConfig {
                l_iters,
                lr: LearningRate::LogDecay { c },
            }) => {
                format!("gdqlc_L{l_iters}_c{c}")
            }
            Method::GdQlc(GdConfig {
                l_iters,
                lr: LearningRate::Constant(eta),
            }) => {
                format!("gdqlc_L{l_iters}_eta{eta}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlConfig {
    pub dt: f64,
    pub k_max: usize,
    pub method: Method,
}

impl ControlConfig {
    pub fn falqon(dt: f64, k_max: usize) -> Self {
        Self {
            dt,
            k_max,
            method: Method::Falqon,
        }
    }

    pub fn falqon_lagged(dt: f64, k_max: usize) -> Self {
        Self {
            dt,
            k_max,
            method: Method::FalqonLagged,
        }
    }

    pub fn gdqlc(dt: f64, k_max: usize, l_iters: usize, c: f64) -> Self {
        Self {
            dt,
            k_max,
            method: Method::GdQlc(GdConfig {
                l_iters,
                lr: LearningRate::LogDecay { c },
            }),
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        let bad = |m: String| Err(ControlError::InvalidConfig(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1".into());
        }
        if let Method::GdQlc(gd) = self.method {
            if gd.l_iters == 0 {
                return bad("gd iterations L must be at least 1".into());
            }
            match gd.lr {
                LearningRate::LogDecay { c } if !(c > 0.0 && c.is_finite()) => {
                    return bad(format!("learning-rate constant must be positive, got {c}"));
                }
                LearningRate::Constant(eta) if !eta.is_finite() => {
                    return bad(format!("learning rate must be finite, got {eta}"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// `eta(k, l) = c / (sqrt(l) ln(k + 1))`. The `k + 1` keeps the first layer
/// finite.
pub fn learning_rate(k: usize, l: usize, c: f64) -> Result<f64, ControlError> {
    if k == 0 || l == 0 || !(c > 0.0 && c.is_finite()) {
        return Err(ControlError::InvalidLearningRate { k, l, c });
    }
    Ok(c / ((l as f64).sqrt() * ((k + 1) as f64).ln()))
}

/// One gradient step on `Edot(beta) = A(beta) beta`:
/// `beta (1 + eta dt B) - eta A`.
pub fn gd_update(beta: f64, a_val: f64, b_val: f64, eta: f64, dt: f64) -> f64 {
    beta * (1.0 + eta * dt * b_val) - eta * a_val
}

/// Problem Hamiltonian with its diagonal and ground truth precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub model: IsingModel,
    pub energies: Vec<f64>,
    pub ground: GroundInfo,
}

impl Problem {
    pub fn new(model: IsingModel) -> Result<Self, ControlError> {
        let energies = model.diagonal_energies()?;
        let ground = GroundInfo::from_energies(&energies);
        Ok(Self {
            model,
            energies,
            ground,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.model.n_qubits()
    }
}

/// Per-layer traces of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub beta: Vec<f64>,
    pub a_val: Vec<f64>,
    pub b_val: Vec<f64>,
    pub e_p: Vec<f64>,
    pub r_a: Vec<f64>,
    pub p_succ: Vec<f64>,
    /// Number of measurement-based expectation estimates the method needs:
    /// one `A` per FALQON layer; `L` joint `(A, B)` estimates plus one final
    /// `A` per GD-QLC layer.
    pub expectation_evals: u64,
}

impl RunRecord {
    pub fn layers(&self) -> usize {
        self.beta.len()
    }

    fn push(
        &mut self,
        beta: f64,
        state: &Statevector,
        problem: &Problem,
    ) -> Result<(), ControlError> {
        let obs = state.observables(&problem.energies)?;
        self.beta.push(beta);
        self.a_val.push(obs.a_val);
        self.b_val.push(obs.b_val);
        self.e_p.push(obs.e_p);
        self.r_a.push(obs.e_p / problem.ground.e_min);
        self.p_succ
            .push(state.success_probability(&problem.ground)?);
        Ok(())
    }
}

pub fn run(problem: &Problem, cfg: &ControlConfig) -> Result<RunRecord, ControlError> {
    match cfg.method {
        Method::Falqon => falqon_run(problem, cfg),
        Method::FalqonLagged => falqon_lagged_run(problem, cfg),
        Method::GdQlc(_) => gdqlc_run(problem, cfg),
    }
}

pub fn falqon_run(problem: &Problem, cfg: &ControlConfig) -> Result<RunRecord, ControlError> {
    cfg.validate()?;
    if cfg.method != Method::Falqon {
        return Err(ControlError::InvalidConfig(
            "falqon_run needs method = falqon".into(),
        ));
    }
    let mut state = Statevector::uniform(problem.n_qubits())?;
    let mut record = RunRecord::default();
    for _ in 0..cfg.k_max {
        state.apply_problem_phase(&problem.energies, cfg.dt)?;
        let beta = -state.expval_a(&problem.energies)?;
        record.expectation_evals += 1;
        state.apply_driver(cfg.dt * beta);
        record.push(beta, &state, problem)?;
    }
    Ok(record)
}

pub fn falqon_lagged_run(
    problem: &Problem,
    cfg: &ControlConfig,
) -> Result<RunRecord, ControlError> {
    cfg.validate()?;
    if cfg.method != Method::FalqonLagged {
        return Err(ControlError::InvalidConfig(
            "falqon_lagged_run needs method = falqon_lagged".into(),
        ));
    }
    let mut state = Statevector::uniform(problem.n_qubits())?;
    let mut record = RunRecord::default();
    let mut beta = 0.0;
    for _ in 0..cfg.k_max {
        state.apply_problem_phase(&problem.energies, cfg.dt)?;
        state.apply_driver(cfg.dt * beta);
        record.push(beta, &state, problem)?;
        record.expectation_evals += 1;
        beta = -record.a_val[record.a_val.len() - 1];
    }
    Ok(record)
}

/// One GD candidate: `beta^(l)` with the `A` (and, for the first `L`
/// candidates, `B`) measured after `U_d(beta^(l)) U_p psi_{k-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub beta: f64,
    pub a_val: f64,
    pub b_val: Option<f64>,
    pub edot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerOutcome {
    pub beta_star: f64,
    pub state: Statevector,
    /// `beta^(0) ..= beta^(L)` in iteration order.
    pub candidates: Vec<Candidate>,
    pub expectation_evals: u64,
}

/// Builds layer `k` (1-based) on top of `psi_prev`.
pub fn gdqlc_layer(
    psi_prev: &Statevector,
    k: usize,
    energies: &[f64],
    dt: f64,
    gd: &GdConfig,
) -> Result<LayerOutcome, ControlError> {
    let mut phased = psi_prev.clone();
    phased.apply_problem_phase(energies, dt)?;
    let prepare = |beta: f64| {
        let mut s = phased.clone();
        s.apply_driver(dt * beta);
        s
    };

    let mut candidates = Vec::with_capacity(gd.l_iters + 1);
    let mut evals = 0;
    let mut beta = 0.0;
    for l in 1..=gd.l_iters {
        let obs = prepare(beta).observables(energies)?;
        evals += 1;
        candidates.push(Candidate {
            beta,
            a_val: obs.a_val,
            b_val: Some(obs.b_val),
            edot: obs.a_val * beta,
        });
        beta = gd_update(beta, obs.a_val, obs.b_val, gd.lr.eta(k, l)?, dt);
    }
    let a_last = prepare(beta).expval_a(energies)?;
    evals += 1;
    candidates.push(Candidate {
        beta,
        a_val: a_last,
        b_val: None,
        edot: a_last * beta,
    });

    // First minimum wins; NaN never compares less, so it is never selected.
    let best =
        candidates.iter().skip(1).fold(
            candidates[0],
            |best, c| if c.edot < best.edot { *c } else { best },
        );
    Ok(LayerOutcome {
        beta_star: best.beta,
        state: prepare(best.beta),
        candidates,
        expectation_evals: evals,
    })
}

pub fn gdqlc_run(problem: &Problem, cfg: &ControlConfig) -> Result<RunRecord, ControlError> {
    cfg.validate()?;
    let Method::GdQlc(gd) = cfg.method else {
        return Err(ControlError::InvalidConfig(
            "gdqlc_run needs method = gdqlc".into(),
        ));
    };
    let mut state = Statevector::uniform(problem.n_qubits())?;
    let mut record = RunRecord::default();
    for k in 1..=cfg.k_max {
        let layer = gdqlc_layer(&state, k, &problem.energies, cfg.dt, &gd)?;
        state = layer.state;
        record.expectation_evals += layer.expectation_evals;
        record.push(layer.beta_star, &state, problem)?;
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_uniform_weights, gen_random_regular, Graph};
    use crate::ising::{encode_problem, ProblemKind};

    fn triangle() -> Problem {
        Problem::new(encode_problem(ProblemKind::MaxCut, &Graph::complete(3).unwrap()).unwrap())
            .unwrap()
    }

    fn weighted_six(seed: u64) -> Problem {
        let g = gen_random_regular(6, 3, seed).unwrap();
        let g = assign_uniform_weights(&g, 0.0, 2.0, seed + 1).unwrap();
        Problem::new(encode_problem(ProblemKind::WeightedMaxCut, &g).unwrap()).unwrap()
    }

    #[test]
    fn learning_rate_values() {
        let base = learning_rate(1, 1, 0.1).unwrap();
        assert!((base - 0.1 / 2f64.ln()).abs() < 1e-15);
        assert!((base - 0.144_269_504_088_896_34).abs() < 1e-15);
        assert!((learning_rate(1, 4, 0.1).unwrap() - base / 2.0).abs() < 1e-15);
        for k in 1..50 {
            for l in 1..10 {
                let v = learning_rate(k, l, 0.1).unwrap();
                assert!(learning_rate(k + 1, l, 0.1).unwrap() < v);
                assert!(learning_rate(k, l + 1, 0.1).unwrap() < v);
            }
        }
        assert!(learning_rate(0, 1, 0.1).is_err());
        assert!(learning_rate(1, 0, 0.1).is_err());
        assert!(learning_rate(1, 1, 0.0).is_err());
    }

    #[test]
    fn gd_update_examples() {
        assert!((gd_update(0.0, 0.5, 2.0, 0.1, 0.01) + 0.05).abs() < 1e-15);
        assert_eq!(gd_update(0.0, 0.7, 123.0, 1.0, 0.01), -0.7);
        assert_eq!(gd_update(0.0, 0.0, 5.0, 0.3, 0.01), 0.0);
        assert_eq!(gd_update(2.0, 1.0, 10.0, 0.5, 0.1), 2.0 * 1.5 - 0.5);
    }

    #[test]
    fn config_validation() {
        assert!(ControlConfig::falqon(0.0, 10).validate().is_err());
        assert!(ControlConfig::falqon(0.01, 0).validate().is_err());
        assert!(ControlConfig::gdqlc(0.01, 10, 0, 0.1).validate().is_err());
        assert!(ControlConfig::gdqlc(0.01, 10, 7, -1.0).validate().is_err());
        assert!(ControlConfig::gdqlc(0.01, 10, 7, 0.1).validate().is_ok());
        let p = triangle();
        assert!(falqon_run(&p, &ControlConfig::gdqlc(0.01, 5, 1, 0.1)).is_err());
        assert!(gdqlc_run(&p, &ControlConfig::falqon(0.01, 5)).is_err());
        assert!(falqon_lagged_run(&p, &ControlConfig::falqon(0.01, 5)).is_err());
    }

    #[test]
    fn lagged_falqon_first_layer_is_pure_phase() {
        let p = triangle();
        let rec = falqon_lagged_run(&p, &ControlConfig::falqon_lagged(0.01, 2)).unwrap();
        let mut s = Statevector::uniform(3).unwrap();
        s.apply_problem_phase(&p.energies, 0.01).unwrap();
        let a1 = s.expval_a(&p.energies).unwrap();
        assert_eq!(rec.beta[0], 0.0);
        assert_eq!(rec.a_val[0], a1);
        assert_ne!(a1, 0.0);
        assert_eq!(rec.beta[1], -a1);
        assert_eq!(rec.expectation_evals, 2);
    }

    #[test]
    fn falqon_first_layer_uses_post_phase_feedback() {
        let p = triangle();
        let rec = falqon_run(&p, &ControlConfig::falqon(0.01, 1)).unwrap();
        let mut s = Statevector::uniform(3).unwrap();
        s.apply_problem_phase(&p.energies, 0.01).unwrap();
        assert_eq!(rec.beta[0], -s.expval_a(&p.energies).unwrap());
        s.apply_driver(0.01 * rec.beta[0]);
        assert_eq!(rec.e_p[0], s.expval_hp(&p.energies).unwrap());
    }

    #[test]
    fn falqon_is_gdqlc_single_unit_step() {
        let p = weighted_six(2);
        let f = falqon_run(&p, &ControlConfig::falqon(0.01, 100)).unwrap();
        let gd = GdConfig {
            l_iters: 1,
            lr: LearningRate::Constant(1.0),
        };
        let g = gdqlc_run(
            &p,
            &ControlConfig {
                dt: 0.01,
                k_max: 100,
                method: Method::GdQlc(gd),
            },
        )
        .unwrap();
        assert_eq!(f.beta, g.beta);
        assert_eq!(f.e_p, g.e_p);
    }

    #[test]
    fn falqon_triangle_converges_monotonically() {
        let p = triangle();
        for cfg in [
            ControlConfig::falqon(0.01, 300),
            ControlConfig::falqon_lagged(0.01, 300),
        ] {
            let rec = run(&p, &cfg).unwrap();
            assert_eq!(rec.layers(), 300);
            assert_eq!(rec.expectation_evals, 300);
            for w in rec.e_p.windows(2) {
                assert!(w[1] <= w[0] + 1e-9);
            }
            assert!(
                *rec.r_a.last().unwrap() > 0.99,
                "r_a = {}",
                rec.r_a.last().unwrap()
            );
        }
    }

    #[test]
    fn gdqlc_zero_feedback_is_fixed_point() {
        // Uniform state with zero phase time: A = 0 at beta = 0, so every
        // iterate stays at 0.
        let psi = Statevector::uniform(3).unwrap();
        let gd = GdConfig {
            l_iters: 5,
            lr: LearningRate::LogDecay { c: 0.1 },
        };
        let zero = vec![0.0; 8];
        let out = gdqlc_layer(&psi, 1, &zero, 0.01, &gd).unwrap();
        assert!(out.candidates.iter().all(|c| c.beta == 0.0));
        assert_eq!(out.beta_star, 0.0);
        assert_eq!(out.expectation_evals, 6);
    }

    #[test]
    fn gdqlc_single_step_unit_rate_picks_minus_a() {
        let p = weighted_six(3);
        let mut psi = Statevector::uniform(6).unwrap();
        psi.apply_problem_phase(&p.energies, 0.01).unwrap();
        psi.apply_driver(0.01 * -0.8);
        let gd = GdConfig {
            l_iters: 1,
            lr: LearningRate::Constant(1.0),
        };
        let out = gdqlc_layer(&psi, 2, &p.energies, 0.01, &gd).unwrap();
        let a0 = out.candidates[0].a_val;
        assert_eq!(out.candidates.len(), 2);
        assert_eq!(out.candidates[1].beta, -a0);
        assert!(out.candidates[1].edot <= 0.0);
        assert_eq!(out.beta_star, -a0);
    }

    #[test]
    fn gdqlc_selection_never_ascends() {
        let p = weighted_six(11);
        let gd = GdConfig {
            l_iters: 7,
            lr: LearningRate::LogDecay { c: 0.1 },
        };
        let mut psi = Statevector::uniform(6).unwrap();
        for k in 1..=60 {
            let out = gdqlc_layer(&psi, k, &p.energies, 0.01, &gd).unwrap();
            let chosen = out
                .candidates
                .iter()
                .find(|c| c.beta == out.beta_star)
                .unwrap();
            assert_eq!(out.candidates[0].edot, 0.0);
            assert!(chosen.edot <= 0.0);
            assert!(out
                .candidates
                .iter()
                .all(|c| chosen.edot <= c.edot || c.edot.is_nan()));
            psi = out.state;
        }
    }

    #[test]
    fn gdqlc_counters_and_bounds() {
        let p = weighted_six(5);
        let rec = gdqlc_run(&p, &ControlConfig::gdqlc(0.01, 40, 7, 0.1)).unwrap();
        assert_eq!(rec.layers(), 40);
        assert_eq!(rec.expectation_evals, 40 * 8);
        assert!(rec.e_p.iter().all(|&e| e >= p.ground.e_min - 1e-9));
        assert!(rec.p_succ.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert_eq!(
            rec,
            gdqlc_run(&p, &ControlConfig::gdqlc(0.01, 40, 7, 0.1)).unwrap()
        );
    }

    #[test]
    fn method_labels() {
        assert_eq!(Method::Falqon.label(), "falqon");
        assert_eq!(Method::FalqonLagged.label(), "falqon_lagged");
        assert_eq!(
            ControlConfig::gdqlc(0.01, 1, 7, 0.1).method.label(),
            "gdqlc_L7_c0.1"
        );
    }
}
