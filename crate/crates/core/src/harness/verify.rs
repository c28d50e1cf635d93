//! Built-in self-test, run by `qlc verify`.

use num_complex::Complex64;
use rand::Rng;

use super::cost::expected_evals;
use crate::control::{self, ControlConfig, GdConfig, LearningRate, Method, Problem};
use crate::graph::{self, Graph};
use crate::ising::{encode_problem, IsingModel, ProblemKind};
use crate::oracle;
use crate::seed::rng_from_seed;
use crate::statevector::Statevector;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Statevector::normalized(amps).expect("random state is nonzero")
}

fn random_model(n: usize, rng: &mut impl Rng) -> IsingModel {
    let couplings: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, rng.random_range(-2.0..2.0)))
        .collect();
    let fields: Vec<_> = (0..n).map(|i| (i, rng.random_range(-2.0..2.0))).collect();
    IsingModel::new(n, couplings, fields, rng.random_range(-1.0..1.0)).expect("valid model")
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn unit_3_regular(n: usize, seed: u64) -> Problem {
    let g = graph::gen_random_regular(n, 3, seed).expect("3-regular graph");
    Problem::new(encode_problem(ProblemKind::MaxCut, &g).expect("encodable")).expect("problem")
}

pub fn run_self_test() -> Vec<Check> {
    vec![
        check_kernels(),
        check_commutators(),
        check_gradient(),
        check_encodings(),
        check_lyapunov(),
        check_falqon_reduction(),
        check_norm(),
        check_costs(),
        check_edge_list(),
    ]
}

fn check_kernels() -> Check {
    let mut rng = rng_from_seed(11);
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for _ in 0..5 {
            let model = random_model(n, &mut rng);
            let energies = model.diagonal_energies().expect("small model");
            let psi = random_state(n, &mut rng);
            let (dt, theta) = (rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0));

            let up = oracle::ising_hamiltonian(&model)
                .scaled(Complex64::new(0.0, -dt))
                .expm();
            let mut fast = psi.clone();
            fast.apply_problem_phase(&energies, dt).expect("dims match");
            worst = worst.max(max_diff(fast.amplitudes(), &up.apply(psi.amplitudes())));

            let ud = oracle::driver(n).scaled(Complex64::new(0.0, -theta)).expm();
            let mut fast = psi.clone();
            fast.apply_driver(theta);
            worst = worst.max(max_diff(fast.amplitudes(), &ud.apply(psi.amplitudes())));
        }
    }
    Check::new(
        "unitaries match dense oracle",
        worst < 1e-12,
        format!("max deviation {worst:.3e}"),
    )
}

fn check_commutators() -> Check {
    let mut rng = rng_from_seed(12);
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for _ in 0..5 {
            let energies = random_model(n, &mut rng)
                .diagonal_energies()
                .expect("small model");
            let psi = random_state(n, &mut rng);
            let (a, b) = oracle::dense_commutator_expectations(psi.amplitudes(), &energies);
            let obs = psi.observables(&energies).expect("dims match");
            worst = worst
                .max((obs.a_val - a.re).abs())
                .max((obs.b_val - b.re).abs());
        }
    }
    Check::new(
        "A and B match dense commutators",
        worst < 1e-10,
        format!("max deviation {worst:.3e}"),
    )
}

fn check_gradient() -> Check {
    let mut rng = rng_from_seed(13);
    let (mut worst, h): (f64, f64) = (0.0, 1e-5);
    for n in 2..=5 {
        let energies = random_model(n, &mut rng)
            .diagonal_energies()
            .expect("small model");
        let phi = random_state(n, &mut rng);
        let dt = rng.random_range(0.01..0.2);
        let beta = rng.random_range(-1.0..1.0);
        let a_at = |b: f64| {
            let mut s = phi.clone();
            s.apply_driver(dt * b);
            s.expval_a(&energies).expect("dims match")
        };
        let mut s = phi.clone();
        s.apply_driver(dt * beta);
        let obs = s.observables(&energies).expect("dims match");
        let fd_a = (a_at(beta + h) - a_at(beta - h)) / (2.0 * h);
        let fd_edot = ((beta + h) * a_at(beta + h) - (beta - h) * a_at(beta - h)) / (2.0 * h);
        let want_edot = obs.a_val - beta * dt * obs.b_val;
        let scale = |x: f64| x.abs().max(1.0);
        worst = worst
            .max((fd_a + dt * obs.b_val).abs() / scale(dt * obs.b_val))
            .max((fd_edot - want_edot).abs() / scale(want_edot));
    }
    Check::new(
        "dA/dbeta = -dt B by finite differences",
        worst < 1e-5,
        format!("max relative error {worst:.3e}"),
    )
}

fn check_encodings() -> Check {
    // Petersen graph: max cut 12, max clique 2, min vertex cover 6.
    let petersen = Graph::unweighted(
        10,
        [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 0),
            (0, 5),
            (1, 6),
            (2, 7),
            (3, 8),
            (4, 9),
            (5, 7),
            (7, 9),
            (9, 6),
            (6, 8),
            (8, 5),
        ],
    )
    .expect("valid graph");
    let ground = |kind| encode_problem(kind, &petersen).and_then(|m| m.ground_info());
    let (cut, clique, cover) = (
        ground(ProblemKind::MaxCut),
        ground(ProblemKind::MaxClique),
        ground(ProblemKind::MinCover),
    );
    let is_clique = |b: usize| {
        (0..10).all(|i| {
            (i + 1..10).all(|j| b >> i & 1 == 0 || b >> j & 1 == 0 || petersen.has_edge(i, j))
        })
    };
    let is_cover = |b: usize| {
        petersen
            .edges()
            .iter()
            .all(|e| b >> e.u & 1 == 1 || b >> e.v & 1 == 1)
    };
    let all = |g: &Result<crate::ising::GroundInfo, _>, size: u32, ok: &dyn Fn(usize) -> bool| matches!(g, Ok(g) if g.optimal_states.iter().all(|&b| b.count_ones() == size && ok(b)));
    let passed = matches!(&cut, Ok(g) if (g.e_min + 12.0).abs() < 1e-9)
        && all(&clique, 2, &is_clique)
        && all(&cover, 6, &is_cover);
    let count = |g: &Result<crate::ising::GroundInfo, _>| g.as_ref().map_or(0, |g| g.degeneracy());
    Check::new(
        "problem encodings on the Petersen graph",
        passed,
        format!(
            "optimal states: cut {}, clique {}, cover {}",
            count(&cut),
            count(&clique),
            count(&cover)
        ),
    )
}

fn check_lyapunov() -> Check {
    let cfg = ControlConfig::falqon(0.01, 300);
    let mut worst: f64 = 0.0;
    for seed in 0..3 {
        let problem = unit_3_regular(8, seed);
        let Ok(rec) = control::run(&problem, &cfg) else {
            return Check::new(
                "FALQON energy is non-increasing",
                false,
                "run failed".into(),
            );
        };
        let mut prev = Statevector::uniform(8)
            .and_then(|s| s.expval_hp(&problem.energies))
            .unwrap_or(f64::NAN);
        for &e in &rec.e_p {
            worst = worst.max(e - prev);
            prev = e;
        }
    }
    Check::new(
        "FALQON energy is non-increasing",
        worst <= 1e-9,
        format!("largest increase {worst:.3e}"),
    )
}

fn check_falqon_reduction() -> Check {
    let problem = unit_3_regular(8, 7);
    let falqon = control::run(&problem, &ControlConfig::falqon(0.01, 100));
    let gd = ControlConfig {
        dt: 0.01,
        k_max: 100,
        method: Method::GdQlc(GdConfig {
            l_iters: 1,
            lr: LearningRate::Constant(1.0),
        }),
    };
    let reduced = control::run(&problem, &gd);
    let diff = match (falqon, reduced) {
        (Ok(a), Ok(b)) => a
            .e_p
            .iter()
            .zip(&b.e_p)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
        _ => f64::NAN,
    };
    Check::new(
        "GD-QLC with L=1, eta=1 reproduces FALQON",
        diff <= 1e-12,
        format!("max energy difference {diff:.3e}"),
    )
}

fn check_norm() -> Check {
    let problem = unit_3_regular(10, 3);
    let mut state = Statevector::uniform(10).expect("10 qubits");
    let mut drift: f64 = 0.0;
    for k in 0..1000 {
        state
            .apply_problem_phase(&problem.energies, 0.05)
            .expect("dims match");
        state.apply_driver(0.05 * (k as f64 * 0.37).sin());
        drift = drift.max((state.norm_sqr() - 1.0).abs());
    }
    Check::new(
        "norm preserved over 1000 layers",
        drift < 1e-10,
        format!("max |norm - 1| {drift:.3e}"),
    )
}

fn check_costs() -> Check {
    let problem = unit_3_regular(6, 5);
    let gd = ControlConfig::gdqlc(0.01, 20, 7, 0.1);
    let mut detail = Vec::new();
    let mut passed = true;
    for cfg in [ControlConfig::falqon(0.01, 20), gd] {
        let evals = control::run(&problem, &cfg)
            .map(|r| r.expectation_evals)
            .unwrap_or(u64::MAX);
        let want = expected_evals(&cfg.method, cfg.k_max);
        passed &= evals == want;
        detail.push(format!("{}: {evals} (want {want})", cfg.method.label()));
    }
    Check::new("expectation-evaluation counters", passed, detail.join(", "))
}

fn check_edge_list() -> Check {
    let g = graph::gen_barabasi_albert(12, 2, 4)
        .and_then(|g| graph::assign_uniform_weights(&g, 0.0, 2.0, 5));
    let passed = match g {
        Ok(g) => graph::read_edge_list(&graph::write_edge_list(&g)).as_ref() == Ok(&g),
        Err(_) => false,
    };
    Check::new("edge-list round trip", passed, String::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_test_passes() {
        let checks = run_self_test();
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
