//! Feedback-based quantum optimization on graph problems.
//!
//! * [`graph`]: weighted graphs, seeded generators, edge-list I/O
//! * [`ising`]: diagonal Ising encodings and brute-force ground truth
//! * [`statevector`]: matrix-free layer kernels and commutator observables
//! * [`control`]: FALQON and GD-QLC layer-by-layer control loops
//! * [`harness`]: experiment sweeps, CSV persistence, cost reports, self-test
//! * [`oracle`]: dense reference operators for small registers

pub mod control;
pub mod graph;
pub mod harness;
pub mod ising;
pub mod oracle;
pub mod seed;
pub mod statevector;

pub use control::{ControlConfig, GdConfig, LearningRate, Method, Problem, RunRecord};
pub use graph::Graph;
pub use ising::{encode_problem, GroundInfo, IsingModel, ProblemKind};
pub use statevector::{LayerObservables, Statevector};
