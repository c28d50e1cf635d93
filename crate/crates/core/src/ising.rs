//! Diagonal Ising Hamiltonians for the four graph problems and exact ground
//! truth by exhaustive search over the diagonal.
//!
//! Bit `i` of a basis index is the computational state of qubit `i`, and the
//! corresponding `Z_i` eigenvalue is `z_i = 1 - 2 * bit_i`. For the clique and
//! cover problems a set bit means the vertex is selected.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{complement, Graph};

/// Largest register the diagonal routines accept (2^24 f64 = 128 MiB).
pub const MAX_QUBITS: usize = 24;

/// Basis indices whose energy is within this distance of the minimum count as
/// optimal.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsingError {
    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("model must act on at least one qubit")]
    NoQubits,
    #[error("term on qubit(s) {0:?} is outside the register")]
    IndexOutOfRange(Vec<usize>),
    #[error("coupling ({0}, {0}) is a self-coupling")]
    SelfCoupling(usize),
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisOutOfRange { index: usize, n_qubits: usize },
    #[error("unknown problem kind {0:?}")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    #[serde(rename = "maxcut", alias = "max_cut")]
    MaxCut,
    #[serde(rename = "weighted_maxcut", alias = "weighted_max_cut")]
    WeightedMaxCut,
    #[serde(rename = "maxclique", alias = "max_clique")]
    MaxClique,
    #[serde(rename = "mincover", alias = "min_cover")]
    MinCover,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [
        ProblemKind::MaxCut,
        ProblemKind::WeightedMaxCut,
        ProblemKind::MaxClique,
        ProblemKind::MinCover,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::MaxCut => "maxcut",
            ProblemKind::WeightedMaxCut => "weighted_maxcut",
            ProblemKind::MaxClique => "maxclique",
            ProblemKind::MinCover => "mincover",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = IsingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "maxcut" | "max_cut" => Ok(ProblemKind::MaxCut),
            "weighted_maxcut" | "weighted_max_cut" => Ok(ProblemKind::WeightedMaxCut),
            "maxclique" | "max_clique" => Ok(ProblemKind::MaxClique),
            "mincover" | "min_cover" | "min_vertex_cover" => Ok(ProblemKind::MinCover),
            _ => Err(IsingError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// `H = sum_{i<j} J_ij Z_i Z_j + sum_i h_i Z_i + c0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct IsingModel {
    n_qubits: usize,
    couplings: Vec<Coupling>,
    fields: Vec<f64>,
    constant: f64,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    n_qubits: usize,
    couplings: Vec<Coupling>,
    fields: Vec<f64>,
    constant: f64,
}

impl TryFrom<RawModel> for IsingModel {
    type Error = IsingError;

    fn try_from(raw: RawModel) -> Result<Self, Self::Error> {
        if raw.fields.len() != raw.n_qubits {
            return Err(IsingError::IndexOutOfRange(vec![raw.fields.len()]));
        }
        let fields = raw.fields.iter().copied().enumerate();
        IsingModel::new(
            raw.n_qubits,
            raw.couplings.iter().map(|c| (c.i, c.j, c.value)),
            fields,
            raw.constant,
        )
    }
}

impl From<IsingModel> for RawModel {
    fn from(m: IsingModel) -> Self {
        RawModel {
            n_qubits: m.n_qubits,
            couplings: m.couplings,
            fields: m.fields,
            constant: m.constant,
        }
    }
}

impl IsingModel {
    /// Builds a model, summing repeated terms. Coupling endpoints may be given
    /// in either order.
    pub fn new<C, F>(
        n_qubits: usize,
        couplings: C,
        fields: F,
        constant: f64,
    ) -> Result<Self, IsingError>
    where
        C: IntoIterator<Item = (usize, usize, f64)>,
        F: IntoIterator<Item = (usize, f64)>,
    {
        if n_qubits == 0 {
            return Err(IsingError::NoQubits);
        }
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, value) in couplings {
            if a == b {
                return Err(IsingError::SelfCoupling(a));
            }
            let key = (a.min(b), a.max(b));
            if key.1 >= n_qubits {
                return Err(IsingError::IndexOutOfRange(vec![a, b]));
            }
            *acc.entry(key).or_insert(0.0) += value;
        }
        let mut h = vec![0.0; n_qubits];
        for (i, value) in fields {
            if i >= n_qubits {
                return Err(IsingError::IndexOutOfRange(vec![i]));
            }
            h[i] += value;
        }
        Ok(Self {
            n_qubits,
            couplings: acc
                .into_iter()
                .map(|((i, j), value)| Coupling { i, j, value })
                .collect(),
            fields: h,
            constant,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.couplings
            .binary_search_by_key(&key, |c| (c.i, c.j))
            .map(|k| self.couplings[k].value)
            .unwrap_or(0.0)
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    fn check_size(&self) -> Result<(), IsingError> {
        if self.n_qubits > MAX_QUBITS {
            Err(IsingError::TooManyQubits(self.n_qubits))
        } else {
            Ok(())
        }
    }

    /// Energy of a single computational basis state.
    pub fn energy_of_bitstring(&self, index: usize) -> Result<f64, IsingError> {
        self.check_size()?;
        if index >= self.dim() {
            return Err(IsingError::BasisOutOfRange {
                index,
                n_qubits: self.n_qubits,
            });
        }
        Ok(self.energy_unchecked(index))
    }

    #[inline]
    fn energy_unchecked(&self, b: usize) -> f64 {
        let z = |i: usize| if (b >> i) & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = self.constant;
        for c in &self.couplings {
            e += c.value * z(c.i) * z(c.j);
        }
        for (i, &h) in self.fields.iter().enumerate() {
            e += h * z(i);
        }
        e
    }

    /// Full diagonal of `H` in the computational basis.
    pub fn diagonal_energies(&self) -> Result<Vec<f64>, IsingError> {
        self.check_size()?;
        let mut out = vec![0.0; self.dim()];
        out.par_chunks_mut(1 << 12)
            .enumerate()
            .for_each(|(chunk, slice)| {
                let base = chunk << 12;
                for (k, e) in slice.iter_mut().enumerate() {
                    *e = self.energy_unchecked(base + k);
                }
            });
        Ok(out)
    }

    pub fn ground_info(&self) -> Result<GroundInfo, IsingError> {
        Ok(GroundInfo::from_energies(&self.diagonal_energies()?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Exact minimum of the diagonal and the basis states attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundInfo {
    pub e_min: f64,
    pub optimal_states: Vec<usize>,
}

impl GroundInfo {
    pub fn from_energies(energies: &[f64]) -> Self {
        let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let optimal_states = energies
            .iter()
            .enumerate()
            .filter(|(_, &e)| e - e_min <= DEGENERACY_TOL)
            .map(|(b, _)| b)
            .collect();
        Self {
            e_min,
            optimal_states,
        }
    }

    pub fn degeneracy(&self) -> usize {
        self.optimal_states.len()
    }
}

/// Encodes a graph problem as a diagonal Ising Hamiltonian:
///
/// * max-cut: `1/2 sum_E (Z_i Z_j - 1)` (weights ignored)
/// * weighted max-cut: `1/2 sum_E (w_ij Z_i Z_j - 1)`
/// * max-clique: `3 sum_{E(complement)} (Z_i Z_j - Z_i - Z_j) + sum_V Z_i`
/// * min-cover: `3 sum_E (Z_i Z_j + Z_i + Z_j) - sum_V Z_i`
pub fn encode_problem(kind: ProblemKind, g: &Graph) -> Result<IsingModel, IsingError> {
    let n = g.n_vertices();
    let half_edges = -(g.n_edges() as f64) / 2.0;
    match kind {
        ProblemKind::MaxCut => {
            IsingModel::new(n, g.edges().iter().map(|e| (e.u, e.v, 0.5)), [], half_edges)
        }
        ProblemKind::WeightedMaxCut => IsingModel::new(
            n,
            g.edges().iter().map(|e| (e.u, e.v, e.w / 2.0)),
            [],
            half_edges,
        ),
        ProblemKind::MaxClique => {
            let gc = complement(g);
            let couplings = gc.edges().iter().map(|e| (e.u, e.v, 3.0));
            let penalties = gc.edges().iter().flat_map(|e| [(e.u, -3.0), (e.v, -3.0)]);
            let reward = (0..n).map(|i| (i, 1.0));
            IsingModel::new(n, couplings, penalties.chain(reward), 0.0)
        }
        ProblemKind::MinCover => {
            let couplings = g.edges().iter().map(|e| (e.u, e.v, 3.0));
            let penalties = g.edges().iter().flat_map(|e| [(e.u, 3.0), (e.v, 3.0)]);
            let cost = (0..n).map(|i| (i, -1.0));
            IsingModel::new(n, couplings, penalties.chain(cost), 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        assign_uniform_weights, gen_barabasi_albert, gen_erdos_renyi, gen_random_regular,
    };

    fn triangle() -> Graph {
        Graph::complete(3).unwrap()
    }

    fn bit(b: usize, i: usize) -> bool {
        (b >> i) & 1 == 1
    }

    // Independent oracles: plain combinatorics on the graph, no spins.
    fn cut_weight(g: &Graph, b: usize) -> f64 {
        g.edges()
            .iter()
            .filter(|e| bit(b, e.u) != bit(b, e.v))
            .map(|e| e.w)
            .sum()
    }

    fn is_clique(g: &Graph, b: usize) -> bool {
        let n = g.n_vertices();
        (0..n).all(|u| (u + 1..n).all(|v| !(bit(b, u) && bit(b, v)) || g.has_edge(u, v)))
    }

    fn is_cover(g: &Graph, b: usize) -> bool {
        g.edges().iter().all(|e| bit(b, e.u) || bit(b, e.v))
    }

    #[test]
    fn maxcut_triangle_encoding() {
        let m = encode_problem(ProblemKind::MaxCut, &triangle()).unwrap();
        assert_eq!(m.couplings().len(), 3);
        assert!(m.couplings().iter().all(|c| c.value == 0.5));
        assert!(m.fields().iter().all(|&h| h == 0.0));
        assert_eq!(m.constant(), -1.5);
    }

    #[test]
    fn mincover_single_edge_encoding() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let m = encode_problem(ProblemKind::MinCover, &g).unwrap();
        assert_eq!(m.coupling(0, 1), 3.0);
        assert_eq!(m.fields(), &[2.0, 2.0]);
        assert_eq!(m.constant(), 0.0);
    }

    #[test]
    fn maxclique_of_clique_has_no_couplings() {
        let m = encode_problem(ProblemKind::MaxClique, &triangle()).unwrap();
        assert!(m.couplings().is_empty());
        assert_eq!(m.fields(), &[1.0, 1.0, 1.0]);
        assert_eq!(m.constant(), 0.0);
    }

    #[test]
    fn triangle_energies() {
        let m = encode_problem(ProblemKind::MaxCut, &triangle()).unwrap();
        let diag = m.diagonal_energies().unwrap();
        assert_eq!(diag[0b000], 0.0);
        assert_eq!(diag[0b001], -2.0);
        let mean = diag.iter().sum::<f64>() / diag.len() as f64;
        assert_eq!(mean, m.constant());
        let gi = GroundInfo::from_energies(&diag);
        assert_eq!(gi.e_min, -2.0);
        assert_eq!(gi.degeneracy(), 6);
    }

    #[test]
    fn single_edge_ground_states() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let cut = encode_problem(ProblemKind::MaxCut, &g)
            .unwrap()
            .ground_info()
            .unwrap();
        assert_eq!(cut.e_min, -1.0);
        assert_eq!(cut.optimal_states, vec![0b01, 0b10]);
        let cover = encode_problem(ProblemKind::MinCover, &g)
            .unwrap()
            .ground_info()
            .unwrap();
        assert_eq!(cover.optimal_states, vec![0b01, 0b10]);
    }

    #[test]
    fn basis_out_of_range() {
        let m = encode_problem(ProblemKind::MaxCut, &triangle()).unwrap();
        assert_eq!(
            m.energy_of_bitstring(8),
            Err(IsingError::BasisOutOfRange {
                index: 8,
                n_qubits: 3
            })
        );
    }

    #[test]
    fn size_cap() {
        let m = IsingModel::new(MAX_QUBITS + 1, [], [], 0.0).unwrap();
        assert_eq!(
            m.diagonal_energies(),
            Err(IsingError::TooManyQubits(MAX_QUBITS + 1))
        );
    }

    #[test]
    fn model_validation() {
        assert_eq!(
            IsingModel::new(2, [(1, 1, 1.0)], [], 0.0),
            Err(IsingError::SelfCoupling(1))
        );
        assert!(IsingModel::new(2, [(0, 2, 1.0)], [], 0.0).is_err());
        assert!(IsingModel::new(2, [], [(2, 1.0)], 0.0).is_err());
        let merged = IsingModel::new(3, [(2, 0, 1.0), (0, 2, 0.5)], [], 0.0).unwrap();
        assert_eq!(
            merged.couplings(),
            &[Coupling {
                i: 0,
                j: 2,
                value: 1.5
            }]
        );
    }

    #[test]
    fn kind_parsing() {
        for k in ProblemKind::ALL {
            assert_eq!(k.as_str().parse::<ProblemKind>().unwrap(), k);
        }
        assert_eq!(
            "weighted-maxcut".parse::<ProblemKind>().unwrap(),
            ProblemKind::WeightedMaxCut
        );
        assert!("tsp".parse::<ProblemKind>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = assign_uniform_weights(&gen_random_regular(6, 3, 1).unwrap(), 0.0, 2.0, 2).unwrap();
        let m = encode_problem(ProblemKind::WeightedMaxCut, &g).unwrap();
        assert_eq!(IsingModel::from_json(&m.to_json()).unwrap(), m);
        assert!(IsingModel::from_json(
            r#"{"n_qubits":2,"couplings":[],"fields":[0.0],"constant":0.0}"#
        )
        .is_err());
    }

    #[test]
    fn maxcut_matches_cut_counting() {
        for seed in 0..6 {
            let topo = gen_erdos_renyi(9 + (seed as usize % 4), 0.5, seed).unwrap();
            let weighted = assign_uniform_weights(&topo, 0.0, 2.0, seed + 100).unwrap();
            let unit = encode_problem(ProblemKind::MaxCut, &topo).unwrap();
            let wm = encode_problem(ProblemKind::WeightedMaxCut, &weighted).unwrap();
            let offset = (weighted.total_weight() - weighted.n_edges() as f64) / 2.0;
            let d_unit = unit.diagonal_energies().unwrap();
            let d_w = wm.diagonal_energies().unwrap();
            for b in 0..unit.dim() {
                assert!((d_unit[b] + cut_weight(&topo, b)).abs() < 1e-12);
                assert!((d_w[b] - (offset - cut_weight(&weighted, b))).abs() < 1e-12);
                assert_eq!(unit.energy_of_bitstring(b).unwrap(), d_unit[b]);
                assert_eq!(wm.energy_of_bitstring(b).unwrap(), d_w[b]);
            }
        }
    }

    #[test]
    fn maxclique_ground_states_are_maximum_cliques() {
        for seed in 0..8 {
            let g = gen_erdos_renyi(6 + (seed as usize % 5), 0.5, seed).unwrap();
            let n = g.n_vertices();
            let best = (0..1usize << n)
                .filter(|&b| is_clique(&g, b))
                .map(|b| b.count_ones())
                .max()
                .unwrap();
            let expected: Vec<usize> = (0..1usize << n)
                .filter(|&b| is_clique(&g, b) && b.count_ones() == best)
                .collect();
            let gi = encode_problem(ProblemKind::MaxClique, &g)
                .unwrap()
                .ground_info()
                .unwrap();
            assert_eq!(gi.optimal_states, expected, "seed {seed}");
        }
    }

    #[test]
    fn mincover_ground_states_are_minimum_covers() {
        for seed in 0..8 {
            let n = 6 + (seed as usize % 5);
            let g = gen_barabasi_albert(n, 3, seed).unwrap();
            let best = (0..1usize << n)
                .filter(|&b| is_cover(&g, b))
                .map(|b| b.count_ones())
                .min()
                .unwrap();
            let expected: Vec<usize> = (0..1usize << n)
                .filter(|&b| is_cover(&g, b) && b.count_ones() == best)
                .collect();
            let gi = encode_problem(ProblemKind::MinCover, &g)
                .unwrap()
                .ground_info()
                .unwrap();
            assert_eq!(gi.optimal_states, expected, "seed {seed}");
        }
    }

    #[test]
    fn diagonal_mean_is_constant() {
        for kind in ProblemKind::ALL {
            let g = gen_erdos_renyi(7, 0.5, 3).unwrap();
            let m = encode_problem(kind, &g).unwrap();
            let d = m.diagonal_energies().unwrap();
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            assert!((mean - m.constant()).abs() < 1e-12, "{kind}");
        }
    }
}
