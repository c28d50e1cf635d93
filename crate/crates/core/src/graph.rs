//! Weighted undirected simple graphs, seeded random generators, and the
//! edge-list text format.
//!
//! Every edge is stored canonically as `(u, v, w)` with `u < v`, and the edge
//! list is kept sorted by `(u, v)` so that two graphs with the same topology and
//! weights compare equal regardless of how they were built.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::rng_from_seed;

/// Restart budget for the pairing model before giving up.
pub const MAX_PAIRING_RESTARTS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) has non-finite weight {w}")]
    NonFiniteWeight { u: usize, v: usize, w: f64 },
    #[error("no {d}-regular graph on {n} vertices")]
    InfeasibleRegular { n: usize, d: usize },
    #[error("pairing model failed to produce a simple graph after {0} restarts")]
    RetriesExhausted(usize),
    #[error("Barabási–Albert attachment count m={m} must satisfy 1 <= m < n={n}")]
    InvalidAttachment { n: usize, m: usize },
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("weight interval [{lo}, {hi}] is invalid")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples. Endpoints are canonicalized so
    /// that `u < v`; self-loops, duplicates and non-finite weights are rejected.
    pub fn new<I>(n_vertices: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n_vertices == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            let (u, v) = if a <= b { (a, b) } else { (b, a) };
            if v >= n_vertices {
                return Err(GraphError::VertexOutOfRange {
                    u: a,
                    v: b,
                    n: n_vertices,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !w.is_finite() {
                return Err(GraphError::NonFiniteWeight { u, v, w });
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            out.push(Edge { u, v, w });
        }
        out.sort_by_key(|e| (e.u, e.v));
        Ok(Self {
            n_vertices,
            edges: out,
        })
    }

    /// Unit-weight graph from vertex pairs.
    pub fn unweighted<I>(n_vertices: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(n_vertices, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn edgeless(n_vertices: usize) -> Result<Self, GraphError> {
        Self::new(n_vertices, std::iter::empty())
    }

    pub fn complete(n_vertices: usize) -> Result<Self, GraphError> {
        Self::unweighted(n_vertices, all_pairs(n_vertices))
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&key, |e| (e.u, e.v))
            .is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Same topology with unit weights on every edge.
    pub fn with_unit_weights(&self) -> Self {
        Self {
            n_vertices: self.n_vertices,
            edges: self.edges.iter().map(|e| Edge { w: 1.0, ..*e }).collect(),
        }
    }
}

fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

/// Uniformly random `d`-regular graph on `n` vertices via the configuration
/// (pairing) model, restarting whenever the pairing produces a self-loop or a
/// repeated edge.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    if n == 0 || d >= n || !(n * d).is_multiple_of(2) {
        return Err(GraphError::InfeasibleRegular { n, d });
    }
    let mut rng = rng_from_seed(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..MAX_PAIRING_RESTARTS {
        stubs.shuffle(&mut rng);
        if let Some(pairs) = try_pairing(&stubs) {
            let g = Graph::unweighted(n, pairs)?;
            debug_assert!(g.degrees().iter().all(|&k| k == d));
            return Ok(g);
        }
    }
    Err(GraphError::RetriesExhausted(MAX_PAIRING_RESTARTS))
}

fn try_pairing(stubs: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut seen = HashSet::with_capacity(stubs.len() / 2);
    let mut pairs = Vec::with_capacity(stubs.len() / 2);
    for chunk in stubs.chunks_exact(2) {
        let (u, v) = (chunk[0].min(chunk[1]), chunk[0].max(chunk[1]));
        if u == v || !seen.insert((u, v)) {
            return None;
        }
        pairs.push((u, v));
    }
    Some(pairs)
}

/// Preferential-attachment graph grown from an `(m+1)`-clique core. Each new
/// vertex attaches to `m` distinct existing vertices drawn with probability
/// proportional to their current degree, so the result has
/// `m(m+1)/2 + m(n-m-1)` edges.
pub fn gen_barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    if m == 0 || m >= n {
        return Err(GraphError::InvalidAttachment { n, m });
    }
    let mut rng = rng_from_seed(seed);
    let mut pairs: Vec<(usize, usize)> = all_pairs(m + 1).collect();
    // Each vertex appears once per incident edge, so uniform draws from this
    // list are degree-proportional.
    let mut endpoints: Vec<usize> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
    for new in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            pairs.push((t, new));
            endpoints.push(t);
            endpoints.push(new);
        }
    }
    Graph::unweighted(n, pairs)
}

/// G(n, p): every unordered pair, visited in lexicographic order, is kept
/// independently with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut rng = rng_from_seed(seed);
    let pairs: Vec<_> = all_pairs(n).filter(|_| rng.random::<f64>() < p).collect();
    Graph::unweighted(n, pairs)
}

/// Replaces every weight with an independent draw `lo + (hi - lo) * u`,
/// `u ~ U[0, 1)`, in edge order. A degenerate interval yields exactly `lo`.
pub fn assign_uniform_weights(g: &Graph, lo: f64, hi: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(GraphError::InvalidInterval { lo, hi });
    }
    let mut rng: ChaCha8Rng = rng_from_seed(seed);
    let edges = g
        .edges
        .iter()
        .map(|e| {
            let u: f64 = rng.random();
            Edge {
                w: lo + (hi - lo) * u,
                ..*e
            }
        })
        .collect();
    Ok(Graph {
        n_vertices: g.n_vertices,
        edges,
    })
}

/// Unit-weight complement graph.
pub fn complement(g: &Graph) -> Graph {
    let edges = all_pairs(g.n_vertices)
        .filter(|&(u, v)| !g.has_edge(u, v))
        .map(|(u, v)| Edge { u, v, w: 1.0 })
        .collect();
    Graph {
        n_vertices: g.n_vertices,
        edges,
    }
}

/// Serializes to the edge-list format: a first line holding the vertex count,
/// then one `u v w` line per edge. Weights use the shortest decimal that parses
/// back to the identical `f64`.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{}", g.n_vertices).unwrap();
    for e in &g.edges {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
    out
}

/// Parses the edge-list format. Blank lines and lines starting with `#` are
/// skipped; a missing weight column means weight 1.
pub fn read_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 0,
        msg: "missing vertex-count header".into(),
    })?;
    let n: usize = header.parse().map_err(|_| GraphError::Parse {
        line: hline,
        msg: format!("expected vertex count, found {header:?}"),
    })?;
    if n == 0 {
        return Err(GraphError::Empty);
    }

    let mut seen = HashSet::new();
    let mut triples = Vec::new();
    for (line, text) in lines {
        let parse_err = |msg: String| GraphError::Parse { line, msg };
        let fields: Vec<&str> = text.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(format!("expected `u v w`, found {text:?}")));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(format!("bad vertex {:?}", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("bad vertex {:?}", fields[1])))?;
        let w: f64 = match fields.get(2) {
            Some(s) => s
                .parse()
                .map_err(|_| parse_err(format!("bad weight {s:?}")))?,
            None => 1.0,
        };
        if u.max(v) >= n {
            return Err(GraphError::VertexOutOfRange { u, v, n });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        triples.push((u, v, w));
    }
    Graph::new(n, triples)
}
