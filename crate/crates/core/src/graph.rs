//! Weighted undirected graphs with self-loops.
//!
//! Degrees count a self-loop's weight once, so `volume == 2 * total_weight`
//! only for loop-free graphs. Vertices are dense `0..n` indices; labels are
//! carried as metadata and never consulted by the algorithms.

use std::fmt::Write as _;
use std::path::Path;

use crate::info::check_simplex;
use crate::joint::JointDistribution;
use crate::{Error, Result};

/// An undirected edge stored with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.i == self.j
    }
}

/// Immutable weighted graph.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    degrees: Vec<f64>,
    loops: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    volume: f64,
    labels: Option<Vec<String>>,
}

impl WeightedGraph {
    /// Builds a graph from `(i, j, w)` triples. Weights must be finite and
    /// non-negative; `(i, j)` and `(j, i)` are the same edge.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut stored: Vec<Edge> = Vec::new();
        let mut degrees = vec![0.0; vertex_count];
        let mut loops = vec![0.0; vertex_count];
        let mut neighbor_counts = vec![0usize; vertex_count];
        let mut sorted = true;
        for (a, b, weight) in edges {
            let (i, j) = if a <= b { (a, b) } else { (b, a) };
            if j >= vertex_count {
                return Err(Error::VertexOutOfRange { index: j, vertex_count });
            }
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(Error::InvalidWeight { i, j, weight });
            }
            if let Some(last) = stored.last() {
                sorted &= (last.i, last.j) < (i, j);
            }
            if i == j {
                degrees[i] += weight;
                loops[i] += weight;
            } else {
                degrees[i] += weight;
                degrees[j] += weight;
                neighbor_counts[i] += 1;
                neighbor_counts[j] += 1;
            }
            stored.push(Edge { i, j, weight });
        }
        // strictly increasing input cannot repeat an edge
        if !sorted {
            let mut keys: Vec<(usize, usize)> = stored.iter().map(|e| (e.i, e.j)).collect();
            keys.sort_unstable();
            if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> =
            neighbor_counts.iter().map(|&c| Vec::with_capacity(c)).collect();
        for e in stored.iter().filter(|e| !e.is_loop()) {
            adjacency[e.i].push((e.j, e.weight));
            adjacency[e.j].push((e.i, e.weight));
        }
        let volume = degrees.iter().sum();
        Ok(Self {
            vertex_count,
            edges: stored,
            degrees,
            loops,
            adjacency,
            volume,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.vertex_count, "one label per vertex");
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn self_loop(&self, v: usize) -> f64 {
        self.loops[v]
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Non-loop neighbours of `v` with edge weights.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Weight of edge `(i, j)`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.loops[i];
        }
        self.adjacency[i]
            .iter()
            .find(|(n, _)| *n == j)
            .map_or(0.0, |(_, w)| *w)
    }

    pub fn subset_volume(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&v| self.degrees[v]).sum()
    }

    /// Cut weight `g` of a vertex subset: degree mass minus twice the weight
    /// of non-loop edges with both endpoints inside. Self-loops therefore
    /// count toward `g`, which makes a singleton's `g` equal its degree.
    pub fn cut_weight(&self, subset: &[usize]) -> f64 {
        let mut inside = vec![false; self.vertex_count];
        for &v in subset {
            inside[v] = true;
        }
        let mut internal = 0.0;
        for &v in subset {
            for &(u, w) in &self.adjacency[v] {
                if inside[u] {
                    internal += w;
                }
            }
        }
        // every internal edge was seen from both ends
        (self.subset_volume(subset) - internal).max(0.0)
    }

    /// Connectivity over edges with positive weight.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, w) in &self.adjacency[v] {
                if w > 0.0 && !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.vertex_count
    }

    /// Parses the `i j w` edge-list fixture format. The vertex count is one
    /// more than the largest index mentioned.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut triples = Vec::new();
        let mut max_index = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            if parts.len() != 3 {
                return Err(err(format!("expected `i j w`, got {line:?}")));
            }
            let i: usize = parts[0].parse().map_err(|e| err(format!("{e}")))?;
            let j: usize = parts[1].parse().map_err(|e| err(format!("{e}")))?;
            let w: f64 = parts[2].parse().map_err(|e| err(format!("{e}")))?;
            max_index = Some(max_index.unwrap_or(0).max(i).max(j));
            triples.push((i, j, w));
        }
        let n = max_index.map_or(0, |m| m + 1);
        Self::new(n, triples)
    }

    pub fn from_edge_list_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("{}: {e}", path.as_ref().display()),
        })?;
        Self::parse_edge_list(&text)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.i, e.j, e.weight);
        }
        out
    }
}

/// Undirected bipartite graph of a joint distribution: vertices `0..n` are
/// the `x` outcomes, `n..n+m` the `y` outcomes, and edge `(x_i, y_j)` carries
/// `p(x_i, y_j)`. The volume is 2.
pub fn bipartite_from_joint(joint: &JointDistribution) -> Result<WeightedGraph> {
    let (n, m) = (joint.rows(), joint.cols());
    if let Some((i, j, _)) = joint.iter().find(|&(_, _, p)| p <= 0.0) {
        return Err(Error::ZeroEntry(i, j));
    }
    let labels = (0..n)
        .map(|i| format!("x{i}"))
        .chain((0..m).map(|j| format!("y{j}")))
        .collect();
    let graph = WeightedGraph::new(n + m, joint.iter().map(|(i, j, p)| (i, n + j, p)))?;
    Ok(graph.with_labels(labels))
}

/// Edge-weight rule for the complete state-action value graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueKernel {
    /// `w_ij = |v_i - v_j|`.
    Difference,
    /// `w_ij = (max v - min v) - |v_i - v_j|`: pairs with close values are
    /// strongly tied, so minimising structural entropy groups them. All-equal
    /// values give a zero-volume graph.
    #[default]
    Complement,
}

/// Complete loop-free graph over scalar policy values with
/// `w_ij = |v_i - v_j|`.
pub fn value_graph(values: &[f64]) -> Result<WeightedGraph> {
    value_graph_with(values, ValueKernel::Difference)
}

pub fn value_graph_with(values: &[f64], kernel: ValueKernel) -> Result<WeightedGraph> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewValues { needed: 2, got: n });
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidProbability { index, value });
    }
    let range = match kernel {
        ValueKernel::Difference => 0.0,
        ValueKernel::Complement => {
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            max - min
        }
    };
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let diff = (values[i] - values[j]).abs();
            let w = match kernel {
                ValueKernel::Difference => diff,
                ValueKernel::Complement => (range - diff).max(0.0),
            };
            edges.push((i, j, w));
        }
    }
    WeightedGraph::new(n, edges)
}

/// Connected graph whose vertex degrees equal `probs`.
///
/// Built inductively: two vertices get an edge of the smaller mass and a
/// self-loop carrying the difference on the larger one; each further vertex
/// `v_m` rescales the existing edges so the old vertices keep their share of
/// the remaining mass, links to every earlier vertex with weight
/// `p_i * p_m`, and takes a self-loop of `p_m^2`. Zero-weight self-loops are
/// omitted.
pub fn degree_realization(probs: &[f64]) -> Result<WeightedGraph> {
    check_simplex(probs)?;
    let n = probs.len();
    if n == 1 {
        return WeightedGraph::new(1, [(0, 0, probs[0])]);
    }

    // Edge weights for the normalised prefix currently realised.
    let mut weights: Vec<((usize, usize), f64)> = Vec::new();
    let mut prefix_mass = probs[0] + probs[1];
    let (t0, t1) = (probs[0] / prefix_mass, probs[1] / prefix_mass);
    weights.push(((0, 1), t0.min(t1)));
    let big = if t0 <= t1 { 1 } else { 0 };
    weights.push(((big, big), (t1 - t0).abs()));

    for m in 2..n {
        let next_mass = prefix_mass + probs[m];
        let new_share = probs[m] / next_mass;
        // old degree t_i -> (1 - q) * p_i / S_{m+1}: uniform factor (1 - q)^2
        let scale = (prefix_mass / next_mass).powi(2);
        for (_, w) in weights.iter_mut() {
            *w *= scale;
        }
        for i in 0..m {
            weights.push(((i, m), probs[i] / next_mass * new_share));
        }
        weights.push(((m, m), new_share * new_share));
        prefix_mass = next_mass;
    }

    WeightedGraph::new(
        n,
        weights
            .into_iter()
            .filter(|&((i, j), w)| !(i == j && w == 0.0))
            .map(|((i, j), w)| (i, j, w)),
    )
}
