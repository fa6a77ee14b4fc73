//! Encoding trees of height at most two and their structural entropy.
//!
//! A tree is stored as an arena whose node 0 is the root. Root children are
//! kept in canonical order (by smallest member vertex) and every internal
//! node lists its leaves in vertex order, so two trees describing the same
//! partition compare equal.

use std::fmt::Write as _;

use crate::graph::WeightedGraph;
use crate::info::normalized_entropy;
use crate::{Error, Result};

/// Gains at or below this many bits are treated as zero by the optimizer.
pub const MIN_GAIN: f64 = 1e-12;

const CACHE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    vertices: Vec<usize>,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    cut: f64,
    volume: f64,
}

impl TreeNode {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    /// Cached `g`: weight of edges leaving the subset (self-loops included).
    pub fn cut(&self) -> f64 {
        self.cut
    }

    /// Cached `vol`: sum of member degrees.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingTree {
    nodes: Vec<TreeNode>,
    vertex_count: usize,
}

/// Which stretch pairings the greedy optimizer may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeMode {
    /// Leaf-leaf pairings only; every internal node ends with two leaves.
    Matching,
    /// Any two root children may be merged; merged subsets are unioned so
    /// the tree stays at height two.
    Community,
}

impl EncodingTree {
    /// Root with one leaf per vertex.
    pub fn one_layer(graph: &WeightedGraph) -> Result<Self> {
        if !(graph.volume() > 0.0) {
            return Err(Error::ZeroVolume);
        }
        let groups: Vec<Vec<usize>> = (0..graph.vertex_count()).map(|v| vec![v]).collect();
        Self::from_partition(graph, &groups)
    }

    /// Two-layer tree whose root children are `groups`. Singleton groups
    /// become leaves directly under the root; larger groups become internal
    /// nodes with one leaf per member.
    pub fn from_partition(graph: &WeightedGraph, groups: &[Vec<usize>]) -> Result<Self> {
        let n = graph.vertex_count();
        let mut owner = vec![usize::MAX; n];
        let mut groups: Vec<Vec<usize>> = groups.to_vec();
        for g in groups.iter_mut() {
            if g.is_empty() {
                return Err(Error::InvalidTree("empty group".into()));
            }
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        for (gi, g) in groups.iter().enumerate() {
            for &v in g {
                if v >= n {
                    return Err(Error::VertexOutOfRange { index: v, vertex_count: n });
                }
                if owner[v] != usize::MAX {
                    return Err(Error::InvalidTree(format!("vertex {v} appears twice")));
                }
                owner[v] = gi;
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidTree(format!("vertex {v} not covered")));
        }

        let cuts = group_cuts(graph, &owner, groups.len());
        let mut nodes = vec![TreeNode {
            vertices: (0..n).collect(),
            parent: None,
            children: Vec::new(),
            // nothing leaves the whole vertex set; only self-loops count
            cut: (0..n).map(|v| graph.self_loop(v)).sum(),
            volume: graph.volume(),
        }];
        for (gi, g) in groups.iter().enumerate() {
            let id = NodeId(nodes.len());
            nodes[0].children.push(id);
            nodes.push(TreeNode {
                vertices: g.clone(),
                parent: Some(NodeId(0)),
                children: Vec::new(),
                cut: cuts[gi],
                volume: graph.subset_volume(g),
            });
            if g.len() > 1 {
                for &v in g {
                    let leaf = NodeId(nodes.len());
                    nodes[id.0].children.push(leaf);
                    nodes.push(TreeNode {
                        vertices: vec![v],
                        parent: Some(id),
                        children: Vec::new(),
                        cut: graph.degree(v),
                        volume: graph.degree(v),
                    });
                }
            }
        }
        Ok(Self { nodes, vertex_count: n })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn root_children(&self) -> &[NodeId] {
        &self.nodes[0].children
    }

    pub fn height(&self) -> usize {
        if self.root_children().iter().any(|&c| !self.node(c).is_leaf()) {
            2
        } else {
            1
        }
    }

    /// Vertex subsets of the root's children, in canonical order.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        self.root_children()
            .iter()
            .map(|&c| self.node(c).vertices.clone())
            .collect()
    }

    /// Root child holding exactly this vertex set, if any.
    pub fn find_child(&self, vertices: &[usize]) -> Option<NodeId> {
        let mut wanted = vertices.to_vec();
        wanted.sort_unstable();
        self.root_children()
            .iter()
            .copied()
            .find(|&c| self.node(c).vertices == wanted)
    }

    /// Checks that the tree partitions the graph's vertices and that cached
    /// `g` / `vol` agree with recomputation.
    pub fn validate(&self, graph: &WeightedGraph) -> Result<()> {
        if self.vertex_count != graph.vertex_count() {
            return Err(Error::TreeMismatch(format!(
                "tree covers {} vertices, graph has {}",
                self.vertex_count,
                graph.vertex_count()
            )));
        }
        let rebuilt = Self::from_partition(graph, &self.communities())?;
        let close = |a: f64, b: f64| (a - b).abs() <= CACHE_TOLERANCE * a.abs().max(b.abs()).max(1.0);
        for ((_, mine), (_, fresh)) in self.nodes().zip(rebuilt.nodes()) {
            if mine.vertices != fresh.vertices
                || !close(mine.cut, fresh.cut)
                || !close(mine.volume, fresh.volume)
            {
                return Err(Error::TreeMismatch(format!(
                    "node {:?} caches g={} vol={}, graph gives g={} vol={}",
                    mine.vertices, mine.cut, mine.volume, fresh.cut, fresh.volume
                )));
            }
        }
        if self.nodes.len() != rebuilt.nodes.len() {
            return Err(Error::TreeMismatch("node structure differs".into()));
        }
        Ok(())
    }

    /// Applies the stretch operator to root children `a` and `b`: two
    /// leaves get a new common parent; if either is internal the subsets are
    /// unioned into one internal node.
    pub fn stretch(&self, graph: &WeightedGraph, a: NodeId, b: NodeId) -> Result<Self> {
        self.require_siblings(a, b)?;
        let mut groups = Vec::with_capacity(self.root_children().len() - 1);
        let mut merged = Vec::new();
        for &c in self.root_children() {
            if c == a || c == b {
                merged.extend_from_slice(&self.node(c).vertices);
            } else {
                groups.push(self.node(c).vertices.clone());
            }
        }
        groups.push(merged);
        Self::from_partition(graph, &groups)
    }

    fn require_siblings(&self, a: NodeId, b: NodeId) -> Result<()> {
        let under_root = |id: NodeId| self.nodes.get(id.0).and_then(|n| n.parent) == Some(NodeId(0));
        if a == b || !under_root(a) || !under_root(b) {
            return Err(Error::NotSiblings(a.0, b.0));
        }
        Ok(())
    }

    /// `(x, y)` vertex pairs of a perfect matching tree over a bipartite graph
    /// with `x` vertices `0..n` and `y` vertices `n..2n`, ordered left to
    /// right. `None` if the tree is not such a matching.
    pub fn matching_pairs(&self) -> Option<Vec<(usize, usize)>> {
        let total = self.vertex_count;
        if total % 2 != 0 {
            return None;
        }
        let n = total / 2;
        let mut pairs = Vec::with_capacity(n);
        for &c in self.root_children() {
            match self.node(c).vertices.as_slice() {
                &[x, y] if x < n && y >= n => pairs.push((x, y)),
                _ => return None,
            }
        }
        Some(pairs)
    }

    /// Indented text form: one node per line, `depth {vertices} g vol`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_node(&mut out, NodeId(0), 0);
        out
    }

    fn write_node(&self, out: &mut String, id: NodeId, depth: usize) {
        let node = self.node(id);
        let members: Vec<String> = node.vertices.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            out,
            "{}{} {{{}}} {} {}",
            "  ".repeat(depth),
            depth,
            members.join(","),
            node.cut,
            node.volume
        );
        for &c in &node.children {
            self.write_node(out, c, depth + 1);
        }
    }

    /// Parses [`EncodingTree::to_text`] output and checks it against `graph`.
    pub fn parse_text(graph: &WeightedGraph, text: &str) -> Result<Self> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut saw_root = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: lineno + 1, msg: msg.to_string() };
            let (depth, rest) = line.split_once(' ').ok_or_else(|| err("missing fields"))?;
            let open = rest.find('{').ok_or_else(|| err("missing '{'"))?;
            let close = rest.find('}').ok_or_else(|| err("missing '}'"))?;
            let members = rest[open + 1..close]
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>().map_err(|e| err(&e.to_string())))
                .collect::<Result<Vec<usize>>>()?;
            match depth {
                "0" => saw_root = true,
                "1" => groups.push(members),
                "2" => {
                    let parent = groups.last().ok_or_else(|| err("leaf without parent"))?;
                    if members.len() != 1 || !parent.contains(&members[0]) {
                        return Err(err("depth-2 line must be a member of its parent"));
                    }
                }
                _ => return Err(err("depth must be 0, 1 or 2")),
            }
        }
        if !saw_root {
            return Err(Error::Parse { line: 0, msg: "no root line".into() });
        }
        let tree = Self::from_partition(graph, &groups)?;
        let reparsed_matches = tree.to_text().lines().count() == text.lines().filter(|l| !l.trim().is_empty() && !l.trim().starts_with('#')).count();
        if !reparsed_matches {
            return Err(Error::TreeMismatch("node count differs from text".into()));
        }
        let expected = tree.to_text();
        for (mine, theirs) in expected.lines().zip(text.lines().filter(|l| !l.trim().is_empty() && !l.trim().starts_with('#'))) {
            let nums = |s: &str| -> Vec<f64> {
                s.rsplitn(3, ' ').take(2).filter_map(|t| t.parse::<f64>().ok()).collect()
            };
            let (a, b) = (nums(mine), nums(theirs.trim()));
            if a.len() != 2 || b.len() != 2 || a.iter().zip(&b).any(|(x, y)| (x - y).abs() > CACHE_TOLERANCE * x.abs().max(1.0)) {
                return Err(Error::TreeMismatch(format!("cached values differ: {theirs:?}")));
            }
        }
        Ok(tree)
    }
}

fn group_cuts(graph: &WeightedGraph, owner: &[usize], groups: usize) -> Vec<f64> {
    let mut cuts = vec![0.0; groups];
    for e in graph.edges() {
        if e.is_loop() {
            cuts[owner[e.i]] += e.weight;
        } else if owner[e.i] != owner[e.j] {
            cuts[owner[e.i]] += e.weight;
            cuts[owner[e.j]] += e.weight;
        }
    }
    cuts
}

/// Structural entropy of `graph` under `tree`, in bits:
/// `-sum over non-root nodes of (g / vol(G)) * log2(vol(node) / vol(parent))`.
pub fn structural_entropy(graph: &WeightedGraph, tree: &EncodingTree) -> Result<f64> {
    tree.validate(graph)?;
    let total = graph.volume();
    if !(total > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let mut h = 0.0;
    for (id, node) in tree.nodes() {
        let Some(parent) = node.parent else { continue };
        let _ = id;
        if node.cut > 0.0 {
            h -= node.cut / total * (node.volume / tree.node(parent).volume).log2();
        }
    }
    Ok(h)
}

/// Parent-level contribution of a root child, scaled by `vol(G)`, with the
/// `sum d log d` over its members factored out. For any height-2 tree,
/// `vol(G) * H = sum(phi) - sum_v d_v log2 d_v`.
#[inline]
fn block_phi(cut: f64, volume: f64, total: f64) -> f64 {
    let parent_term = if cut > 0.0 { -cut * (volume / total).log2() } else { 0.0 };
    let member_term = if volume > 0.0 { volume * volume.log2() } else { 0.0 };
    parent_term + member_term
}

#[inline]
fn merge_gain(
    (cut_a, vol_a, phi_a): (f64, f64, f64),
    (cut_b, vol_b, phi_b): (f64, f64, f64),
    between: f64,
    total: f64,
) -> f64 {
    let cut = cut_a + cut_b - 2.0 * between;
    let vol = vol_a + vol_b;
    (phi_a + phi_b - block_phi(cut, vol, total)) / total
}

/// Entropy reduction from stretching root children `a` and `b`.
///
/// For two leaves this is
/// `-((g_a + g_b - g') / vol(G)) * log2(vol(a') / vol(G))`; when either node
/// is internal the reduction of the union is returned.
pub fn stretch_delta(graph: &WeightedGraph, tree: &EncodingTree, a: NodeId, b: NodeId) -> Result<f64> {
    tree.require_siblings(a, b)?;
    if tree.vertex_count() != graph.vertex_count() {
        return Err(Error::TreeMismatch("vertex counts differ".into()));
    }
    let total = graph.volume();
    if !(total > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let (na, nb) = (tree.node(a), tree.node(b));
    let mut in_b = vec![false; graph.vertex_count()];
    for &v in &nb.vertices {
        in_b[v] = true;
    }
    let between: f64 = na
        .vertices
        .iter()
        .flat_map(|&v| graph.neighbors(v).iter())
        .filter(|(u, _)| in_b[*u])
        .map(|(_, w)| w)
        .sum();
    let merged_cut = na.cut + nb.cut - 2.0 * between;
    let merged_vol = na.volume + nb.volume;
    if na.is_leaf() && nb.is_leaf() {
        let freed = na.cut + nb.cut - merged_cut;
        if freed == 0.0 {
            return Ok(0.0);
        }
        return Ok(-(freed / total) * (merged_vol / total).log2());
    }
    Ok(merge_gain(
        (na.cut, na.volume, block_phi(na.cut, na.volume, total)),
        (nb.cut, nb.volume, block_phi(nb.cut, nb.volume, total)),
        between,
        total,
    ))
}

/// Result of a traced greedy optimization.
#[derive(Debug, Clone)]
pub struct Optimization {
    pub tree: EncodingTree,
    /// Structural entropy before the first stretch and after each one.
    pub entropies: Vec<f64>,
    /// Vertex sets of the two root children merged at each step.
    pub merges: Vec<(Vec<usize>, Vec<usize>)>,
}

const NO_PARTNER: (f64, usize) = (f64::NEG_INFINITY, usize::MAX);

/// Working state of the greedy optimizer. A block lives in the slot of its
/// smallest vertex, so slot order is the tie-break order. Pair gains are
/// cached in a dense upper-triangular table, and every row remembers its best
/// partner to the right.
struct Greedy {
    n: usize,
    total: f64,
    log_total: f64,
    alive: Vec<bool>,
    open: Vec<bool>,
    cut: Vec<f64>,
    volume: Vec<f64>,
    phi: Vec<f64>,
    members: Vec<Vec<usize>>,
    between: Vec<f64>,
    gain: Vec<f64>,
    best: Vec<(f64, usize)>,
}

impl Greedy {
    fn new(graph: &WeightedGraph) -> Self {
        let n = graph.vertex_count();
        let total = graph.volume();
        let mut g = Self {
            n,
            total,
            log_total: total.log2(),
            alive: vec![true; n],
            open: vec![true; n],
            cut: graph.degrees().to_vec(),
            volume: graph.degrees().to_vec(),
            phi: vec![0.0; n],
            members: (0..n).map(|v| vec![v]).collect(),
            between: vec![0.0; n * n],
            gain: vec![f64::NEG_INFINITY; n * n],
            best: vec![NO_PARTNER; n],
        };
        for v in 0..n {
            g.phi[v] = g.block_phi(g.cut[v], g.volume[v]);
        }
        for e in graph.edges() {
            if !e.is_loop() && e.weight > 0.0 {
                g.between[e.i * n + e.j] = e.weight;
                g.between[e.j * n + e.i] = e.weight;
                g.gain[e.i * n + e.j] = g.pair_gain(e.i, e.j);
            }
        }
        for x in 0..n {
            g.rescan(x);
        }
        g
    }

    /// Same quantity as [`block_phi`], arranged to need one logarithm.
    #[inline]
    fn block_phi(&self, cut: f64, volume: f64) -> f64 {
        if volume > 0.0 {
            volume.log2() * (volume - cut) + cut * self.log_total
        } else {
            0.0
        }
    }

    #[inline]
    fn pair_gain(&self, x: usize, y: usize) -> f64 {
        let w = self.between[x * self.n + y];
        if !(w > 0.0 && self.open[x] && self.open[y]) {
            return f64::NEG_INFINITY;
        }
        let cut = (self.cut[x] + self.cut[y] - 2.0 * w).max(0.0);
        let merged = self.block_phi(cut, self.volume[x] + self.volume[y]);
        (self.phi[x] + self.phi[y] - merged) / self.total
    }

    fn rescan(&mut self, x: usize) {
        let mut best = NO_PARTNER;
        if self.alive[x] && self.open[x] {
            let row = &self.gain[x * self.n..(x + 1) * self.n];
            for y in x + 1..self.n {
                if self.alive[y] && row[y] > best.0 {
                    best = (row[y], y);
                }
            }
        }
        self.best[x] = best;
    }

    /// Largest cached gain above [`MIN_GAIN`], ties to the smallest pair.
    fn pick(&self) -> Option<(usize, usize, f64)> {
        let mut pick = None;
        let mut top = MIN_GAIN;
        for x in 0..self.n {
            if self.alive[x] && self.best[x].0 > top {
                top = self.best[x].0;
                pick = Some((x, self.best[x].1, top));
            }
        }
        pick
    }

    /// Merges slot `b` into slot `a` (`a < b`).
    fn merge(&mut self, a: usize, b: usize, mode: OptimizeMode) {
        let n = self.n;
        let w = self.between[a * n + b];
        self.cut[a] = (self.cut[a] + self.cut[b] - 2.0 * w).max(0.0);
        self.volume[a] += self.volume[b];
        self.phi[a] = self.block_phi(self.cut[a], self.volume[a]);
        let moved = std::mem::take(&mut self.members[b]);
        self.members[a].extend(moved);
        self.alive[b] = false;
        self.open[a] = mode == OptimizeMode::Community;
        self.best[b] = NO_PARTNER;

        for x in 0..n {
            if !self.alive[x] || x == a {
                continue;
            }
            let w = self.between[a * n + x] + self.between[b * n + x];
            self.between[a * n + x] = w;
            self.between[x * n + a] = w;
            let (lo, hi) = if x < a { (x, a) } else { (a, x) };
            self.gain[lo * n + hi] = self.pair_gain(lo, hi);
        }
        for x in 0..b {
            if !self.alive[x] || x == a {
                continue;
            }
            let partner = self.best[x].1;
            if partner == a || partner == b {
                self.rescan(x);
            } else if x < a {
                let g = self.gain[x * n + a];
                if g > self.best[x].0 || (g == self.best[x].0 && a < partner) {
                    self.best[x] = (g, a);
                }
            }
        }
        self.rescan(a);
    }
}

/// Greedy two-layer optimization: repeatedly apply the stretch with the
/// largest entropy reduction until no pairing reduces entropy. Ties go to
/// the pair whose smallest vertices are lexicographically smallest. Uses
/// memory quadratic in the vertex count.
pub fn optimize_two_layer(graph: &WeightedGraph, mode: OptimizeMode) -> Result<EncodingTree> {
    Ok(run_greedy(graph, mode, false)?.tree)
}

pub fn optimize_two_layer_traced(graph: &WeightedGraph, mode: OptimizeMode) -> Result<Optimization> {
    run_greedy(graph, mode, true)
}

fn run_greedy(graph: &WeightedGraph, mode: OptimizeMode, traced: bool) -> Result<Optimization> {
    if !(graph.volume() > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let mut state = Greedy::new(graph);
    let mut entropy = normalized_entropy(graph.degrees());
    let mut entropies = vec![entropy];
    let mut merges = Vec::new();
    while let Some((a, b, gain)) = state.pick() {
        if traced {
            merges.push((state.members[a].clone(), state.members[b].clone()));
        }
        state.merge(a, b, mode);
        entropy -= gain;
        entropies.push(entropy);
    }
    let groups: Vec<Vec<usize>> = state
        .members
        .into_iter()
        .zip(&state.alive)
        .filter(|(_, &alive)| alive)
        .map(|(m, _)| m)
        .collect();
    let tree = EncodingTree::from_partition(graph, &groups)?;
    Ok(Optimization { tree, entropies, merges })
}

/// Re-pairs a matching tree: node `i` (left to right) becomes
/// `{x_{(i + l) mod n}, y_i}`.
pub fn l_transform(graph: &WeightedGraph, tree: &EncodingTree, l: usize) -> Result<EncodingTree> {
    tree.validate(graph)?;
    let pairs = tree
        .matching_pairs()
        .ok_or_else(|| Error::NotMatching("every root child must hold one x and one y".into()))?;
    let n = pairs.len();
    let groups: Vec<Vec<usize>> = (0..n)
        .map(|i| vec![pairs[(i + l) % n].0, pairs[i].1])
        .collect();
    EncodingTree::from_partition(graph, &groups)
}
