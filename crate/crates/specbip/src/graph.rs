//! Graph representation and node-level utilities.
//!
//! Graphs are undirected and weighted with strictly positive weights, stored
//! as an ordered symmetric coordinate list. Node indices are 0-based
//! everywhere inside the crate; the file formats in [`crate::io`] convert to
//! and from the 1-based external convention.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Undirected weighted graph without multi-edges.
///
/// Entries are kept canonical: one `(i, j, w)` triple per edge with `i <= j`,
/// sorted lexicographically, `w > 0`. Self-loops (`i == j`) may be present on
/// freshly built graphs; [`strip`] removes them. The `weighted` flag is
/// derived from the data: a graph is unweighted when every weight equals 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from `(i, j, w)` edges (0-based). Edges are
    /// symmetrized; when the same unordered pair occurs more than once the
    /// last occurrence wins.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut map = BTreeMap::new();
        for (i, j, w) in edges {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if !w.is_finite() {
                return Err(Error::NonFinite);
            }
            if w <= 0.0 {
                return Err(Error::InvalidOptions(format!(
                    "edge ({}, {}) has nonpositive weight {}",
                    i + 1,
                    j + 1,
                    w
                )));
            }
            map.insert((i.min(j), i.max(j)), w);
        }
        Ok(Graph {
            n,
            entries: map.into_iter().map(|((i, j), w)| (i, j, w)).collect(),
            labels: None,
        })
    }

    /// Builds an unweighted graph (all weights 1) from index pairs.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Graph::from_edges(n, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonical edge list: `(i, j, w)` with `i <= j`, sorted.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Number of stored edges (self-loops included, each undirected edge once).
    pub fn edge_count(&self) -> usize {
        self.entries.len()
    }

    /// Sum of all edge weights, each undirected edge counted once.
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|&(_, _, w)| w).sum()
    }

    /// True when any weight differs from 1.
    pub fn is_weighted(&self) -> bool {
        self.entries.iter().any(|&(_, _, w)| w != 1.0)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n {
            return Err(Error::SizeMismatch(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(())
    }

    /// Weight of edge `(i, j)`, or 0 when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        match self
            .entries
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
        {
            Ok(pos) => self.entries[pos].2,
            Err(_) => 0.0,
        }
    }

    /// Per-node adjacency lists with neighbors in ascending index order.
    /// Self-loops are listed once under their own node.
    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, _) in &self.entries {
            adj[i].push(j);
            if i != j {
                adj[j].push(i);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Node degrees counting edge multiplicity (self-loop counts once).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(i, j, _) in &self.entries {
            deg[i] += 1;
            if i != j {
                deg[j] += 1;
            }
        }
        deg
    }

    /// Dense symmetric adjacency matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(i, j, w) in &self.entries {
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
        m
    }

    /// Reads a graph off a dense symmetric matrix, keeping entries with
    /// `|v| > tol`. Entries must be positive and the matrix symmetric.
    pub fn from_dense(m: &DMatrix<f64>, tol: f64) -> Result<Graph> {
        if m.nrows() != m.ncols() {
            return Err(Error::SizeMismatch(format!(
                "matrix is {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = m[(i, j)];
                if v.abs() > tol {
                    if (v - m[(j, i)]).abs() > tol {
                        return Err(Error::SizeMismatch(format!(
                            "matrix not symmetric at ({}, {})",
                            i + 1,
                            j + 1
                        )));
                    }
                    edges.push((i, j, v));
                }
            }
        }
        Graph::from_edges(n, edges)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        connected_components(self).components.len() == 1
    }
}

/// A bijection on node indices. `map[old] = new`, 0-based.
///
/// Applying the permutation to a graph moves node `i` to position `map[i]`:
/// `permute(g, p).weight(p.apply(i), p.apply(j)) == g.weight(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePermutation {
    map: Vec<usize>,
}

impl NodePermutation {
    pub fn new(map: Vec<usize>) -> Result<NodePermutation> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n {
                return Err(Error::InvalidPermutation(format!(
                    "value {} out of range 0..{}",
                    v, n
                )));
            }
            if seen[v] {
                return Err(Error::InvalidPermutation(format!("value {} repeated", v)));
            }
            seen[v] = true;
        }
        Ok(NodePermutation { map })
    }

    pub fn identity(n: usize) -> NodePermutation {
        NodePermutation {
            map: (0..n).collect(),
        }
    }

    /// Builds the permutation from an ordering: `order[k]` is the original
    /// index of the node placed at position `k`.
    pub fn from_ordering(order: &[usize]) -> Result<NodePermutation> {
        let n = order.len();
        let mut map = vec![usize::MAX; n];
        for (newpos, &old) in order.iter().enumerate() {
            if old >= n {
                return Err(Error::InvalidPermutation(format!(
                    "value {} out of range 0..{}",
                    old, n
                )));
            }
            if map[old] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("value {} repeated", old)));
            }
            map[old] = newpos;
        }
        Ok(NodePermutation { map })
    }

    /// The ordering view: element `k` is the original index of the node
    /// placed at position `k`.
    pub fn ordering(&self) -> Vec<usize> {
        let mut order = vec![0usize; self.map.len()];
        for (old, &new) in self.map.iter().enumerate() {
            order[new] = old;
        }
        order
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// New position of original node `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> NodePermutation {
        NodePermutation {
            map: self.ordering(),
        }
    }
}

/// A two-set split of the nodes, labels in `{1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub n1: usize,
    pub n2: usize,
    membership: Vec<u8>,
}

impl Partition {
    pub fn from_membership(membership: Vec<u8>) -> Result<Partition> {
        if let Some(&bad) = membership.iter().find(|&&l| l != 1 && l != 2) {
            return Err(Error::InvalidOptions(format!(
                "partition label {} is not 1 or 2",
                bad
            )));
        }
        let n1 = membership.iter().filter(|&&l| l == 1).count();
        let n2 = membership.len() - n1;
        Ok(Partition { n1, n2, membership })
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    /// Label of node `i`, 1 or 2.
    pub fn label(&self, i: usize) -> u8 {
        self.membership[i]
    }

    pub fn membership(&self) -> &[u8] {
        &self.membership
    }

    /// Indices of the nodes in set 1, ascending.
    pub fn set1(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.membership[i] == 1).collect()
    }

    pub fn set2(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.membership[i] == 2).collect()
    }

    /// Same partition with the two labels exchanged.
    pub fn swapped(&self) -> Partition {
        let membership = self.membership.iter().map(|&l| 3 - l).collect();
        Partition::from_membership(membership).expect("labels stay in {1,2}")
    }
}

/// Connected components, largest first; ties broken by smallest node index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub components: Vec<Vec<usize>>,
}

impl ComponentDecomposition {
    pub fn largest(&self) -> &[usize] {
        &self.components[0]
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Maximal connected node sets, sorted by decreasing size.
pub fn connected_components(g: &Graph) -> ComponentDecomposition {
    let mut uf = UnionFind::new(g.n());
    for &(i, j, _) in g.entries() {
        if i != j {
            uf.union(i, j);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n() {
        let root = uf.find(v);
        groups.entry(root).or_default().push(v);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    components.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
    ComponentDecomposition { components }
}

/// Relabels the graph: node `i` moves to position `p.apply(i)`.
pub fn permute(g: &Graph, p: &NodePermutation) -> Result<Graph> {
    if p.len() != g.n() {
        return Err(Error::SizeMismatch(format!(
            "permutation of length {} for graph with {} nodes",
            p.len(),
            g.n()
        )));
    }
    let mut out = Graph::from_edges(
        g.n(),
        g.entries()
            .iter()
            .map(|&(i, j, w)| (p.apply(i), p.apply(j), w)),
    )?;
    if let Some(labels) = g.labels() {
        let mut new_labels = vec![String::new(); g.n()];
        for (i, lab) in labels.iter().enumerate() {
            new_labels[p.apply(i)] = lab.clone();
        }
        out.set_labels(new_labels)?;
    }
    Ok(out)
}

/// Induced subgraph on `nodes`, relabeled to `0..nodes.len()` in the given
/// order. Nodes must be distinct and in range.
pub fn extract_subgraph(g: &Graph, nodes: &[usize]) -> Result<Graph> {
    let mut position = vec![usize::MAX; g.n()];
    for (k, &v) in nodes.iter().enumerate() {
        if v >= g.n() {
            return Err(Error::IndexOutOfRange { index: v, n: g.n() });
        }
        if position[v] != usize::MAX {
            return Err(Error::InvalidOptions(format!(
                "node {} listed twice in subgraph selection",
                v + 1
            )));
        }
        position[v] = k;
    }
    let edges = g.entries().iter().filter_map(|&(i, j, w)| {
        let (pi, pj) = (position[i], position[j]);
        if pi != usize::MAX && pj != usize::MAX {
            Some((pi, pj, w))
        } else {
            None
        }
    });
    let mut out = Graph::from_edges(nodes.len(), edges)?;
    if let Some(labels) = g.labels() {
        out.set_labels(nodes.iter().map(|&v| labels[v].clone()).collect())?;
    }
    Ok(out)
}

/// Removes self-loops and degree-0 nodes. Returns the cleaned graph, the
/// original indices of the removed nodes, and the number of self-loops
/// dropped.
pub fn strip(g: &Graph) -> (Graph, Vec<usize>, usize) {
    let self_loops = g.entries().iter().filter(|&&(i, j, _)| i == j).count();
    let mut degree = vec![0usize; g.n()];
    for &(i, j, _) in g.entries() {
        if i != j {
            degree[i] += 1;
            degree[j] += 1;
        }
    }
    let kept: Vec<usize> = (0..g.n()).filter(|&v| degree[v] > 0).collect();
    let removed: Vec<usize> = (0..g.n()).filter(|&v| degree[v] == 0).collect();
    let stripped =
        extract_subgraph(g, &kept).expect("kept nodes are distinct and in range");
    (stripped, removed, self_loops)
}

/// Total weight of edges with both endpoints in the same set, each
/// undirected edge counted once. Zero exactly when the partition witnesses
/// bipartiteness.
pub fn frustration(g: &Graph, part: &Partition) -> Result<f64> {
    if part.len() != g.n() {
        return Err(Error::SizeMismatch(format!(
            "partition of {} nodes for graph with {} nodes",
            part.len(),
            g.n()
        )));
    }
    let total: f64 = g
        .entries()
        .iter()
        .filter(|&&(i, j, _)| part.label(i) == part.label(j))
        .map(|&(_, _, w)| w)
        .sum();
    // the empty-sum identity is -0.0; report plain zero
    Ok(total + 0.0)
}
